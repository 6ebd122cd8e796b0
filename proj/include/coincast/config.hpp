#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "coincast/dates.hpp"
#include "coincast/ensemble.hpp"
#include "coincast/learner.hpp"

namespace coincast {

// One structured config file drives every command; training defaults follow
// the configured experiment setup and are all overridable.
struct RunConfig {
  std::uint64_t seed = 0;  // mandatory, no implicit entropy

  struct Data {
    std::vector<std::string> trading;     // first path is the primary source
    std::vector<std::string> blockchain;
    std::vector<std::string> search;
    std::string tweets;                   // per-tweet scores + engagement
    Date start, end;
  } data;

  struct Features {
    std::string combination = "all";
    std::array<double, 3> split = {0.70, 0.15, 0.15};
    int window = 7;
  } features;

  LearnerConfig learner;  // seed filled from the global seed at run time

  struct Ensemble {
    int rounds = 10;
    CombinerMode combiner_mode = CombinerMode::kRescaled;
  } ensemble;

  struct Fluctuation {
    bool enabled = false;
  } fluctuation;

  struct Evaluate {
    int plot_window = 100;               // days in the forecast-vs-actual plot
    std::vector<double> bands = {500.0};
    bool include_single = false;         // add the single-learner curve
  } evaluate;

  struct Longterm {
    int horizon = 30;
    int windows = 10;
  } longterm;

  struct Compare {
    std::vector<std::string> combinations = {"trading", "all"};
    std::vector<std::string> kinds = {"single_learner", "ensemble"};
  } compare;

  struct Output {
    std::string dir = "out";
  } output;
};

RunConfig load_config(const std::string& path);

}  // namespace coincast
