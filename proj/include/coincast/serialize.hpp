#pragma once

#include <string>
#include <vector>

#include "coincast/ensemble.hpp"

namespace coincast {

// Learner parameter files: a text manifest listing tensor name, shape and
// element offset, plus a flat binary of 64-bit little-endian floats in
// row-major order. `base` is the path without extension; writes
// <base>.manifest and <base>.bin.
void save_params(const std::string& base, const LstmParams& params);
// Shapes come from cfg; mismatches and version mismatches throw DataError.
LstmParams load_params(const std::string& base, const LearnerConfig& cfg);

// Model bundle directory: manifest.json (format version, J, combiner mode,
// weights, feature spec, normalization stats, per-round learner config)
// plus one parameter file pair per round.
void save_bundle(const std::string& dir, const EnsembleModel& model);
EnsembleModel load_bundle(const std::string& dir);

}  // namespace coincast
