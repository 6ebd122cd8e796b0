#pragma once

#include <string>

#include "coincast/config.hpp"

namespace coincast::cli {

// Command bodies shared by the command-line tool and the tests. All outputs
// land under cfg.output.dir; inputs are never mutated. Errors are thrown
// (ConfigError / DataError / TrainError) and mapped to exit codes by the
// tool's main().

// Merges all modalities into the canonical 18-channel feature store and
// returns its path (<out>/features.csv).
std::string cmd_prepare(const RunConfig& cfg);

// Trains the configured ensemble (plus the ten fluctuation varieties when
// enabled) and persists the bundles. Returns the main bundle directory.
std::string cmd_train(const RunConfig& cfg);

// Per-split metrics.csv plus the forecast-vs-actual and error-histogram
// plots for a trained bundle.
void cmd_evaluate(const RunConfig& cfg, const std::string& bundle_dir);

// Distribution record + bell-curve plot for one date; needs the ten
// variety bundles from a fluctuation-enabled train run.
void cmd_fluctuation(const RunConfig& cfg, const std::string& date_text);

// Roll-forward rolling.csv + min/mean/max band plot for a price-only bundle.
void cmd_longterm(const RunConfig& cfg, const std::string& bundle_dir);

// Model-comparison table across configured combinations and kinds.
void cmd_compare(const RunConfig& cfg);

}  // namespace coincast::cli
