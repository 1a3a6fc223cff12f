#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "wassrobust/config.hpp"
#include "wassrobust/dataset.hpp"
#include "wassrobust/metrics.hpp"

namespace wassrobust {

struct LoadedData {
    Dataset train;
    /// Falls back to the training set when no test source is configured.
    Dataset test;
};

/// Loads and validates the configured data. Synthetic test sets use stream 1
/// of the data seed.
LoadedData load_data(const ExperimentConfig& cfg);

/// Builds the configured loss for `feature_dim` inputs.
LossModel build_model(const ExperimentConfig& cfg, std::size_t feature_dim);

/// Trains every configured algorithm in order and returns all metrics rows.
/// Run ids are "<name>-<algorithm>".
std::vector<MetricsRow> run_pipeline(const ExperimentConfig& cfg, const LoadedData& data);

/// Parses, validates, runs and writes the metrics file. Returns 0 on success,
/// 2 for configuration problems and 1 for any other failure; in both failure
/// cases no metrics file is written.
int run_experiment(const std::string& config_path, std::ostream& out, std::ostream& err);

/// Evaluates a WRB1 parameter dump on the configured test set under every
/// configured attack and budget (fgsm, ifgsm and pgd when none are configured).
int attack_eval(const std::string& params_path, const std::string& config_path, std::ostream& out,
                std::ostream& err);

}  // namespace wassrobust
