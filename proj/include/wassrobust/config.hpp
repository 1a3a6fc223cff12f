#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wassrobust/attacks.hpp"
#include "wassrobust/dataset.hpp"
#include "wassrobust/error.hpp"
#include "wassrobust/federated.hpp"
#include "wassrobust/model.hpp"
#include "wassrobust/regularizer.hpp"
#include "wassrobust/trainers.hpp"

namespace wassrobust {

/// Every problem found in a config file, in key order.
struct ConfigValidationError : ConfigError {
    explicit ConfigValidationError(std::vector<std::string> problems);
    std::vector<std::string> problems;
};

enum class DataSource { Synthetic, Idx, Csv };

struct DataSpec {
    DataSource source = DataSource::Synthetic;
    SyntheticSpec synthetic;
    /// Synthetic test-set size; drawn from an independent seed stream.
    std::size_t test_n = 200;

    std::string images, labels, test_images, test_labels;
    std::size_t limit = 0;
    std::string csv, test_csv;
    std::string label_column = "label";
    char delimiter = ',';

    /// Keep only these classes (relabelled in order); empty keeps all.
    std::vector<int> classes;
};

struct ModelSpec {
    LossKind kind = LossKind::Logistic;
    std::size_t hidden = 8;
    Lipschitz lip;
};

struct FederatedSpec {
    std::size_t workers = 5;
    PartitionScheme scheme = PartitionScheme::Iid;
    std::size_t local_epochs = 1;
};

struct EvalSpec {
    std::vector<AttackKind> attacks;
    std::vector<double> eps;
};

/// Named algorithm of a run: erm, spgd, spgda, adv-fgsm, adv-ifgsm, adv-pgd, wrm, drfl or fedavg.
bool is_known_algorithm(const std::string& name);

struct ExperimentConfig {
    std::string name = "run";
    std::uint64_t seed = 0;
    DataSpec data;
    ModelSpec model;
    Regularizer reg;
    /// Shared trainer settings; the algorithm field is set per run.
    TrainerConfig trainer;
    std::vector<std::string> algorithms{"spgda"};
    FederatedSpec federated;
    /// Base settings of every attack (training and evaluation); kind and eps are overridden.
    AttackConfig attack;
    EvalSpec eval;
    std::string output = "metrics.csv";
    /// When set, final parameters are dumped to <params_dir>/<name>-<algo>.wrb.
    std::string params_dir;
    /// Fill the ms column with wall-clock time (makes output non-reproducible).
    bool record_time = false;
};

/// Parses `key = value` lines; `#` starts a comment. Throws ConfigValidationError
/// for syntax errors and duplicate keys.
std::map<std::string, std::string> parse_key_values(const std::string& text);

/// Parses and validates a whole config, collecting every problem before throwing.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// The trainer configuration of one named algorithm.
TrainerConfig trainer_for(const ExperimentConfig& cfg, const std::string& algorithm);

}  // namespace wassrobust
