#include "wassrobust/experiment.hpp"

#include <chrono>
#include <filesystem>
#include <ostream>

#include "wassrobust/federated.hpp"
#include "wassrobust/params_io.hpp"
#include "wassrobust/rng.hpp"

namespace wassrobust {

LoadedData load_data(const ExperimentConfig& cfg) {
    const DataSpec& d = cfg.data;
    LoadedData out;
    switch (d.source) {
        case DataSource::Synthetic: {
            out.train = gen_synthetic(d.synthetic);
            SyntheticSpec test = d.synthetic;
            test.n = d.test_n;
            test.seed = derive_seed(d.synthetic.seed, 1);
            out.test = d.test_n >= 2 ? gen_synthetic(test) : out.train;
            break;
        }
        case DataSource::Idx:
            out.train = load_idx(d.images, d.labels, d.limit);
            out.test = d.test_images.empty() ? out.train : load_idx(d.test_images, d.test_labels, d.limit);
            break;
        case DataSource::Csv:
            out.train = load_csv(d.csv, d.label_column, d.delimiter);
            out.test = d.test_csv.empty() ? out.train : load_csv(d.test_csv, d.label_column, d.delimiter);
            break;
    }
    if (!d.classes.empty()) {
        out.train = select_classes(out.train, d.classes);
        out.test = select_classes(out.test, d.classes);
    }
    out.train.validate();
    out.test.validate();
    if (out.train.dim() != out.test.dim()) throw ValidationError("training and test features differ in dimension");
    const bool classifier = cfg.model.kind == LossKind::Logistic || cfg.model.kind == LossKind::TinyMlp;
    if (classifier && out.train.class_count != 2)
        throw ValidationError("binary classifiers need exactly two classes, data has " +
                              std::to_string(out.train.class_count) + " (select two with data.classes)");
    return out;
}

LossModel build_model(const ExperimentConfig& cfg, std::size_t feature_dim) {
    switch (cfg.model.kind) {
        case LossKind::LeastSquares:
            return LossModel::least_squares(feature_dim, cfg.model.lip);
        case LossKind::Logistic:
            return LossModel::logistic(feature_dim, cfg.model.lip);
        case LossKind::TinyMlp:
            return LossModel::tiny_mlp(feature_dim, cfg.model.hidden);
        case LossKind::LinearScore:
            return LossModel::linear_score(feature_dim);
    }
    throw InternalError("unhandled loss kind");
}

namespace {

class RowBuilder {
  public:
    RowBuilder(const ExperimentConfig& cfg, const LoadedData& data, const LossModel& model, const TransportCost& cost)
        : cfg_(cfg), data_(data), model_(model), cost_(cost), start_(std::chrono::steady_clock::now()) {}

    void emit(std::vector<MetricsRow>& rows, const std::string& algo, const TraceEntry& entry,
              const ModelParams& params) const {
        MetricsRow base;
        base.run = cfg_.name + "-" + algo;
        base.algo = algo;
        base.iter = entry.iteration;
        base.objective = entry.objective;
        base.stationarity = entry.stationarity;
        if (model_.is_classifier()) base.clean_err = clean_error(model_, params, data_.test.items);
        if (cfg_.record_time)
            base.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
        if (cfg_.eval.attacks.empty()) {
            rows.push_back(base);
            return;
        }
        for (AttackKind kind : cfg_.eval.attacks) {
            for (double eps : cfg_.eval.eps) {
                AttackConfig ac = cfg_.attack;
                ac.kind = kind;
                ac.eps_adv = eps;
                MetricsRow row = base;
                row.attack = std::string(to_string(kind));
                row.eps = eps;
                row.adv_err = evaluate_under_attack(model_, params, data_.test.items, ac, cost_);
                rows.push_back(std::move(row));
            }
        }
    }

  private:
    const ExperimentConfig& cfg_;
    const LoadedData& data_;
    const LossModel& model_;
    const TransportCost& cost_;
    std::chrono::steady_clock::time_point start_;
};

void dump_params(const ExperimentConfig& cfg, const std::string& algo, const ModelParams& params) {
    if (cfg.params_dir.empty()) return;
    std::filesystem::create_directories(cfg.params_dir);
    write_params(params, (std::filesystem::path(cfg.params_dir) / (cfg.name + "-" + algo + ".wrb")).string());
}

}  // namespace

std::vector<MetricsRow> run_pipeline(const ExperimentConfig& cfg, const LoadedData& data) {
    const LossModel model = build_model(cfg, data.train.dim());
    const std::span<const Datum> train_items = data.train.items;

    // Validate every run before any of them starts.
    for (const auto& algo : cfg.algorithms) {
        const TrainerConfig tc = trainer_for(cfg, algo);
        if (algo == "drfl" || algo == "fedavg") {
            if (cfg.federated.workers > data.train.size())
                throw ConfigError("federated.workers exceeds the dataset size");
            tc.validate(std::max(tc.batch_size, data.train.size()));
        } else {
            tc.validate(data.train.size());
        }
    }

    std::vector<MetricsRow> rows;
    for (const auto& algo : cfg.algorithms) {
        const TrainerConfig tc = trainer_for(cfg, algo);
        const RowBuilder builder(cfg, data, model, tc.cost);
        if (algo == "drfl" || algo == "fedavg") {
            auto shards = partition(train_items, cfg.federated.scheme, cfg.federated.workers, cfg.seed,
                                    data.train.class_count);
            const ModelParams start = initial_params(model, tc);
            builder.emit(rows, algo, measure(model, start, cfg.reg, train_items, tc, 0), start);
            const RoundHook hook = [&](const ServerState& s) {
                if (s.round % tc.stride == 0 || s.round == tc.iters)
                    builder.emit(rows, algo, measure(model, s.params, cfg.reg, train_items, tc, s.round), s.params);
            };
            const FederatedResult result =
                algo == "drfl" ? drfl_train(std::move(shards), model, cfg.reg, tc, hook)
                               : fedavg_train(std::move(shards), model, cfg.reg, cfg.federated.local_epochs, tc, hook);
            dump_params(cfg, algo, result.params);
        } else {
            const EvalHook hook = [&](const TrainerState& s) {
                builder.emit(rows, algo, s.trace.back(), s.params);
            };
            const TrainResult result = train(train_items, model, cfg.reg, tc, hook);
            dump_params(cfg, algo, result.params);
        }
    }
    return rows;
}

int run_experiment(const std::string& config_path, std::ostream& out, std::ostream& err) {
    ExperimentConfig cfg;
    try {
        cfg = load_config(config_path);
    } catch (const ConfigValidationError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    try {
        const LoadedData data = load_data(cfg);
        const auto rows = run_pipeline(cfg, data);
        write_metrics(rows, cfg.output);
        out << "wrote " << rows.size() << " rows to " << cfg.output << '\n';
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

int attack_eval(const std::string& params_path, const std::string& config_path, std::ostream& out,
                std::ostream& err) {
    try {
        const ExperimentConfig cfg = load_config(config_path);
        const LoadedData data = load_data(cfg);
        const LossModel model = build_model(cfg, data.test.dim());
        if (!model.is_classifier()) throw ConfigError("attack evaluation needs a classification model");
        const ModelParams params = read_params(params_path);
        if (params.dim() != model.weights_dim())
            throw ValidationError("parameter dump has dimension " + std::to_string(params.dim()) + ", model needs " +
                                  std::to_string(model.weights_dim()));
        std::vector<AttackKind> kinds = cfg.eval.attacks;
        if (kinds.empty()) kinds = {AttackKind::Fgsm, AttackKind::Ifgsm, AttackKind::Pgd};

        out << "attack,eps,error\n";
        out << "none,0," << format_real(clean_error(model, params, data.test.items)) << '\n';
        for (AttackKind kind : kinds) {
            for (double eps : cfg.eval.eps) {
                AttackConfig ac = cfg.attack;
                ac.kind = kind;
                ac.eps_adv = eps;
                out << to_string(kind) << ',' << format_real(eps) << ','
                    << format_real(evaluate_under_attack(model, params, data.test.items, ac, cfg.trainer.cost))
                    << '\n';
            }
        }
        return 0;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace wassrobust
