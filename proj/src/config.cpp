#include "wassrobust/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iterator>
#include <limits>
#include <set>
#include <sstream>

#include "wassrobust/rng.hpp"

namespace wassrobust {

namespace {

std::string join_lines(const std::vector<std::string>& problems) {
    std::string out = "invalid configuration:";
    for (const auto& p : problems) out += "\n  " + p;
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

/// Typed lookups that record problems instead of throwing.
class Fields {
  public:
    explicit Fields(std::map<std::string, std::string> kv) : kv_(std::move(kv)) {}

    const std::string* raw(const std::string& key) {
        seen_.insert(key);
        const auto it = kv_.find(key);
        return it == kv_.end() ? nullptr : &it->second;
    }

    std::string text(const std::string& key, std::string fallback) {
        const auto* v = raw(key);
        return v ? *v : fallback;
    }

    double real(const std::string& key, double fallback) {
        const auto* v = raw(key);
        if (!v) return fallback;
        try {
            return parse_real(*v);
        } catch (const FormatError&) {
            problem(key, "expected a number, got '" + *v + "'");
            return fallback;
        }
    }

    std::optional<double> optional_real(const std::string& key) {
        if (!raw(key)) return std::nullopt;
        return real(key, 0.0);
    }

    std::uint64_t integer(const std::string& key, std::uint64_t fallback) {
        const auto* v = raw(key);
        if (!v) return fallback;
        std::uint64_t out = 0;
        const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
        if (ec != std::errc() || ptr != v->data() + v->size()) {
            problem(key, "expected a nonnegative integer, got '" + *v + "'");
            return fallback;
        }
        return out;
    }

    bool boolean(const std::string& key, bool fallback) {
        const auto* v = raw(key);
        if (!v) return fallback;
        if (*v == "true" || *v == "1") return true;
        if (*v == "false" || *v == "0") return false;
        problem(key, "expected true or false, got '" + *v + "'");
        return fallback;
    }

    std::vector<double> reals(const std::string& key, std::vector<double> fallback) {
        const auto* v = raw(key);
        if (!v) return fallback;
        std::vector<double> out;
        for (const auto& item : split_list(*v)) {
            try {
                out.push_back(parse_real(item));
            } catch (const FormatError&) {
                problem(key, "'" + item + "' is not a number");
            }
        }
        return out;
    }

    void problem(const std::string& key, const std::string& what) { problems_.push_back(key + ": " + what); }
    void problem(const std::string& what) { problems_.push_back(what); }

    /// Flags unknown keys; call after all lookups.
    void finish() {
        for (const auto& [key, value] : kv_)
            if (!seen_.contains(key)) problem(key, "unknown key");
        if (!problems_.empty()) throw ConfigValidationError(problems_);
    }

  private:
    std::map<std::string, std::string> kv_;
    std::set<std::string> seen_;
    std::vector<std::string> problems_;
};

template <class F>
void check(Fields& f, const std::string& key, F&& fn) {
    try {
        fn();
    } catch (const ConfigError& e) {
        f.problem(key, e.what());
    }
}

}  // namespace

ConfigValidationError::ConfigValidationError(std::vector<std::string> p)
    : ConfigError(join_lines(p)), problems(std::move(p)) {}

bool is_known_algorithm(const std::string& name) {
    static const std::set<std::string> known{"erm",       "spgd", "spgda", "adv-fgsm", "adv-ifgsm",
                                             "adv-pgd",   "wrm",  "drfl",  "fedavg"};
    return known.contains(name);
}

std::map<std::string, std::string> parse_key_values(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::vector<std::string> problems;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            problems.push_back("line " + std::to_string(line_no) + ": expected 'key = value'");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) {
            problems.push_back("line " + std::to_string(line_no) + ": empty key");
            continue;
        }
        if (!kv.emplace(key, trim(line.substr(eq + 1))).second)
            problems.push_back("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    if (!problems.empty()) throw ConfigValidationError(problems);
    return kv;
}

ExperimentConfig parse_config(const std::string& text) {
    Fields f(parse_key_values(text));
    ExperimentConfig cfg;

    cfg.name = f.text("name", cfg.name);
    if (cfg.name.empty()) f.problem("name", "must not be empty");
    cfg.seed = f.integer("seed", 0);
    cfg.output = f.text("output", cfg.output);
    if (cfg.output.empty()) f.problem("output", "must not be empty");
    cfg.params_dir = f.text("params_dir", "");
    cfg.record_time = f.boolean("record_time", false);

    // data
    DataSpec& d = cfg.data;
    const std::string source = f.text("data.source", "synthetic");
    if (source == "synthetic")
        d.source = DataSource::Synthetic;
    else if (source == "idx")
        d.source = DataSource::Idx;
    else if (source == "csv")
        d.source = DataSource::Csv;
    else
        f.problem("data.source", "expected synthetic, idx or csv, got '" + source + "'");
    check(f, "data.kind", [&] { d.synthetic.kind = parse_synthetic_kind(f.text("data.kind", "two-gaussians")); });
    d.synthetic.n = f.integer("data.n", d.synthetic.n);
    d.synthetic.dim = f.integer("data.dim", d.synthetic.dim);
    d.synthetic.noise = f.real("data.noise", d.synthetic.noise);
    d.synthetic.separation = f.real("data.separation", d.synthetic.separation);
    d.synthetic.seed = f.integer("data.seed", cfg.seed);
    d.test_n = f.integer("data.test_n", d.test_n);
    d.images = f.text("data.images", "");
    d.labels = f.text("data.labels", "");
    d.test_images = f.text("data.test_images", "");
    d.test_labels = f.text("data.test_labels", "");
    d.limit = f.integer("data.limit", 0);
    d.csv = f.text("data.csv", "");
    d.test_csv = f.text("data.test_csv", "");
    d.label_column = f.text("data.label_column", d.label_column);
    if (const auto* delim = f.raw("data.delimiter")) {
        if (*delim == "tab")
            d.delimiter = '\t';
        else if (delim->size() == 1)
            d.delimiter = delim->front();
        else
            f.problem("data.delimiter", "expected a single character or 'tab'");
    }
    if (const auto* cls = f.raw("data.classes")) {
        for (const auto& item : split_list(*cls)) {
            int v = 0;
            const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
            if (ec != std::errc() || ptr != item.data() + item.size() || v < 0)
                f.problem("data.classes", "'" + item + "' is not a class index");
            else
                d.classes.push_back(v);
        }
    }
    if (d.source == DataSource::Synthetic) {
        check(f, "data", [&] {
            if (d.synthetic.n < 2) throw ConfigError("n must be at least 2");
            if (d.synthetic.dim < 1) throw ConfigError("dim must be at least 1");
            if (!(d.synthetic.noise >= 0.0)) throw ConfigError("noise must be nonnegative");
            if (d.synthetic.kind == SyntheticKind::TwoMoons && d.synthetic.dim < 2)
                throw ConfigError("two-moons needs dim >= 2");
        });
        if (d.test_n < 1) f.problem("data.test_n", "must be positive");
    }
    if (d.source == DataSource::Idx) {
        if (d.images.empty()) f.problem("data.images", "required for idx data");
        if (d.labels.empty()) f.problem("data.labels", "required for idx data");
        if (d.test_images.empty() != d.test_labels.empty())
            f.problem("data.test_images", "test images and labels must be given together");
    }
    if (d.source == DataSource::Csv && d.csv.empty()) f.problem("data.csv", "required for csv data");

    // model
    const std::string model_kind = f.text("model.kind", "logistic");
    if (model_kind == "logistic")
        cfg.model.kind = LossKind::Logistic;
    else if (model_kind == "least-squares")
        cfg.model.kind = LossKind::LeastSquares;
    else if (model_kind == "tiny-mlp")
        cfg.model.kind = LossKind::TinyMlp;
    else if (model_kind == "linear-score")
        cfg.model.kind = LossKind::LinearScore;
    else
        f.problem("model.kind", "expected logistic, least-squares, tiny-mlp or linear-score");
    cfg.model.hidden = f.integer("model.hidden", cfg.model.hidden);
    if (cfg.model.kind == LossKind::TinyMlp && cfg.model.hidden == 0) f.problem("model.hidden", "must be positive");
    cfg.model.lip.tt = f.optional_real("model.lip_tt");
    cfg.model.lip.tz = f.optional_real("model.lip_tz");
    cfg.model.lip.zz = f.optional_real("model.lip_zz");
    cfg.model.lip.zt = f.optional_real("model.lip_zt");
    for (const auto& v : {cfg.model.lip.tt, cfg.model.lip.tz, cfg.model.lip.zz, cfg.model.lip.zt})
        if (v && !(*v >= 0.0)) f.problem("model.lip_*", "Lipschitz constants must be nonnegative");

    // regularizer
    const std::string reg_kind = f.text("reg.kind", "none");
    const double beta = f.real("reg.beta", 0.0);
    if (!(beta >= 0.0)) f.problem("reg.beta", "must be nonnegative");
    if (reg_kind == "none")
        cfg.reg = Regularizer::none();
    else if (reg_kind == "l1")
        cfg.reg = Regularizer::l1(beta);
    else if (reg_kind == "squared-l2")
        cfg.reg = Regularizer::squared_l2(beta);
    else
        f.problem("reg.kind", "expected none, l1 or squared-l2");

    // attack base settings
    AttackConfig& a = cfg.attack;
    a.eps_adv = f.real("attack.eps", a.eps_adv);
    a.steps = f.integer("attack.steps", a.steps);
    a.alpha_atk = f.optional_real("attack.alpha");
    a.clip_lo = f.real("attack.clip_lo", a.clip_lo);
    a.clip_hi = f.real("attack.clip_hi", a.clip_hi);
    a.wrm_gamma = f.real("attack.wrm_gamma", a.wrm_gamma);
    a.wrm_step = f.real("attack.wrm_step", a.wrm_step);
    a.wrm_max_iters = f.integer("attack.wrm_max_iters", a.wrm_max_iters);
    for (AttackKind k : {AttackKind::Fgsm, AttackKind::Ifgsm, AttackKind::Pgd, AttackKind::Wrm}) {
        AttackConfig probe = a;
        probe.kind = k;
        check(f, "attack", [&] { probe.validate(); });
    }

    // trainer
    TrainerConfig& t = cfg.trainer;
    t.seed = cfg.seed;
    t.alpha = f.real("trainer.alpha", t.alpha);
    t.eta = f.real("trainer.eta", t.eta);
    t.batch_size = f.integer("trainer.batch_size", t.batch_size);
    t.iters = f.integer("trainer.iters", t.iters);
    t.stride = f.integer("trainer.stride", t.stride);
    t.wrm_gamma = f.real("trainer.wrm_gamma", t.wrm_gamma);
    const std::string schedule = f.text("trainer.schedule", "constant");
    if (schedule == "constant")
        t.schedule = StepSchedule::Constant;
    else if (schedule == "inv-sqrt")
        t.schedule = StepSchedule::InvSqrt;
    else
        f.problem("trainer.schedule", "expected constant or inv-sqrt");
    if (!(t.alpha > 0.0)) f.problem("trainer.alpha", "must be positive");
    if (!(t.eta > 0.0)) f.problem("trainer.eta", "must be positive");
    if (t.iters == 0) f.problem("trainer.iters", "must be positive");
    if (const auto* algos = f.raw("trainer.algorithms")) cfg.algorithms = split_list(*algos);
    if (cfg.algorithms.empty()) f.problem("trainer.algorithms", "at least one algorithm is required");
    {
        std::set<std::string> unique;
        for (const auto& name : cfg.algorithms) {
            if (!is_known_algorithm(name)) f.problem("trainer.algorithms", "unknown algorithm '" + name + "'");
            if (!unique.insert(name).second) f.problem("trainer.algorithms", "duplicate algorithm '" + name + "'");
        }
    }

    RobustConfig& r = t.robust;
    r.rho = f.real("robust.rho", r.rho);
    r.gamma0 = f.real("robust.gamma0", r.gamma0);
    r.oracle_eps = f.real("robust.oracle_eps", r.oracle_eps);
    r.oracle_step = f.real("robust.oracle_step", r.oracle_step);
    r.oracle_max_iters = f.integer("robust.oracle_max_iters", r.oracle_max_iters);
    r.lambda_proxy = f.optional_real("robust.lambda_proxy");

    const double p = f.real("cost.p", 2.0);
    const double d0 = f.real("cost.d0", 100.0);
    check(f, "cost", [&] {
        if (!(d0 > 0.0)) throw ConfigError("d0 must be positive");
        t.cost = TransportCost::squared_lp(p, d0);
    });

    check(f, "trainer", [&] {
        // Step sizes are reported above under their own keys.
        TrainerConfig probe = t;
        probe.alpha = probe.eta = 1.0;
        probe.algorithm = Algorithm::Wrm;
        probe.validate(std::numeric_limits<std::size_t>::max());
    });
    if (d.source == DataSource::Synthetic) {
        const bool centralized = std::any_of(cfg.algorithms.begin(), cfg.algorithms.end(),
                                             [](const std::string& n) { return n != "drfl" && n != "fedavg"; });
        if (centralized && t.batch_size > d.synthetic.n)
            f.problem("trainer.batch_size", "exceeds the dataset size " + std::to_string(d.synthetic.n));
    }

    // federated
    cfg.federated.workers = f.integer("federated.workers", cfg.federated.workers);
    cfg.federated.local_epochs = f.integer("federated.local_epochs", cfg.federated.local_epochs);
    const std::string scheme = f.text("federated.partition", "iid");
    if (scheme == "iid")
        cfg.federated.scheme = PartitionScheme::Iid;
    else if (scheme == "one-class")
        cfg.federated.scheme = PartitionScheme::OneClassPerWorker;
    else
        f.problem("federated.partition", "expected iid or one-class");
    if (cfg.federated.workers == 0) f.problem("federated.workers", "must be positive");
    if (cfg.federated.local_epochs == 0) f.problem("federated.local_epochs", "must be positive");

    // evaluation
    if (const auto* attacks = f.raw("eval.attacks")) {
        for (const auto& item : split_list(*attacks)) {
            check(f, "eval.attacks", [&] { cfg.eval.attacks.push_back(parse_attack_kind(item)); });
        }
    }
    cfg.eval.eps = f.reals("eval.eps", {a.eps_adv});
    for (double e : cfg.eval.eps)
        if (!(e >= 0.0)) f.problem("eval.eps", "budgets must be nonnegative");
    if (!cfg.eval.attacks.empty() && cfg.eval.eps.empty()) f.problem("eval.eps", "at least one budget is required");

    // Classifier-only features.
    const bool classifier = cfg.model.kind == LossKind::Logistic || cfg.model.kind == LossKind::TinyMlp;
    if (!classifier) {
        if (!cfg.eval.attacks.empty()) f.problem("eval.attacks", "attack evaluation needs a classification model");
        for (const auto& name : cfg.algorithms)
            if (name.starts_with("adv-")) f.problem("trainer.algorithms", name + " needs a classification model");
        if (d.source == DataSource::Synthetic && d.synthetic.kind != SyntheticKind::LinearRegression)
            f.problem("model.kind", "classification data needs a classification model");
    } else if (d.source == DataSource::Synthetic && d.synthetic.kind == SyntheticKind::LinearRegression) {
        f.problem("model.kind", "regression data needs least-squares or linear-score");
    }
    f.finish();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config '" + path + "'");
    return parse_config({std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()});
}

TrainerConfig trainer_for(const ExperimentConfig& cfg, const std::string& algorithm) {
    TrainerConfig t = cfg.trainer;
    t.attack = cfg.attack;
    if (algorithm == "erm" || algorithm == "fedavg")
        t.algorithm = Algorithm::Erm;
    else if (algorithm == "spgd")
        t.algorithm = Algorithm::Spgd;
    else if (algorithm == "spgda" || algorithm == "drfl")
        t.algorithm = Algorithm::Spgda;
    else if (algorithm == "wrm")
        t.algorithm = Algorithm::Wrm;
    else if (algorithm.starts_with("adv-")) {
        t.algorithm = Algorithm::AdvTrain;
        t.attack.kind = parse_attack_kind(algorithm.substr(4));
    } else {
        throw ConfigError("unknown algorithm '" + algorithm + "'");
    }
    return t;
}

}  // namespace wassrobust
