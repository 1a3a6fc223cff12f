#include "wassrobust/attacks.hpp"

#include <algorithm>
#include <cmath>

#include "wassrobust/error.hpp"
#include "wassrobust/parallel.hpp"
#include "wassrobust/robust.hpp"

namespace wassrobust {

std::string_view to_string(AttackKind k) {
    switch (k) {
        case AttackKind::Fgsm: return "fgsm";
        case AttackKind::Ifgsm: return "ifgsm";
        case AttackKind::Pgd: return "pgd";
        case AttackKind::Wrm: return "wrm";
    }
    return "?";
}

AttackKind parse_attack_kind(std::string_view s) {
    if (s == "fgsm") return AttackKind::Fgsm;
    if (s == "ifgsm") return AttackKind::Ifgsm;
    if (s == "pgd") return AttackKind::Pgd;
    if (s == "wrm") return AttackKind::Wrm;
    throw ConfigError("unknown attack kind '" + std::string(s) + "'");
}

void AttackConfig::validate() const {
    if (!(eps_adv >= 0.0) || !std::isfinite(eps_adv)) throw ConfigError("eps_adv must be finite and nonnegative");
    if (!(clip_lo < clip_hi)) throw ConfigError("clip_lo must be below clip_hi");
    if ((kind == AttackKind::Ifgsm || kind == AttackKind::Pgd) && steps < 1)
        throw ConfigError("iterative attacks need at least one step");
    if (kind == AttackKind::Pgd && !(pgd_step() >= 0.0)) throw ConfigError("PGD step must be nonnegative");
    if (kind == AttackKind::Wrm) {
        if (!(wrm_gamma > 0.0)) throw ConfigError("wrm_gamma must be positive");
        if (!(wrm_step > 0.0) || !(wrm_eps > 0.0)) throw ConfigError("wrm_step and wrm_eps must be positive");
    }
}

double project_to_box(double v, double center, double eps, double lo, double hi) {
    const double a = std::max(center - eps, lo);
    const double b = std::min(center + eps, hi);
    double r = a <= b ? std::clamp(v, a, b) : std::clamp(center, lo, hi);
    while (r - center > eps) r = std::nextafter(r, center);
    while (center - r > eps) r = std::nextafter(r, center);
    return r;
}

namespace {

Vec sign_steps(const LossModel& model, const ModelParams& params, const Datum& z, const AttackConfig& cfg,
               std::size_t steps, double step) {
    Vec adv = z.x;
    for (std::size_t t = 0; t < steps; ++t) {
        const Vec g = grad_features(model, params.theta, adv, z.y);
        for (std::size_t i = 0; i < adv.size(); ++i)
            adv[i] = project_to_box(adv[i] + step * sign(g[i]), z.x[i], cfg.eps_adv, cfg.clip_lo, cfg.clip_hi);
    }
    return adv;
}

}  // namespace

Vec fgsm(const LossModel& model, const ModelParams& params, const Datum& z, const AttackConfig& cfg) {
    cfg.validate();
    return sign_steps(model, params, z, cfg, 1, cfg.eps_adv);
}

Vec ifgsm(const LossModel& model, const ModelParams& params, const Datum& z, const AttackConfig& cfg) {
    cfg.validate();
    return sign_steps(model, params, z, cfg, cfg.steps, cfg.eps_adv / static_cast<double>(cfg.steps));
}

Vec pgd(const LossModel& model, const ModelParams& params, const Datum& z, const AttackConfig& cfg) {
    cfg.validate();
    return sign_steps(model, params, z, cfg, cfg.steps, cfg.pgd_step());
}

Vec wrm_attack(const LossModel& model, const ModelParams& params, const Datum& z, const AttackConfig& cfg,
               const TransportCost& c) {
    cfg.validate();
    const ModelParams penalized{params.theta, cfg.wrm_gamma};
    AscentOptions opts{cfg.wrm_step, cfg.wrm_eps, cfg.wrm_max_iters, std::nullopt, false, 0.0};
    return penalized_ascent(model, penalized, z, 0.0, c, opts).zeta;
}

Vec attack(const LossModel& model, const ModelParams& params, const Datum& z, const AttackConfig& cfg,
           const TransportCost& c) {
    switch (cfg.kind) {
        case AttackKind::Fgsm: return fgsm(model, params, z, cfg);
        case AttackKind::Ifgsm: return ifgsm(model, params, z, cfg);
        case AttackKind::Pgd: return pgd(model, params, z, cfg);
        case AttackKind::Wrm: return wrm_attack(model, params, z, cfg, c);
    }
    return z.x;
}

double clean_error(const LossModel& model, const ModelParams& params, std::span<const Datum> test) {
    if (!model.is_classifier()) throw ConfigError("error rates need a classification model");
    if (test.empty()) throw ConfigError("test set is empty");
    std::size_t wrong = 0;
    for (const Datum& z : test) wrong += predict(model, params.theta, z.x) != static_cast<int>(z.y);
    return static_cast<double>(wrong) / static_cast<double>(test.size());
}

double evaluate_under_attack(const LossModel& model, const ModelParams& params, std::span<const Datum> test,
                             const AttackConfig& cfg, const TransportCost& c) {
    if (!model.is_classifier()) throw ConfigError("error rates need a classification model");
    if (test.empty()) throw ConfigError("test set is empty");
    cfg.validate();
    std::vector<char> wrong(test.size(), 0);
    parallel_for(test.size(), [&](std::size_t i) {
        const Datum& z = test[i];
        const Vec adv = attack(model, params, z, cfg, c);
        wrong[i] = predict(model, params.theta, adv) != static_cast<int>(z.y);
    });
    std::size_t count = 0;
    for (char w : wrong) count += static_cast<std::size_t>(w);
    return static_cast<double>(count) / static_cast<double>(test.size());
}

}  // namespace wassrobust
