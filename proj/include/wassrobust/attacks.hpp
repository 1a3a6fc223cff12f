#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "wassrobust/model.hpp"
#include "wassrobust/transport.hpp"
#include "wassrobust/vec.hpp"

namespace wassrobust {

enum class AttackKind { Fgsm, Ifgsm, Pgd, Wrm };

std::string_view to_string(AttackKind k);
AttackKind parse_attack_kind(std::string_view s);

struct AttackConfig {
    AttackKind kind = AttackKind::Fgsm;
    double eps_adv = 0.1;
    std::size_t steps = 10;
    /// PGD step; defaults to eps_adv / 4 when unset.
    std::optional<double> alpha_atk;
    double clip_lo = -1.0;
    double clip_hi = 1.0;

    double wrm_gamma = 1.0;
    double wrm_step = 0.1;
    double wrm_eps = 1e-12;
    std::size_t wrm_max_iters = 2000;

    double pgd_step() const { return alpha_atk.value_or(eps_adv / 4.0); }
    void validate() const;
};

/// Clamp v into [center - eps, center + eps] intersected with [lo, hi], such
/// that |result - center| <= eps holds in floating point.
double project_to_box(double v, double center, double eps, double lo, double hi);

Vec fgsm(const LossModel& model, const ModelParams& params, const Datum& z, const AttackConfig& cfg);
/// steps sign steps of size eps_adv / steps, each projected onto the eps box and clip range.
Vec ifgsm(const LossModel& model, const ModelParams& params, const Datum& z, const AttackConfig& cfg);
/// steps sign steps of size alpha_atk, each projected onto the eps box and clip range.
Vec pgd(const LossModel& model, const ModelParams& params, const Datum& z, const AttackConfig& cfg);
/// Ascent to the maximizer of l(theta; zeta) - wrm_gamma * c(x, zeta).
Vec wrm_attack(const LossModel& model, const ModelParams& params, const Datum& z, const AttackConfig& cfg,
               const TransportCost& c);

/// Dispatch on cfg.kind.
Vec attack(const LossModel& model, const ModelParams& params, const Datum& z, const AttackConfig& cfg,
           const TransportCost& c);

double clean_error(const LossModel& model, const ModelParams& params, std::span<const Datum> test);
/// Fraction of attacked test points that are misclassified.
double evaluate_under_attack(const LossModel& model, const ModelParams& params, std::span<const Datum> test,
                             const AttackConfig& cfg, const TransportCost& c = TransportCost::squared_l2());

}  // namespace wassrobust
