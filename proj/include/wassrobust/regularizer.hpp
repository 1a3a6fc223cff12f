#pragma once

#include <span>

#include "wassrobust/model.hpp"
#include "wassrobust/vec.hpp"

namespace wassrobust {

enum class RegKind { None, L1, SquaredL2, GammaIndicator };

/// Convex regularizer with a closed-form proximal operator.
///
/// The weight-space kinds (l1, squared-l2) act on theta. The gamma indicator
/// is 0 on {gamma >= gamma0} and +inf elsewhere; it acts on the dual variable.
struct Regularizer {
    RegKind kind = RegKind::None;
    double beta = 0.0;
    double gamma0 = 0.0;

    static Regularizer none() { return {}; }
    static Regularizer l1(double beta) { return {RegKind::L1, beta, 0.0}; }
    static Regularizer squared_l2(double beta) { return {RegKind::SquaredL2, beta, 0.0}; }
    static Regularizer gamma_indicator(double gamma0) { return {RegKind::GammaIndicator, 0.0, gamma0}; }
};

/// r applied coordinatewise to a plain vector (the indicator becomes that of [gamma0, inf)^n).
double reg_value(const Regularizer& reg, std::span<const double> v);
/// r(theta) for weight kinds, h(gamma) for the indicator.
double reg_value(const Regularizer& reg, const ModelParams& params);

/// argmin_u alpha * r(u) + 0.5 * ||u - v||^2.
Vec prox(const Regularizer& reg, double alpha, std::span<const double> v);
ModelParams prox(const Regularizer& reg, double alpha, const ModelParams& params);

/// r(theta) + h(gamma): the regularizer of the augmented parameter.
struct AugmentedRegularizer {
    Regularizer theta_reg;
    double gamma0 = 0.0;

    double value(const ModelParams& p) const;
    ModelParams prox(double alpha, const ModelParams& p) const;
};

}  // namespace wassrobust
