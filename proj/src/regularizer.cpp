#include "wassrobust/regularizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wassrobust/error.hpp"

namespace wassrobust {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double soft_threshold(double v, double t) {
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return 0.0;
}

}  // namespace

double reg_value(const Regularizer& reg, std::span<const double> v) {
    switch (reg.kind) {
        case RegKind::None: return 0.0;
        case RegKind::L1: return reg.beta * norm1(v);
        case RegKind::SquaredL2: return reg.beta * norm2_squared(v);
        case RegKind::GammaIndicator:
            return std::all_of(v.begin(), v.end(), [&](double x) { return x >= reg.gamma0; }) ? 0.0 : kInf;
    }
    return 0.0;
}

double reg_value(const Regularizer& reg, const ModelParams& params) {
    if (reg.kind == RegKind::GammaIndicator) return params.gamma >= reg.gamma0 ? 0.0 : kInf;
    return reg_value(reg, params.theta);
}

Vec prox(const Regularizer& reg, double alpha, std::span<const double> v) {
    if (!(alpha > 0.0)) throw ConfigError("prox step must be positive");
    if (!(reg.beta >= 0.0)) throw ConfigError("regularization weight must be nonnegative");
    Vec u(v.begin(), v.end());
    switch (reg.kind) {
        case RegKind::None: break;
        case RegKind::L1:
            for (double& x : u) x = soft_threshold(x, alpha * reg.beta);
            break;
        case RegKind::SquaredL2:
            for (double& x : u) x /= 1.0 + 2.0 * alpha * reg.beta;
            break;
        case RegKind::GammaIndicator:
            for (double& x : u) x = std::max(x, reg.gamma0);
            break;
    }
    return u;
}

ModelParams prox(const Regularizer& reg, double alpha, const ModelParams& params) {
    if (reg.kind == RegKind::GammaIndicator) {
        if (!(alpha > 0.0)) throw ConfigError("prox step must be positive");
        return {params.theta, std::max(params.gamma, reg.gamma0)};
    }
    return {prox(reg, alpha, params.theta), params.gamma};
}

double AugmentedRegularizer::value(const ModelParams& p) const {
    return reg_value(theta_reg, p) + reg_value(Regularizer::gamma_indicator(gamma0), p);
}

ModelParams AugmentedRegularizer::prox(double alpha, const ModelParams& p) const {
    return wassrobust::prox(Regularizer::gamma_indicator(gamma0), alpha, wassrobust::prox(theta_reg, alpha, p));
}

}  // namespace wassrobust
