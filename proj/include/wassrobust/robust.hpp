#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "wassrobust/model.hpp"
#include "wassrobust/regularizer.hpp"
#include "wassrobust/transport.hpp"
#include "wassrobust/vec.hpp"

namespace wassrobust {

/// Ball radius, dual-variable floor and inner-oracle settings.
struct RobustConfig {
    double rho = 25.0;
    double gamma0 = 1.0;
    double oracle_eps = 1e-6;
    double oracle_step = 0.02;
    std::size_t oracle_max_iters = 1000;
    /// Strong-concavity modulus to assume when the loss curvature is unknown.
    std::optional<double> lambda_proxy;

    void validate() const;
};

/// psi = l(theta; (zeta, y)) + gamma * (rho - c(x, zeta)).
double psi(const LossModel& model, const ModelParams& params, std::span<const double> zeta, const Datum& z, double rho,
           const TransportCost& c);
/// Gradient of psi in zeta.
Vec psi_grad_zeta(const LossModel& model, const ModelParams& params, std::span<const double> zeta, const Datum& z,
                  const TransportCost& c);
/// Gradient of psi in (theta, gamma), flattened with gamma last.
Vec psi_grad_params(const LossModel& model, const ModelParams& params, std::span<const double> zeta, const Datum& z,
                    double rho, const TransportCost& c);

/// Strong-concavity modulus of zeta -> psi: mu * gamma - L_zz, or the proxy when L_zz is unknown.
std::optional<double> concavity_modulus(const LossModel& model, const ModelParams& params, const TransportCost& c,
                                        const std::optional<double>& lambda_proxy);

struct OracleResult {
    Vec zeta;
    double psi_value = 0.0;
    std::size_t iters = 0;
    bool converged = false;
};

struct AscentOptions {
    double step = 0.02;
    double eps = 1e-6;
    std::size_t max_iters = 1000;
    std::optional<double> lambda_proxy;
    /// Reject configurations that are not certifiably strongly concave.
    bool strict = true;
    double gamma0 = 0.0;
};

/// Gradient ascent on zeta -> psi from zeta = x.
///
/// Stops once ||grad||^2 <= 2 * lambda * eps, which certifies
/// psi(zeta*) - psi(zeta) <= eps under lambda-strong concavity. The step is
/// capped at 1 / (smoothness(c) * gamma + L_zz) when both are known. Throws
/// InstabilityError if the iterate leaves the ball of radius 10 * d0 around x.
OracleResult penalized_ascent(const LossModel& model, const ModelParams& params, const Datum& z, double rho,
                              const TransportCost& c, const AscentOptions& opts);

/// The epsilon-accurate inner maximization oracle.
OracleResult inner_max_oracle(const LossModel& model, const ModelParams& params, const Datum& z,
                              const RobustConfig& cfg, const TransportCost& c);

/// Verification mode: the supremum is exact enumeration over a finite candidate set.
struct ExactInner {
    std::span<const Vec> grid;
};
using InnerSolver = std::variant<ExactInner, RobustConfig>;

/// (1/N) sum_n sup_zeta psi(theta, gamma, zeta; z_n).
double dual_objective(const LossModel& model, std::span<const double> theta, double gamma, std::span<const Datum> samples,
                      double rho, const TransportCost& c, const InnerSolver& inner);

struct GammaSearch {
    double gamma_lo = 0.0;
    double gamma_hi = 1e4;
    /// Coarse-grid spacing as a fraction of (gamma_hi - gamma_lo).
    double resolution = 1e-4;
};

struct DualMinimum {
    double gamma = 0.0;
    double value = 0.0;
};

/// inf over gamma in [gamma_lo, gamma_hi] of the dual objective: a coarse grid
/// scan (ties to the smaller gamma) refined by golden-section search.
DualMinimum minimize_dual(const LossModel& model, std::span<const double> theta, std::span<const Datum> samples,
                          double rho, const TransportCost& c, const InnerSolver& inner, const GammaSearch& search = {});

/// Gradient of sup_zeta psi in (theta, gamma) at the oracle's maximizer:
/// (grad_theta l(theta; zeta_eps), rho - c(x, zeta_eps)).
Vec danskin_gradient(const LossModel& model, const ModelParams& params, const Datum& z, const RobustConfig& cfg,
                     const TransportCost& c);

/// Full-batch robust surrogate F = mean sup psi + r(theta).
double robust_objective(const LossModel& model, const ModelParams& params, const Regularizer& reg,
                        std::span<const Datum> data, const RobustConfig& cfg, const TransportCost& c);

/// Full-batch gradient of f (mean Danskin gradient), gamma last.
Vec robust_gradient(const LossModel& model, const ModelParams& params, std::span<const Datum> data,
                    const RobustConfig& cfg, const TransportCost& c);

/// Norm of the minimum-norm element of grad + d r(theta) over the theta block.
double theta_subgradient_distance(const Regularizer& reg, std::span<const double> theta, std::span<const double> grad);

/// dist(0, grad f + d r(theta) + N_Gamma(gamma)) at full batch.
double stationarity_distance(const LossModel& model, const ModelParams& params, const Regularizer& reg,
                             std::span<const Datum> data, const RobustConfig& cfg, const TransportCost& c);

}  // namespace wassrobust
