#include "wassrobust/robust.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "wassrobust/error.hpp"

namespace wassrobust {

void RobustConfig::validate() const {
    if (!(rho >= 0.0) || !std::isfinite(rho)) throw ConfigError("rho must be finite and nonnegative");
    if (!std::isfinite(gamma0)) throw ConfigError("gamma0 must be finite");
    if (!(oracle_eps > 0.0)) throw ConfigError("oracle_eps must be positive");
    if (!(oracle_step > 0.0)) throw ConfigError("oracle_step must be positive");
    if (oracle_max_iters == 0) throw ConfigError("oracle_max_iters must be positive");
    if (lambda_proxy && !(*lambda_proxy > 0.0)) throw ConfigError("lambda_proxy must be positive");
}

double psi(const LossModel& model, const ModelParams& params, std::span<const double> zeta, const Datum& z, double rho,
           const TransportCost& c) {
    return loss(model, params.theta, zeta, z.y) + params.gamma * (rho - c(z.x, zeta));
}

Vec psi_grad_zeta(const LossModel& model, const ModelParams& params, std::span<const double> zeta, const Datum& z,
                  const TransportCost& c) {
    Vec g = grad_features(model, params.theta, zeta, z.y);
    axpy(-params.gamma, c.grad_zeta(z.x, zeta), g);
    return g;
}

Vec psi_grad_params(const LossModel& model, const ModelParams& params, std::span<const double> zeta, const Datum& z,
                    double rho, const TransportCost& c) {
    Vec g = grad_theta(model, params.theta, zeta, z.y);
    g.push_back(rho - c(z.x, zeta));
    return g;
}

std::optional<double> concavity_modulus(const LossModel& model, const ModelParams& params, const TransportCost& c,
                                        const std::optional<double>& lambda_proxy) {
    if (const auto lzz = feature_curvature(model, params.theta)) return c.mu() * params.gamma - *lzz;
    return lambda_proxy;
}

OracleResult penalized_ascent(const LossModel& model, const ModelParams& params, const Datum& z, double rho,
                              const TransportCost& c, const AscentOptions& opts) {
    check_dims(model, params.theta, z.x);
    if (!std::isfinite(params.gamma)) throw ConfigError("gamma must be finite");
    const auto lzz = feature_curvature(model, params.theta);
    if (opts.strict) {
        if (c.mu() <= 0.0) throw ConfigError("transport cost is not strongly convex; inner problem is not concave");
        if (lzz && params.gamma < opts.gamma0)
            throw ConfigError("gamma " + std::to_string(params.gamma) + " is below gamma0 " + std::to_string(opts.gamma0));
    }
    double lambda = 0.0;
    if (lzz) {
        lambda = c.mu() * params.gamma - *lzz;
        if (opts.strict && !(lambda > 0.0))
            throw ConfigError("inner problem is not strongly concave (mu*gamma - L_zz = " + std::to_string(lambda) + ")");
    } else if (opts.lambda_proxy) {
        lambda = *opts.lambda_proxy;
    } else {
        lambda = c.mu() * std::max(params.gamma, opts.gamma0);
    }

    double step = opts.step;
    if (const auto sc = c.smoothness(); sc && lzz) {
        const double curvature = *sc * params.gamma + *lzz;
        if (curvature > 0.0) step = std::min(step, 1.0 / curvature);
    }

    const double threshold = 2.0 * std::max(lambda, 0.0) * opts.eps;
    const double guard = 10.0 * c.d0();
    OracleResult r{z.x, 0.0, 0, false};
    for (;;) {
        const Vec g = psi_grad_zeta(model, params, r.zeta, z, c);
        if (norm2_squared(g) <= threshold) {
            r.converged = true;
            break;
        }
        if (r.iters == opts.max_iters) break;
        axpy(step, g, r.zeta);
        ++r.iters;
        if (!(norm2(sub(r.zeta, z.x)) <= guard))
            throw InstabilityError("inner ascent left the domain radius after " + std::to_string(r.iters) + " steps");
    }
    r.psi_value = psi(model, params, r.zeta, z, rho, c);
    return r;
}

OracleResult inner_max_oracle(const LossModel& model, const ModelParams& params, const Datum& z,
                              const RobustConfig& cfg, const TransportCost& c) {
    cfg.validate();
    AscentOptions opts{cfg.oracle_step, cfg.oracle_eps, cfg.oracle_max_iters, cfg.lambda_proxy, true, cfg.gamma0};
    return penalized_ascent(model, params, z, cfg.rho, c, opts);
}

namespace {

// Loss and cost tables for exact enumeration, so gamma sweeps are cheap.
struct ExactTables {
    std::size_t n = 0, g = 0;
    Vec loss, cost;

    ExactTables(const LossModel& model, std::span<const double> theta, std::span<const Datum> samples,
                std::span<const Vec> grid, const TransportCost& c)
        : n(samples.size()), g(grid.size()), loss(n * g), cost(n * g) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < g; ++j) {
                loss[i * g + j] = wassrobust::loss(model, theta, grid[j], samples[i].y);
                cost[i * g + j] = c(samples[i].x, grid[j]);
            }
    }

    double dual(double gamma, double rho) const {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = -std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < g; ++j)
                best = std::max(best, loss[i * g + j] + gamma * (rho - cost[i * g + j]));
            total += best;
        }
        return total / static_cast<double>(n);
    }
};

double oracle_dual(const LossModel& model, std::span<const double> theta, double gamma, std::span<const Datum> samples,
                   double rho, const TransportCost& c, const RobustConfig& cfg) {
    RobustConfig local = cfg;
    local.rho = rho;
    const ModelParams params{Vec(theta.begin(), theta.end()), gamma};
    double total = 0.0;
    for (const Datum& z : samples) total += inner_max_oracle(model, params, z, local, c).psi_value;
    return total / static_cast<double>(samples.size());
}

}  // namespace

double dual_objective(const LossModel& model, std::span<const double> theta, double gamma, std::span<const Datum> samples,
                      double rho, const TransportCost& c, const InnerSolver& inner) {
    if (samples.empty()) throw ConfigError("dual objective needs at least one sample");
    if (const auto* exact = std::get_if<ExactInner>(&inner)) {
        if (exact->grid.empty()) throw ConfigError("exact inner solver needs a nonempty candidate set");
        return ExactTables(model, theta, samples, exact->grid, c).dual(gamma, rho);
    }
    return oracle_dual(model, theta, gamma, samples, rho, c, std::get<RobustConfig>(inner));
}

DualMinimum minimize_dual(const LossModel& model, std::span<const double> theta, std::span<const Datum> samples,
                          double rho, const TransportCost& c, const InnerSolver& inner, const GammaSearch& search) {
    if (samples.empty()) throw ConfigError("dual objective needs at least one sample");
    if (!(search.gamma_hi > search.gamma_lo) || !(search.resolution > 0.0))
        throw ConfigError("gamma search needs gamma_hi > gamma_lo and a positive resolution");

    std::optional<ExactTables> tables;
    if (const auto* exact = std::get_if<ExactInner>(&inner)) {
        if (exact->grid.empty()) throw ConfigError("exact inner solver needs a nonempty candidate set");
        tables.emplace(model, theta, samples, exact->grid, c);
    }
    auto eval = [&](double gamma) {
        if (tables) return tables->dual(gamma, rho);
        return oracle_dual(model, theta, gamma, samples, rho, c, std::get<RobustConfig>(inner));
    };

    const double span = search.gamma_hi - search.gamma_lo;
    const auto steps = static_cast<std::size_t>(std::ceil(1.0 / search.resolution));
    const double h = span / static_cast<double>(steps);
    DualMinimum best{search.gamma_lo, eval(search.gamma_lo)};
    std::size_t best_k = 0;
    for (std::size_t k = 1; k <= steps; ++k) {
        const double gamma = k == steps ? search.gamma_hi : search.gamma_lo + h * static_cast<double>(k);
        const double v = eval(gamma);
        if (v < best.value) {
            best = {gamma, v};
            best_k = k;
        }
    }

    double lo = search.gamma_lo + h * static_cast<double>(best_k == 0 ? 0 : best_k - 1);
    double hi = std::min(search.gamma_hi, search.gamma_lo + h * static_cast<double>(best_k + 1));
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
    double f1 = eval(x1), f2 = eval(x2);
    for (int it = 0; it < 200 && hi - lo > 1e-13 * (1.0 + std::abs(hi)); ++it) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = eval(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = eval(x2);
        }
    }
    for (const auto& cand : {DualMinimum{x1, f1}, DualMinimum{x2, f2}}) {
        if (cand.value < best.value || (cand.value == best.value && cand.gamma < best.gamma)) best = cand;
    }
    return best;
}

Vec danskin_gradient(const LossModel& model, const ModelParams& params, const Datum& z, const RobustConfig& cfg,
                     const TransportCost& c) {
    const OracleResult r = inner_max_oracle(model, params, z, cfg, c);
    return psi_grad_params(model, params, r.zeta, z, cfg.rho, c);
}

double robust_objective(const LossModel& model, const ModelParams& params, const Regularizer& reg,
                        std::span<const Datum> data, const RobustConfig& cfg, const TransportCost& c) {
    if (data.empty()) throw ConfigError("robust objective needs at least one sample");
    double total = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i)
        total += with_context(sample_context(i), [&] { return inner_max_oracle(model, params, data[i], cfg, c); }).psi_value;
    return total / static_cast<double>(data.size()) + reg_value(reg, params.theta);
}

Vec robust_gradient(const LossModel& model, const ModelParams& params, std::span<const Datum> data,
                    const RobustConfig& cfg, const TransportCost& c) {
    if (data.empty()) throw ConfigError("robust gradient needs at least one sample");
    Vec g(params.dim() + 1, 0.0);
    for (std::size_t i = 0; i < data.size(); ++i)
        axpy(1.0, with_context(sample_context(i), [&] { return danskin_gradient(model, params, data[i], cfg, c); }), g);
    for (double& v : g) v /= static_cast<double>(data.size());
    return g;
}

double theta_subgradient_distance(const Regularizer& reg, std::span<const double> theta, std::span<const double> grad) {
    double sq = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        double e = grad[i];
        switch (reg.kind) {
            case RegKind::L1:
                e = theta[i] != 0.0 ? grad[i] + reg.beta * sign(theta[i]) : std::max(std::abs(grad[i]) - reg.beta, 0.0);
                break;
            case RegKind::SquaredL2: e = grad[i] + 2.0 * reg.beta * theta[i]; break;
            case RegKind::None:
            case RegKind::GammaIndicator: break;
        }
        sq += e * e;
    }
    return std::sqrt(sq);
}

double stationarity_distance(const LossModel& model, const ModelParams& params, const Regularizer& reg,
                             std::span<const Datum> data, const RobustConfig& cfg, const TransportCost& c) {
    const Vec g = robust_gradient(model, params, data, cfg, c);
    const double theta_part = theta_subgradient_distance(reg, params.theta, std::span(g).first(params.dim()));
    const double g_gamma = g.back();
    // Normal cone of [gamma0, inf) at gamma0 is (-inf, 0].
    const double gamma_part = params.gamma > cfg.gamma0 ? std::abs(g_gamma) : std::max(-g_gamma, 0.0);
    return std::sqrt(theta_part * theta_part + gamma_part * gamma_part);
}

}  // namespace wassrobust
