#include "wassrobust/transport.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "wassrobust/error.hpp"

namespace wassrobust {

TransportCost TransportCost::squared_l2(double d0) {
    if (!(d0 > 0.0)) throw ConfigError("domain radius d0 must be positive");
    return {CostKind::SquaredL2, 2.0, d0};
}

TransportCost TransportCost::squared_lp(double p, double d0) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw ConfigError("squared-lp cost needs a finite p >= 1");
    if (!(d0 > 0.0)) throw ConfigError("domain radius d0 must be positive");
    return {p == 2.0 ? CostKind::SquaredL2 : CostKind::SquaredLp, p, d0};
}

double TransportCost::operator()(std::span<const double> z, std::span<const double> zeta) const {
    const Vec v = sub(zeta, z);
    if (kind_ == CostKind::SquaredL2) return norm2_squared(v);
    const double n = normp(v, p_);
    return n * n;
}

Vec TransportCost::grad_zeta(std::span<const double> z, std::span<const double> zeta) const {
    Vec v = sub(zeta, z);
    if (kind_ == CostKind::SquaredL2) {
        for (double& x : v) x *= 2.0;
        return v;
    }
    const double n = normp(v, p_);
    if (n == 0.0) return Vec(v.size(), 0.0);
    const double scale = 2.0 * std::pow(n, 2.0 - p_);
    for (double& x : v) x = scale * std::pow(std::abs(x), p_ - 1.0) * sign(x);
    return v;
}

double TransportCost::mu() const {
    if (p_ > 1.0 && p_ <= 2.0) return 2.0 * (p_ - 1.0);
    return 0.0;
}

double TransportCost::lipschitz(std::size_t dim) const {
    // ||grad c||_2 <= 2 ||v||_p * k and ||v||_p <= k ||v||_2, k = max(1, n^(1/p - 1/2)).
    const double k = std::max(1.0, std::pow(static_cast<double>(dim), 1.0 / p_ - 0.5));
    return 2.0 * d0_ * k * k;
}

std::optional<double> TransportCost::smoothness() const {
    if (kind_ == CostKind::SquaredL2) return 2.0;
    return std::nullopt;
}

DiscreteDistribution DiscreteDistribution::uniform(std::vector<Datum> atoms) {
    const std::size_t n = atoms.size();
    if (n == 0) throw ValidationError("distribution needs at least one atom");
    return {std::move(atoms), Vec(n, 1.0 / static_cast<double>(n))};
}

void DiscreteDistribution::validate() const {
    if (atoms.empty()) throw ValidationError("distribution has no atoms");
    if (atoms.size() != weights.size()) throw ValidationError("atom and weight counts differ");
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw ValidationError("weights must be finite and nonnegative");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) throw ValidationError("weights sum to " + std::to_string(total) + ", not 1");
    const std::size_t d = atoms.front().x.size();
    for (const auto& a : atoms)
        if (a.x.size() != d) throw ValidationError("atoms have inconsistent dimensions");
}

bool Coupling::has_marginals(const Vec& p, const Vec& q, double tol) const {
    if (plan.rows != p.size() || plan.cols != q.size()) return false;
    for (std::size_t i = 0; i < plan.rows; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < plan.cols; ++j) {
            if (plan(i, j) < -tol) return false;
            s += plan(i, j);
        }
        if (std::abs(s - p[i]) > tol) return false;
    }
    for (std::size_t j = 0; j < plan.cols; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < plan.rows; ++i) s += plan(i, j);
        if (std::abs(s - q[j]) > tol) return false;
    }
    return true;
}

TransportSolution optimal_transport(const DiscreteDistribution& p, const DiscreteDistribution& q, const TransportCost& c) {
    p.validate();
    q.validate();
    const std::size_t n = p.size(), m = q.size();
    if (n > kMaxOracleAtoms || m > kMaxOracleAtoms)
        throw ConfigError("exact transport is limited to " + std::to_string(kMaxOracleAtoms) + " atoms per side");
    if (p.atoms.front().x.size() != q.atoms.front().x.size())
        throw ValidationError("distributions live in different dimensions");

    DenseMatrix a(n + m, n * m);
    Vec b(n + m), costs(n * m);
    for (std::size_t i = 0; i < n; ++i) {
        b[i] = p.weights[i];
        for (std::size_t j = 0; j < m; ++j) {
            a(i, i * m + j) = 1.0;
            a(n + j, i * m + j) = 1.0;
            costs[i * m + j] = c(p.atoms[i].x, q.atoms[j].x);
        }
    }
    for (std::size_t j = 0; j < m; ++j) b[n + j] = q.weights[j];

    const LpSolution s = solve_lp(a, b, costs);
    if (s.status != LpStatus::Optimal) throw InternalError("transport LP did not reach an optimum");
    TransportSolution out{s.value, Coupling{DenseMatrix(n, m)}};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) out.coupling.plan(i, j) = s.x[i * m + j];
    return out;
}

double wasserstein(const DiscreteDistribution& p, const DiscreteDistribution& q, const TransportCost& c) {
    return optimal_transport(p, q, c).value;
}

WorstCase worst_case_primal(const LossModel& model, const ModelParams& params, const DiscreteDistribution& p0,
                            std::span<const Vec> z_grid, double rho, const TransportCost& c) {
    p0.validate();
    if (!(rho >= 0.0)) throw ConfigError("rho must be nonnegative");
    const std::size_t n = p0.size(), g = z_grid.size();
    if (g == 0) throw ConfigError("candidate support is empty");
    if (n * g > kMaxPrimalVariables)
        throw ConfigError("primal oracle is limited to " + std::to_string(kMaxPrimalVariables) + " coupling entries");

    // Variables: pi_ij (row-major) then one budget slack.
    const std::size_t vars = n * g + 1;
    DenseMatrix a(n + 1, vars);
    Vec b(n + 1), obj(vars, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const Datum& z = p0.atoms[i];
        b[i] = p0.weights[i];
        for (std::size_t j = 0; j < g; ++j) {
            const std::size_t k = i * g + j;
            a(i, k) = 1.0;
            a(n, k) = c(z.x, z_grid[j]);
            obj[k] = -loss(model, params.theta, z_grid[j], z.y);
        }
    }
    a(n, vars - 1) = 1.0;
    b[n] = rho;

    const LpSolution s = solve_lp(a, b, obj);
    if (s.status != LpStatus::Optimal) throw InternalError("worst-case primal LP is infeasible or unbounded");

    WorstCase out;
    out.value = -s.value;
    out.coupling.plan = DenseMatrix(n, g);
    // Worst-case marginal over (candidate, label) pairs, in first-seen order.
    std::map<std::pair<std::size_t, double>, std::size_t> slot;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < g; ++j) {
            const double w = s.x[i * g + j];
            out.coupling.plan(i, j) = w;
            if (w <= 0.0) continue;
            const auto key = std::make_pair(j, p0.atoms[i].y);
            auto [it, fresh] = slot.try_emplace(key, out.distribution.atoms.size());
            if (fresh) {
                out.distribution.atoms.push_back(Datum{z_grid[j], p0.atoms[i].y});
                out.distribution.weights.push_back(0.0);
            }
            out.distribution.weights[it->second] += w;
        }
    }
    return out;
}

}  // namespace wassrobust
