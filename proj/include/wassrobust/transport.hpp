#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "wassrobust/lp.hpp"
#include "wassrobust/model.hpp"
#include "wassrobust/vec.hpp"

namespace wassrobust {

enum class CostKind { SquaredL2, SquaredLp };

/// Transport cost c(z, zeta) = ||z - zeta||_p^2 on the feature block.
///
/// `d0` is the declared radius of the bounded domain on which the Lipschitz
/// constant holds; the inner-maximization oracle also uses it as its
/// divergence guard.
class TransportCost {
  public:
    static TransportCost squared_l2(double d0 = 100.0);
    static TransportCost squared_lp(double p, double d0 = 100.0);

    CostKind kind() const { return kind_; }
    double p() const { return p_; }
    double d0() const { return d0_; }

    double operator()(std::span<const double> z, std::span<const double> zeta) const;
    /// Gradient in zeta (a subgradient where the p-norm is not differentiable).
    Vec grad_zeta(std::span<const double> z, std::span<const double> zeta) const;

    /// Strong-convexity modulus of c(z, .) with respect to the Euclidean norm.
    /// Zero for p = 1 and p > 2, where ||.||_p^2 is not strongly convex.
    double mu() const;
    /// Lipschitz constant of c(z, .) on a ball of radius d0 in `dim` dimensions.
    double lipschitz(std::size_t dim) const;
    /// Lipschitz constant of grad_zeta, when it is globally finite.
    std::optional<double> smoothness() const;

  private:
    TransportCost(CostKind k, double p, double d0) : kind_(k), p_(p), d0_(d0) {}
    CostKind kind_;
    double p_;
    double d0_;
};

inline double cost(const TransportCost& c, std::span<const double> z, std::span<const double> zeta) { return c(z, zeta); }

/// Finite-support probability measure over data points.
struct DiscreteDistribution {
    std::vector<Datum> atoms;
    Vec weights;

    static DiscreteDistribution uniform(std::vector<Datum> atoms);
    /// Throws ValidationError on negative weights, weights not summing to 1
    /// within 1e-12, size mismatch or inconsistent atom dimensions.
    void validate() const;
    std::size_t size() const { return atoms.size(); }
};

/// Transport plan between two finite distributions (rows: source atoms).
struct Coupling {
    DenseMatrix plan;

    /// True when row and column sums match the marginals within `tol`.
    bool has_marginals(const Vec& p, const Vec& q, double tol = 1e-9) const;
};

struct TransportSolution {
    double value = 0.0;
    Coupling coupling;
};

inline constexpr std::size_t kMaxOracleAtoms = 64;
inline constexpr std::size_t kMaxPrimalVariables = 4096;

/// Exact optimal transport between finite distributions (at most 64 atoms each).
TransportSolution optimal_transport(const DiscreteDistribution& p, const DiscreteDistribution& q, const TransportCost& c);
double wasserstein(const DiscreteDistribution& p, const DiscreteDistribution& q, const TransportCost& c);

struct WorstCase {
    double value = 0.0;
    DiscreteDistribution distribution;
    Coupling coupling;
};

/// Worst-case expected loss over distributions supported on `z_grid` (paired
/// with each source atom's label) within transport budget `rho` of `p0`.
///
/// Solved exactly as a linear program over couplings; |p0| * |z_grid| must not
/// exceed 4096.
WorstCase worst_case_primal(const LossModel& model, const ModelParams& params, const DiscreteDistribution& p0,
                            std::span<const Vec> z_grid, double rho, const TransportCost& c);

}  // namespace wassrobust
