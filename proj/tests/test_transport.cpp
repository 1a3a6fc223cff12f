#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "wassrobust/error.hpp"
#include "wassrobust/lp.hpp"
#include "wassrobust/robust.hpp"
#include "wassrobust/rng.hpp"
#include "wassrobust/transport.hpp"

using namespace wassrobust;

namespace {

Vec random_vec(Rng& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    Vec v(n);
    for (double& x : v) x = u(rng);
    return v;
}

DiscreteDistribution points(std::vector<Vec> xs, Vec weights) {
    DiscreteDistribution d;
    for (auto& x : xs) d.atoms.push_back(Datum{std::move(x), 0.0});
    d.weights = std::move(weights);
    return d;
}

Vec random_simplex(Rng& rng, std::size_t n) {
    Vec w = random_vec(rng, n, 0.1, 1.0);
    double s = 0.0;
    for (double v : w) s += v;
    for (double& v : w) v /= s;
    // Renormalize the last entry so the sum is exact to rounding.
    double head = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) head += w[i];
    w.back() = 1.0 - head;
    return w;
}

// Transport polytope with the last column constraint dropped (it is implied).
double ot_by_vertices(const DiscreteDistribution& p, const DiscreteDistribution& q, const TransportCost& c) {
    const std::size_t n = p.size(), m = q.size();
    std::vector<Vec> a;
    Vec b;
    for (std::size_t i = 0; i < n; ++i) {
        Vec row(n * m, 0.0);
        for (std::size_t j = 0; j < m; ++j) row[i * m + j] = 1.0;
        a.push_back(row);
        b.push_back(p.weights[i]);
    }
    for (std::size_t j = 0; j + 1 < m; ++j) {
        Vec row(n * m, 0.0);
        for (std::size_t i = 0; i < n; ++i) row[i * m + j] = 1.0;
        a.push_back(row);
        b.push_back(q.weights[j]);
    }
    Vec cost(n * m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) cost[i * m + j] = c(p.atoms[i].x, q.atoms[j].x);
    return oracles::lp_vertex_min(a, b, cost);
}

}  // namespace

TEST_CASE("cost values") {
    const auto l2 = TransportCost::squared_l2();
    CHECK(l2(Vec{0.3, -0.2}, Vec{0.3, -0.2}) == 0.0);
    CHECK(l2(Vec{0, 0}, Vec{3, 4}) == 25.0);
    CHECK(TransportCost::squared_lp(1.0)(Vec{0, 0}, Vec{1, 1}) == 4.0);
    CHECK(TransportCost::squared_lp(3.0)(Vec{0, 0}, Vec{1, 1}) == doctest::Approx(std::pow(2.0, 2.0 / 3.0)));
    CHECK(TransportCost::squared_lp(2.0).kind() == CostKind::SquaredL2);
    CHECK_THROWS_AS(TransportCost::squared_lp(0.5), ConfigError);
    CHECK_THROWS_AS(TransportCost::squared_l2(0.0), ConfigError);
}

TEST_CASE("cost is nonnegative, symmetric and zero on the diagonal") {
    Rng rng(21);
    for (double p : {1.0, 1.5, 2.0, 3.0}) {
        const auto c = TransportCost::squared_lp(p);
        for (int t = 0; t < 100; ++t) {
            const Vec z = random_vec(rng, 3), w = random_vec(rng, 3);
            CHECK(c(z, w) >= 0.0);
            CHECK(c(z, w) == doctest::Approx(c(w, z)));
            CHECK(c(z, z) == 0.0);
        }
    }
}

TEST_CASE("cost gradient matches central differences") {
    Rng rng(22);
    for (double p : {1.5, 2.0, 3.0}) {
        const auto c = TransportCost::squared_lp(p);
        for (int t = 0; t < 50; ++t) {
            const Vec z = random_vec(rng, 3), w = random_vec(rng, 3);
            const Vec g = c.grad_zeta(z, w);
            const Vec fd = oracles::numeric_gradient([&](const Vec& v) { return c(z, v); }, w, 1e-6);
            for (std::size_t i = 0; i < 3; ++i) CHECK(g[i] == doctest::Approx(fd[i]).epsilon(1e-5));
        }
        CHECK(c.grad_zeta(Vec{1, 2}, Vec{1, 2}) == Vec{0, 0});
    }
}

TEST_CASE("strong convexity and smoothness metadata") {
    CHECK(TransportCost::squared_l2().mu() == 2.0);
    CHECK(TransportCost::squared_lp(1.5).mu() == doctest::Approx(1.0));
    CHECK(TransportCost::squared_lp(1.0).mu() == 0.0);
    CHECK(TransportCost::squared_lp(3.0).mu() == 0.0);
    CHECK(*TransportCost::squared_l2().smoothness() == 2.0);
    CHECK_FALSE(TransportCost::squared_lp(3.0).smoothness().has_value());
    CHECK(TransportCost::squared_l2(5.0).lipschitz(4) == doctest::Approx(10.0));
}

TEST_CASE("squared-l2 cost is 2-strongly convex along random segments") {
    Rng rng(23);
    const auto c = TransportCost::squared_l2();
    for (int t = 0; t < 100; ++t) {
        const Vec z = random_vec(rng, 3), a = random_vec(rng, 3), b = random_vec(rng, 3);
        const double lhs = c(z, b);
        const double rhs = c(z, a) + dot(c.grad_zeta(z, a), sub(b, a)) + norm2_squared(sub(b, a));
        CHECK(lhs >= rhs - 1e-12);
    }
}

TEST_CASE("distribution validation") {
    CHECK_NOTHROW(points({{0.0}, {1.0}}, {0.5, 0.5}).validate());
    CHECK_THROWS_AS(points({{0.0}, {1.0}}, {0.6, 0.5}).validate(), ValidationError);
    CHECK_THROWS_AS(points({{0.0}, {1.0}}, {1.5, -0.5}).validate(), ValidationError);
    CHECK_THROWS_AS(points({{0.0}, {1.0, 2.0}}, {0.5, 0.5}).validate(), ValidationError);
    CHECK_THROWS_AS(points({{0.0}}, {0.5, 0.5}).validate(), ValidationError);
    CHECK_THROWS_AS(wasserstein(points({{0.0}}, {0.9}), points({{0.0}}, {1.0}), TransportCost::squared_l2()),
                    ValidationError);
}

TEST_CASE("wasserstein hand values") {
    const auto c = TransportCost::squared_l2();
    const auto p = points({{0.0}, {1.0}}, {0.5, 0.5});
    CHECK(std::abs(wasserstein(p, p, c)) <= 1e-15);
    CHECK(wasserstein(points({{0.0}}, {1.0}), points({{2.0}}, {1.0}), c) == doctest::Approx(4.0));

    const auto q = points({{0.0}, {1.0}}, {0.25, 0.75});
    const double oracle = ot_by_vertices(p, q, c);
    CHECK(oracle == doctest::Approx(0.25));
    const TransportSolution sol = optimal_transport(p, q, c);
    CHECK(sol.value == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(sol.coupling.has_marginals(p.weights, q.weights));
}

TEST_CASE("wasserstein matches vertex enumeration and is symmetric") {
    Rng rng(24);
    for (int t = 0; t < 40; ++t) {
        const std::size_t n = 1 + t % 3, m = 1 + (t / 3) % 3, d = 1 + t % 2;
        std::vector<Vec> xs, ys;
        for (std::size_t i = 0; i < n; ++i) xs.push_back(random_vec(rng, d));
        for (std::size_t j = 0; j < m; ++j) ys.push_back(random_vec(rng, d));
        const auto p = points(xs, random_simplex(rng, n));
        const auto q = points(ys, random_simplex(rng, m));
        for (double pp : {2.0, 1.5}) {
            const auto c = TransportCost::squared_lp(pp);
            const TransportSolution sol = optimal_transport(p, q, c);
            CHECK(sol.value == doctest::Approx(ot_by_vertices(p, q, c)).epsilon(1e-9));
            CHECK(sol.value == doctest::Approx(wasserstein(q, p, c)).epsilon(1e-9));
            CHECK(sol.coupling.has_marginals(p.weights, q.weights));
        }
    }
}

TEST_CASE("oracle size limit") {
    std::vector<Vec> xs(65, Vec{0.0});
    const auto big = DiscreteDistribution::uniform([&] {
        std::vector<Datum> a;
        for (auto& x : xs) a.push_back({x, 0.0});
        return a;
    }());
    CHECK_THROWS_AS(wasserstein(big, big, TransportCost::squared_l2()), ConfigError);
}

TEST_CASE("worst case with zero budget is the empirical loss") {
    const auto model = LossModel::least_squares(1);
    const ModelParams params{{2.0}, 0.0};
    const auto p0 = DiscreteDistribution::uniform({{{0.5}, 0.0}, {{-0.2}, 1.0}});
    const std::vector<Vec> grid{{0.5}, {-0.2}, {1.0}, {-1.0}};
    const WorstCase wc = worst_case_primal(model, params, p0, grid, 0.0, TransportCost::squared_l2());
    const double empirical = 0.5 * (0.5 * 1.0 * 1.0 + 0.5 * 1.4 * 1.4);
    CHECK(wc.value == doctest::Approx(empirical).epsilon(1e-12));
    CHECK_NOTHROW(wc.distribution.validate());
}

TEST_CASE("one atom, two candidates: simplex grid oracle") {
    const auto model = LossModel::logistic(1);
    const ModelParams params{{1.5}, 0.0};
    const auto p0 = DiscreteDistribution::uniform({{{0.0}, 0.0}});
    const std::vector<Vec> grid{{0.4}, {1.2}};
    const auto c = TransportCost::squared_l2();
    // Below the cheaper candidate's cost no plan is feasible: the atom is not in the grid.
    CHECK_THROWS_AS(worst_case_primal(model, params, p0, grid, 0.05, c), InternalError);
    for (double rho : {0.2, 0.3, 1.0, 2.0}) {
        const double l1 = oracles::logistic_loss({1.5}, {0.4}, 0.0), l2 = oracles::logistic_loss({1.5}, {1.2}, 0.0);
        const double c1 = 0.16, c2 = 1.44;
        double best = -INFINITY;
        for (int k = 0; k <= 10000; ++k) {
            const double t = k * 1e-4;  // mass on the first candidate
            if (t * c1 + (1 - t) * c2 <= rho) best = std::max(best, t * l1 + (1 - t) * l2);
        }
        const double got = worst_case_primal(model, params, p0, grid, rho, c).value;
        CHECK(std::abs(got - best) <= (l2 - l1) * 1e-4 + 1e-12);
    }
}

TEST_CASE("worst case of a constant loss is the constant") {
    const auto model = LossModel::least_squares(2);
    const ModelParams params{{0.0, 0.0}, 0.0};
    const auto p0 = DiscreteDistribution::uniform({{{0.1, 0.2}, 0.7}, {{-0.5, 0.3}, 0.7}});
    const std::vector<Vec> grid{{0.1, 0.2}, {-0.5, 0.3}, {1.0, 1.0}};
    for (double rho : {0.0, 0.5, 10.0})
        CHECK(worst_case_primal(model, params, p0, grid, rho, TransportCost::squared_l2()).value ==
              doctest::Approx(0.5 * 0.49));
}

TEST_CASE("worst case is monotone in the budget and bounded by the dual") {
    Rng rng(25);
    const auto c = TransportCost::squared_l2();
    for (int t = 0; t < 20; ++t) {
        const std::size_t d = 1 + t % 3;
        const auto model = t % 2 ? LossModel::logistic(d) : LossModel::least_squares(d);
        const ModelParams params{random_vec(rng, d), 0.0};
        std::vector<Datum> atoms;
        std::vector<Vec> grid;
        for (int i = 0; i < 3; ++i) {
            atoms.push_back({random_vec(rng, d), static_cast<double>(i % 2)});
            grid.push_back(atoms.back().x);
        }
        for (int j = 0; j < 6; ++j) grid.push_back(random_vec(rng, d, -2, 2));
        const auto p0 = DiscreteDistribution::uniform(atoms);
        double prev = -INFINITY;
        for (double rho : {0.0, 0.1, 0.3, 0.7, 1.5, 4.0}) {
            const double v = worst_case_primal(model, params, p0, grid, rho, c).value;
            CHECK(v >= prev - 1e-12);
            prev = v;
            for (double gamma : {0.0, 0.1, 0.5, 1.0, 3.0, 10.0, 100.0})
                CHECK(dual_objective(model, params.theta, gamma, atoms, rho, c, ExactInner{grid}) >= v - 1e-10);
        }
    }
}

TEST_CASE("worst-case coupling respects the budget") {
    const auto model = LossModel::logistic(2);
    const ModelParams params{{1.0, -1.0}, 0.0};
    const auto p0 = DiscreteDistribution::uniform({{{0.0, 0.0}, 0.0}, {{0.5, 0.5}, 1.0}});
    const std::vector<Vec> grid{{0.0, 0.0}, {0.5, 0.5}, {1.0, -1.0}, {-1.0, 1.0}};
    const auto c = TransportCost::squared_l2();
    const double rho = 0.8;
    const WorstCase wc = worst_case_primal(model, params, p0, grid, rho, c);
    double spent = 0.0;
    for (std::size_t i = 0; i < 2; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < grid.size(); ++j) {
            CHECK(wc.coupling.plan(i, j) >= -1e-12);
            row += wc.coupling.plan(i, j);
            spent += wc.coupling.plan(i, j) * c(p0.atoms[i].x, grid[j]);
        }
        CHECK(row == doctest::Approx(0.5));
    }
    CHECK(spent <= rho + 1e-9);
}

TEST_CASE("lp solver statuses") {
    // x1 + x2 = 1, minimize -x1.
    DenseMatrix a(1, 2);
    a(0, 0) = 1;
    a(0, 1) = 1;
    LpSolution s = solve_lp(a, {1.0}, {-1.0, 0.0});
    CHECK(s.status == LpStatus::Optimal);
    CHECK(s.value == doctest::Approx(-1.0));

    // x1 - x2 = 0, minimize -x1: unbounded.
    a(0, 1) = -1;
    CHECK(solve_lp(a, {0.0}, {-1.0, 0.0}).status == LpStatus::Unbounded);

    // x1 + x2 = -1 has no nonnegative solution.
    a(0, 1) = 1;
    CHECK(solve_lp(a, {-1.0}, {0.0, 0.0}).status == LpStatus::Infeasible);

    // A duplicated row is tolerated.
    DenseMatrix r(2, 2);
    r(0, 0) = r(1, 0) = 1;
    r(0, 1) = r(1, 1) = 2;
    s = solve_lp(r, {2.0, 2.0}, {1.0, 1.0});
    CHECK(s.status == LpStatus::Optimal);
    CHECK(s.value == doctest::Approx(1.0));
}

TEST_CASE("lp solver agrees with vertex enumeration") {
    Rng rng(26);
    for (int t = 0; t < 200; ++t) {
        const std::size_t m = 1 + t % 3, n = m + 1 + t % 4;
        std::vector<Vec> rows;
        DenseMatrix a(m, n);
        const Vec x0 = random_vec(rng, n, 0.0, 1.0);  // feasible by construction
        Vec b(m, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            rows.push_back(random_vec(rng, n));
            for (std::size_t j = 0; j < n; ++j) {
                a(i, j) = rows[i][j];
                b[i] += rows[i][j] * x0[j];
            }
        }
        const Vec c = random_vec(rng, n, 0.0, 1.0);  // nonnegative costs: bounded
        const LpSolution s = solve_lp(a, b, c);
        REQUIRE(s.status == LpStatus::Optimal);
        CHECK(s.value == doctest::Approx(oracles::lp_vertex_min(rows, b, c)).epsilon(1e-9));
    }
}
