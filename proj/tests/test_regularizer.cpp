#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "wassrobust/error.hpp"
#include "wassrobust/regularizer.hpp"
#include "wassrobust/rng.hpp"

using namespace wassrobust;

namespace {

Vec random_vec(Rng& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    Vec v(n);
    for (double& x : v) x = u(rng);
    return v;
}

}  // namespace

TEST_CASE("regularizer values") {
    CHECK(reg_value(Regularizer::l1(0.5), Vec{2, -1}) == 1.5);
    CHECK(reg_value(Regularizer::squared_l2(0.5), Vec{2, -1}) == 2.5);
    CHECK(reg_value(Regularizer::none(), Vec{2, -1}) == 0.0);
    const Regularizer ind = Regularizer::gamma_indicator(1.0);
    CHECK(reg_value(ind, ModelParams{{5.0}, 0.9}) == std::numeric_limits<double>::infinity());
    CHECK(reg_value(ind, ModelParams{{5.0}, 1.0}) == 0.0);
}

TEST_CASE("prox closed forms") {
    const Vec v{1.2, -0.3, 0.0};
    const Vec u = prox(Regularizer::l1(0.5), 1.0, v);
    CHECK(u[0] == doctest::Approx(0.7));
    CHECK(u[1] == 0.0);
    CHECK(u[2] == 0.0);
    CHECK(prox(Regularizer::none(), 3.7, v) == v);
    CHECK(prox(Regularizer::squared_l2(0.5), 1.0, Vec{4.0})[0] == doctest::Approx(2.0));
    CHECK(prox(Regularizer::gamma_indicator(1.0), 1.0, Vec{0.2, 3.0}) == Vec{1.0, 3.0});
    CHECK_THROWS_AS(prox(Regularizer::l1(1.0), 0.0, v), ConfigError);
}

TEST_CASE("l1 prox agrees with grid search") {
    const Vec u = prox(Regularizer::l1(0.3), 1.0, Vec{0.8});
    const double grid =
        oracles::grid_argmin([](double t) { return 0.3 * std::abs(t) + 0.5 * (t - 0.8) * (t - 0.8); }, -2.0, 2.0, 1e-4);
    CHECK(std::abs(u[0] - 0.5) <= 1e-12);
    CHECK(std::abs(grid - 0.5) <= 1e-4);
}

TEST_CASE("augmented prox acts blockwise") {
    const AugmentedRegularizer aug{Regularizer::l1(1.0), 2.0};
    const ModelParams out = aug.prox(0.5, ModelParams{{1.0, -0.2}, 1.0});
    CHECK(out.theta[0] == doctest::Approx(0.5));
    CHECK(out.theta[1] == 0.0);
    CHECK(out.gamma == 2.0);
    CHECK(aug.value(ModelParams{{1.0, -1.0}, 2.5}) == 2.0);
    CHECK(std::isinf(aug.value(ModelParams{{1.0, -1.0}, 1.5})));
}

TEST_CASE("prox characterization and nonexpansiveness") {
    Rng rng(14);
    std::uniform_real_distribution<double> a_dist(0.01, 2.0), b_dist(0.0, 2.0);
    for (int kind = 0; kind < 4; ++kind) {
        for (int trial = 0; trial < 1000; ++trial) {
            const double alpha = a_dist(rng), beta = b_dist(rng);
            const Regularizer reg = kind == 0   ? Regularizer::none()
                                    : kind == 1 ? Regularizer::l1(beta)
                                    : kind == 2 ? Regularizer::squared_l2(beta)
                                                : Regularizer::gamma_indicator(beta - 1.0);
            const std::size_t n = 1 + trial % 4;
            const Vec x = random_vec(rng, n, -3, 3), x2 = random_vec(rng, n, -3, 3);
            Vec y = random_vec(rng, n, -3, 3);
            if (kind == 3)
                for (double& t : y) t = std::max(t, beta - 1.0);  // keep r(y) finite
            const Vec u = prox(reg, alpha, x);
            const double lhs = dot(sub(x, u), sub(y, u));
            const double rhs = alpha * reg_value(reg, y) - alpha * reg_value(reg, u);
            CHECK(lhs <= rhs + 1e-12 * (1.0 + std::abs(rhs)));
            CHECK(norm2(sub(u, prox(reg, alpha, x2))) <= norm2(sub(x, x2)) * (1.0 + 1e-14));
        }
    }
}

TEST_CASE("every prox agrees with a scalar grid search") {
    Rng rng(15);
    std::uniform_real_distribution<double> u(-2.0, 2.0), pos(0.05, 1.5);
    for (int trial = 0; trial < 60; ++trial) {
        const double alpha = pos(rng), beta = pos(rng), v = u(rng);
        const Regularizer regs[] = {Regularizer::l1(beta), Regularizer::squared_l2(beta),
                                    Regularizer::gamma_indicator(beta - 1.0)};
        for (const Regularizer& reg : regs) {
            const double grid = oracles::grid_argmin(
                [&](double t) {
                    const double r = reg_value(reg, Vec{t});
                    return std::isinf(r) ? r : alpha * r + 0.5 * (t - v) * (t - v);
                },
                -4.0, 4.0, 1e-4);
            CHECK(std::abs(prox(reg, alpha, Vec{v})[0] - grid) <= 1e-4);
        }
    }
}

TEST_CASE("regularizer validation") {
    CHECK_THROWS_AS(prox(Regularizer::l1(-0.1), 1.0, Vec{1.0}), ConfigError);
    CHECK_THROWS_AS(prox(Regularizer::squared_l2(-1.0), 1.0, Vec{1.0}), ConfigError);
    CHECK_THROWS_AS(prox(Regularizer::gamma_indicator(1.0), -1.0, ModelParams{{}, 2.0}), ConfigError);
}
