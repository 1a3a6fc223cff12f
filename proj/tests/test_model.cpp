#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "wassrobust/error.hpp"
#include "wassrobust/model.hpp"
#include "wassrobust/rng.hpp"

using namespace wassrobust;

namespace {

Vec random_vec(Rng& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    Vec v(n);
    for (double& x : v) x = u(rng);
    return v;
}

// Relative error with an absolute floor near zero.
void check_gradient(const Vec& analytic, const Vec& numeric) {
    REQUIRE(analytic.size() == numeric.size());
    for (std::size_t i = 0; i < analytic.size(); ++i) {
        const double err = std::abs(analytic[i] - numeric[i]);
        CHECK((err <= 1e-8 || err <= 1e-5 * std::max(std::abs(analytic[i]), std::abs(numeric[i]))));
    }
}

}  // namespace

TEST_CASE("loss values on hand instances") {
    const auto ls = LossModel::least_squares(1);
    CHECK(loss(ls, Vec{1.0}, Vec{2.0}, 2.0) == 0.0);
    const auto lg = LossModel::logistic(3);
    CHECK(loss(lg, Vec{0, 0, 0}, Vec{0.3, -2, 5}, 1.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(loss(lg, Vec{0, 0, 0}, Vec{0.3, -2, 5}, 0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("logistic loss stays finite at extreme scores") {
    const auto lg = LossModel::logistic(1);
    CHECK(std::isfinite(loss(lg, Vec{1e3}, Vec{1.0}, 0.0)));
    CHECK(loss(lg, Vec{1e3}, Vec{1.0}, 0.0) == doctest::Approx(1e3));
    CHECK(loss(lg, Vec{1e3}, Vec{1.0}, 1.0) >= 0.0);
    CHECK(loss(lg, Vec{-1e3}, Vec{1.0}, 0.0) >= 0.0);
}

TEST_CASE("gradients on hand instances") {
    const auto ls = LossModel::least_squares(1);
    CHECK(grad_theta(ls, Vec{1.0}, Vec{2.0}, 0.0) == Vec{4.0});
    CHECK(grad_features(ls, Vec{1.0}, Vec{2.0}, 0.0) == Vec{2.0});

    const auto lg = LossModel::logistic(2);
    const Vec x{0.4, -1.2};
    for (double y : {0.0, 1.0}) {
        const Vec g = grad_theta(lg, Vec{0, 0}, x, y);
        CHECK(g[0] == doctest::Approx((0.5 - y) * x[0]));
        CHECK(g[1] == doctest::Approx((0.5 - y) * x[1]));
    }
}

TEST_CASE("zero weights give zero feature gradient") {
    const Vec x{0.3, -0.7, 0.9};
    CHECK(grad_features(LossModel::least_squares(3), Vec(3, 0.0), x, 0.5) == Vec(3, 0.0));
    CHECK(grad_features(LossModel::logistic(3), Vec(3, 0.0), x, 1.0) == Vec(3, 0.0));
}

TEST_CASE("tiny mlp forward pass matches an independent implementation") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t d = 1 + trial % 4, h = 1 + trial % 5;
        const auto m = LossModel::tiny_mlp(d, h);
        REQUIRE(m.weights_dim() == h * d + 2 * h + 1);
        const Vec theta = random_vec(rng, m.weights_dim(), -2, 2);
        const Vec x = random_vec(rng, d);
        const double y = trial % 2;
        CHECK(std::abs(loss(m, theta, x, y) - oracles::mlp_loss(theta, x, y, h)) <= 1e-12);
    }
}

TEST_CASE("analytic gradients match central differences") {
    Rng rng(12);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t d = 1 + trial % 4;
        for (const auto& m : {LossModel::least_squares(d), LossModel::logistic(d), LossModel::tiny_mlp(d, 3),
                              LossModel::linear_score(d)}) {
            Vec theta = random_vec(rng, m.weights_dim(), -1.5, 1.5);
            Vec x = random_vec(rng, d);
            const double y = m.kind() == LossKind::LeastSquares ? random_vec(rng, 1)[0] : trial % 2;
            check_gradient(grad_theta(m, theta, x, y),
                           oracles::numeric_gradient([&](const Vec& t) { return loss(m, t, x, y); }, theta, 1e-6));
            check_gradient(grad_features(m, theta, x, y),
                           oracles::numeric_gradient([&](const Vec& v) { return loss(m, theta, v, y); }, x, 1e-6));
        }
    }
}

TEST_CASE("dimension mismatch is a configuration error") {
    const auto lg = LossModel::logistic(2);
    CHECK_THROWS_AS(loss(lg, Vec{1, 2, 3}, Vec{1, 2}, 0.0), ConfigError);
    CHECK_THROWS_AS(grad_theta(lg, Vec{1, 2}, Vec{1}, 0.0), ConfigError);
    CHECK_THROWS_AS(grad_features(LossModel::tiny_mlp(2, 2), Vec(3), Vec{1, 2}, 0.0), ConfigError);
}

TEST_CASE("prediction needs a classifier") {
    CHECK(predict(LossModel::logistic(1), Vec{2.0}, Vec{1.0}) == 1);
    CHECK(predict(LossModel::logistic(1), Vec{2.0}, Vec{-1.0}) == 0);
    CHECK_THROWS_AS(predict(LossModel::least_squares(1), Vec{2.0}, Vec{1.0}), ConfigError);
}

TEST_CASE("least-squares gradient ratios respect the curvature bound") {
    // For 0.5 (theta.x - y)^2 the feature Hessian is theta theta^T, so L_zz = ||theta||^2.
    Rng rng(13);
    const auto m = LossModel::least_squares(3);
    for (int trial = 0; trial < 200; ++trial) {
        const Vec theta = random_vec(rng, 3);
        const Vec x1 = random_vec(rng, 3), x2 = random_vec(rng, 3);
        const double y = random_vec(rng, 1)[0];
        const Vec g = sub(grad_features(m, theta, x1, y), grad_features(m, theta, x2, y));
        const double bound = *feature_curvature(m, theta);
        CHECK(bound == doctest::Approx(norm2_squared(theta)));
        CHECK(norm2(g) <= bound * norm2(sub(x1, x2)) * (1 + 1e-12) + 1e-15);
    }
}

TEST_CASE("declared Lipschitz metadata takes precedence") {
    Lipschitz lip;
    lip.zz = 0.75;
    CHECK(*feature_curvature(LossModel::logistic(2, lip), Vec{10, 10}) == 0.75);
    CHECK(*feature_curvature(LossModel::logistic(2), Vec{2, 0}) == doctest::Approx(1.0));
    CHECK_FALSE(feature_curvature(LossModel::tiny_mlp(2, 2), Vec(9, 0.1)).has_value());
}

TEST_CASE("params flatten with gamma last") {
    const ModelParams p{{1.0, -2.0}, 3.5};
    CHECK(p.flat() == Vec{1.0, -2.0, 3.5});
    CHECK(ModelParams::from_flat(p.flat()) == p);
}
