#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "wassrobust/attacks.hpp"
#include "wassrobust/error.hpp"
#include "wassrobust/rng.hpp"

using namespace wassrobust;

namespace {

Vec random_vec(Rng& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    Vec v(n);
    for (double& x : v) x = u(rng);
    return v;
}

AttackConfig make(AttackKind kind, double eps, std::size_t steps = 10) {
    AttackConfig cfg;
    cfg.kind = kind;
    cfg.eps_adv = eps;
    cfg.steps = steps;
    return cfg;
}

const auto kLogistic2 = LossModel::logistic(2);

}  // namespace

TEST_CASE("fgsm hand example") {
    const Vec adv = fgsm(kLogistic2, {{1.0, -1.0}, 0.0}, {{0.0, 0.0}, 0.0}, make(AttackKind::Fgsm, 0.1));
    CHECK(adv == Vec{0.1, -0.1});
}

TEST_CASE("zero budget leaves the input unchanged") {
    const ModelParams p{{0.7, 0.2}, 0.0};
    const Datum z{{0.3, -0.6}, 1.0};
    for (AttackKind k : {AttackKind::Fgsm, AttackKind::Ifgsm, AttackKind::Pgd})
        CHECK(attack(kLogistic2, p, z, make(k, 0.0), TransportCost::squared_l2()) == z.x);
}

TEST_CASE("perturbations are clipped to the feature range") {
    const Vec adv = fgsm(kLogistic2, {{1.0, 1.0}, 0.0}, {{0.95, 0.0}, 0.0}, make(AttackKind::Fgsm, 0.1));
    CHECK(adv[0] == 1.0);
    CHECK(adv[1] == doctest::Approx(0.1));
}

TEST_CASE("one-step ifgsm is fgsm") {
    Rng rng(41);
    for (int t = 0; t < 50; ++t) {
        const ModelParams p{random_vec(rng, 2, -3, 3), 0.0};
        const Datum z{random_vec(rng, 2), static_cast<double>(t % 2)};
        CHECK(ifgsm(kLogistic2, p, z, make(AttackKind::Ifgsm, 0.2, 1)) == fgsm(kLogistic2, p, z, make(AttackKind::Fgsm, 0.2)));
    }
}

TEST_CASE("iterative attacks on a linear classifier reach the fgsm corner") {
    // The feature gradient of a linear logistic loss keeps its sign pattern.
    Rng rng(42);
    for (int t = 0; t < 50; ++t) {
        const ModelParams p{random_vec(rng, 2, -3, 3), 0.0};
        const Datum z{random_vec(rng, 2, -0.5, 0.5), static_cast<double>(t % 2)};
        const Vec f = fgsm(kLogistic2, p, z, make(AttackKind::Fgsm, 0.2));
        const Vec i = ifgsm(kLogistic2, p, z, make(AttackKind::Ifgsm, 0.2, 7));
        const Vec g = pgd(kLogistic2, p, z, make(AttackKind::Pgd, 0.2, 10));
        for (std::size_t k = 0; k < 2; ++k) {
            CHECK(i[k] == doctest::Approx(f[k]).epsilon(1e-12));
            CHECK(g[k] == doctest::Approx(f[k]).epsilon(1e-12));
        }
    }
}

TEST_CASE("pgd projects onto the budget box") {
    const auto m = LossModel::logistic(1);
    AttackConfig cfg = make(AttackKind::Pgd, 0.1, 1);
    cfg.alpha_atk = 0.3;
    const Vec adv = pgd(m, {{1.0}, 0.0}, {{0.0}, 0.0}, cfg);
    CHECK(adv[0] == doctest::Approx(0.1));

    // With alpha >= eps the first step already lands on the corner.
    cfg.steps = 1;
    const Vec one = pgd(m, {{1.0}, 0.0}, {{0.2}, 0.0}, cfg);
    cfg.steps = 25;
    CHECK(pgd(m, {{1.0}, 0.0}, {{0.2}, 0.0}, cfg) == one);
}

TEST_CASE("wrm attack on a linear score has a closed form") {
    const auto lin = LossModel::linear_score(2);
    const ModelParams p{{1.0, -2.0}, 0.0};
    const Datum z{{0.1, 0.3}, 0.0};
    double prev = INFINITY;
    for (double gamma : {0.5, 1.0, 2.0, 8.0}) {
        AttackConfig cfg = make(AttackKind::Wrm, 0.0);
        cfg.wrm_gamma = gamma;
        cfg.wrm_step = 0.1;
        cfg.wrm_eps = 1e-24;
        cfg.wrm_max_iters = 100000;
        const Vec adv = wrm_attack(lin, p, z, cfg, TransportCost::squared_l2());
        for (std::size_t k = 0; k < 2; ++k) CHECK(adv[k] == doctest::Approx(z.x[k] + p.theta[k] / (2.0 * gamma)).epsilon(1e-9));
        const double moved = std::sqrt(oracles::sq_dist(adv, z.x));
        CHECK(moved < prev);
        prev = moved;
    }
}

TEST_CASE("error under attack") {
    const std::vector<Datum> test{{{0.5, 0.5}, 1.0}, {{-0.5, -0.5}, 0.0}, {{0.6, 0.1}, 1.0}, {{-0.2, -0.7}, 0.0}};
    const ModelParams p{{2.0, 2.0}, 0.0};

    CHECK(evaluate_under_attack(kLogistic2, p, test, make(AttackKind::Pgd, 0.0)) == clean_error(kLogistic2, p, test));
    // Smallest margin |x1 + x2| is 0.7, the l-inf budget moves it by at most 2 eps.
    CHECK(evaluate_under_attack(kLogistic2, p, test, make(AttackKind::Fgsm, 0.3)) == 0.0);
    CHECK(evaluate_under_attack(kLogistic2, p, test, make(AttackKind::Fgsm, 0.6)) == 1.0);

    const ModelParams flat{{0.0, 0.0}, 0.0};
    CHECK(evaluate_under_attack(kLogistic2, flat, test, make(AttackKind::Pgd, 0.5)) == clean_error(kLogistic2, flat, test));

    CHECK_THROWS_AS(evaluate_under_attack(LossModel::least_squares(2), p, test, make(AttackKind::Fgsm, 0.1)), ConfigError);
    CHECK_THROWS_AS(evaluate_under_attack(kLogistic2, p, std::vector<Datum>{}, make(AttackKind::Fgsm, 0.1)), ConfigError);
}

TEST_CASE("budget and range invariants on random inputs") {
    Rng rng(43);
    const auto mlp = LossModel::tiny_mlp(3, 4);
    for (int t = 0; t < 2000; ++t) {
        const bool use_mlp = t % 2;
        const LossModel& m = use_mlp ? mlp : kLogistic2;
        const std::size_t d = use_mlp ? 3 : 2;
        const ModelParams p{random_vec(rng, m.weights_dim(), -3, 3), 0.0};
        const Datum z{random_vec(rng, d), static_cast<double>(t % 3 == 0)};
        const double eps = std::uniform_real_distribution<double>(0.0, 0.7)(rng);
        const AttackKind kind = static_cast<AttackKind>(t % 3);
        AttackConfig cfg = make(kind, eps, 1 + t % 9);
        if (t % 5 == 0) cfg.alpha_atk = eps;
        const Vec adv = attack(m, p, z, cfg, TransportCost::squared_l2());
        for (std::size_t k = 0; k < d; ++k) {
            CHECK(std::abs(adv[k] - z.x[k]) <= eps);
            CHECK(adv[k] >= cfg.clip_lo);
            CHECK(adv[k] <= cfg.clip_hi);
        }
    }
}

TEST_CASE("a larger budget never helps a linear classifier") {
    Rng rng(44);
    std::vector<Datum> test;
    for (int i = 0; i < 200; ++i) test.push_back({random_vec(rng, 2), static_cast<double>(i % 2)});
    const ModelParams p{{1.5, -0.5}, 0.0};
    double prev_err = 0.0;
    for (double eps : {0.0, 0.05, 0.1, 0.2, 0.4, 0.8}) {
        const double err = evaluate_under_attack(kLogistic2, p, test, make(AttackKind::Fgsm, eps));
        CHECK(err >= prev_err);
        prev_err = err;
    }
    for (const Datum& z : test) {
        const double lf = loss(kLogistic2, p.theta, fgsm(kLogistic2, p, z, make(AttackKind::Fgsm, 0.2)), z.y);
        const double lp = loss(kLogistic2, p.theta, pgd(kLogistic2, p, z, make(AttackKind::Pgd, 0.2)), z.y);
        CHECK(lp >= lf - 1e-12);
        CHECK(lf >= loss(kLogistic2, p.theta, z.x, z.y));
    }
}

TEST_CASE("attack kind names round-trip") {
    for (AttackKind k : {AttackKind::Fgsm, AttackKind::Ifgsm, AttackKind::Pgd, AttackKind::Wrm})
        CHECK(parse_attack_kind(to_string(k)) == k);
    CHECK_THROWS_AS(parse_attack_kind("cw"), ConfigError);
}

TEST_CASE("invalid attack settings") {
    CHECK_THROWS_AS(make(AttackKind::Fgsm, -0.1).validate(), ConfigError);
    CHECK_THROWS_AS(make(AttackKind::Pgd, 0.1, 0).validate(), ConfigError);
    AttackConfig cfg = make(AttackKind::Fgsm, 0.1);
    cfg.clip_lo = 1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = make(AttackKind::Wrm, 0.1);
    cfg.wrm_gamma = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("box projection stays within eps in floating point") {
    Rng rng(45);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int t = 0; t < 10000; ++t) {
        const double c = u(rng), eps = std::abs(u(rng)) * 0.3, v = c + 2.0 * u(rng);
        const double r = project_to_box(v, c, eps, -1.0, 1.0);
        CHECK(std::abs(r - c) <= eps);
        CHECK(r >= -1.0);
        CHECK(r <= 1.0);
    }
}
