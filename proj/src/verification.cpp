#include "wassrobust/verification.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "wassrobust/robust.hpp"

namespace wassrobust {

DualityInstance random_duality_instance(Rng& rng) {
    std::uniform_int_distribution<std::size_t> dim_dist(1, 3), atom_dist(1, 6);
    std::uniform_real_distribution<double> unit(-1.0, 1.0), rho_dist(0.05, 1.0);
    const std::size_t d = dim_dist(rng);
    const std::size_t n = atom_dist(rng);
    const bool logistic = std::bernoulli_distribution(0.5)(rng);

    DualityInstance inst{logistic ? LossModel::logistic(d) : LossModel::least_squares(d), {}, {}, {}, rho_dist(rng)};
    inst.params.theta.resize(d);
    for (double& v : inst.params.theta) v = unit(rng);

    for (std::size_t i = 0; i < n; ++i) {
        Datum z{Vec(d), 0.0};
        for (double& v : z.x) v = unit(rng);
        z.y = logistic ? static_cast<double>(i % 2) : unit(rng);
        inst.p0.atoms.push_back(z);
        inst.grid.push_back(z.x);
    }
    inst.p0.weights.assign(n, 1.0 / static_cast<double>(n));
    for (std::size_t j = 0; j < 12; ++j) {
        Vec g(d);
        for (double& v : g) v = 1.5 * unit(rng);
        inst.grid.push_back(g);
    }
    return inst;
}

double DualityCheck::gap() const { return std::abs(primal - dual); }

DualityCheck check_duality(const DualityInstance& inst) {
    const WorstCase primal = worst_case_primal(inst.model, inst.params, inst.p0, inst.grid, inst.rho, inst.cost);

    // Past gamma_max = (loss spread) / (smallest positive cost) every sup sits
    // at zeta = x and the dual grows linearly, so the minimizer lies below it.
    double lmin = INFINITY, lmax = -INFINITY, cmin = INFINITY;
    for (const Datum& z : inst.p0.atoms) {
        for (const Vec& g : inst.grid) {
            const double l = loss(inst.model, inst.params.theta, g, z.y);
            lmin = std::min(lmin, l);
            lmax = std::max(lmax, l);
            const double c = inst.cost(z.x, g);
            if (c > 0.0) cmin = std::min(cmin, c);
        }
    }
    const double gamma_hi = std::isfinite(cmin) ? (lmax - lmin) / cmin + 1.0 : 1.0;

    const DualMinimum dual = minimize_dual(inst.model, inst.params.theta, inst.p0.atoms, inst.rho, inst.cost,
                                           ExactInner{inst.grid}, GammaSearch{0.0, gamma_hi, 1e-4});
    return {primal.value, dual.value, dual.gamma};
}

double gradient_check(Rng& rng, double h) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_int_distribution<std::size_t> dim_dist(1, 4);
    double worst = 0.0;
    for (int kind = 0; kind < 3; ++kind) {
        const std::size_t d = dim_dist(rng);
        const LossModel model = kind == 0   ? LossModel::least_squares(d)
                                : kind == 1 ? LossModel::logistic(d)
                                            : LossModel::tiny_mlp(d, 3);
        Vec theta(model.weights_dim()), x(d);
        for (double& v : theta) v = unit(rng);
        for (double& v : x) v = unit(rng);
        const double y = kind == 0 ? unit(rng) : static_cast<double>(std::bernoulli_distribution(0.5)(rng));

        auto compare = [&](const Vec& analytic, Vec& point, auto&& f) {
            for (std::size_t i = 0; i < point.size(); ++i) {
                const double saved = point[i];
                point[i] = saved + h;
                const double up = f();
                point[i] = saved - h;
                const double down = f();
                point[i] = saved;
                const double fd = (up - down) / (2.0 * h);
                worst = std::max(worst, std::abs(analytic[i] - fd) / std::max(1.0, std::abs(analytic[i])));
            }
        };
        auto value = [&] { return loss(model, theta, x, y); };
        compare(grad_theta(model, theta, x, y), theta, value);
        compare(grad_features(model, theta, x, y), x, value);
    }
    return worst;
}

}  // namespace wassrobust
