#pragma once

#include <cstddef>
#include <vector>

#include "wassrobust/model.hpp"
#include "wassrobust/rng.hpp"
#include "wassrobust/transport.hpp"

namespace wassrobust {

/// A finite-support worst-case problem whose candidate set contains the atoms.
struct DualityInstance {
    LossModel model;
    ModelParams params;
    DiscreteDistribution p0;
    std::vector<Vec> grid;
    double rho = 0.0;
    TransportCost cost = TransportCost::squared_l2();
};

/// 1-6 atoms in dimension 1-3, logistic or least-squares loss, squared-l2 cost.
DualityInstance random_duality_instance(Rng& rng);

struct DualityCheck {
    double primal = 0.0;
    double dual = 0.0;
    double gamma = 0.0;
    double gap() const;
};

/// LP primal against the exact-grid dual minimized over gamma.
DualityCheck check_duality(const DualityInstance& inst);

/// Largest |analytic - central difference| / max(1, |analytic|) over the
/// theta and feature gradients of one random point per loss kind.
double gradient_check(Rng& rng, double h = 1e-6);

}  // namespace wassrobust
