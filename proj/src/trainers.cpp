#include "wassrobust/trainers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "wassrobust/error.hpp"

namespace wassrobust {

std::string_view to_string(Algorithm a) {
    switch (a) {
        case Algorithm::Erm: return "erm";
        case Algorithm::Spgd: return "spgd";
        case Algorithm::Spgda: return "spgda";
        case Algorithm::AdvTrain: return "adv";
        case Algorithm::Wrm: return "wrm";
    }
    return "?";
}

bool is_robust(Algorithm a) { return a == Algorithm::Spgd || a == Algorithm::Spgda; }

double TrainerConfig::alpha_at(std::size_t t) const {
    return schedule == StepSchedule::Constant ? alpha : alpha / std::sqrt(static_cast<double>(t + 1));
}

double TrainerConfig::eta_at(std::size_t t) const {
    return schedule == StepSchedule::Constant ? eta : eta / std::sqrt(static_cast<double>(t + 1));
}

void TrainerConfig::validate(std::size_t dataset_size) const {
    if (!(alpha > 0.0) || !(eta > 0.0)) throw ConfigError("alpha and eta must be positive");
    if (batch_size == 0) throw ConfigError("batch size must be positive");
    if (batch_size > dataset_size)
        throw ConfigError("batch size " + std::to_string(batch_size) + " exceeds dataset size " +
                          std::to_string(dataset_size));
    if (stride == 0) throw ConfigError("trace stride must be positive");
    robust.validate();
    if (algorithm == Algorithm::AdvTrain) attack.validate();
    if (algorithm == Algorithm::Wrm && !(wrm_gamma > 0.0)) throw ConfigError("wrm_gamma must be positive");
}

BatchSampler::BatchSampler(std::uint64_t seed, std::size_t n) : rng_(seed), order_(n), cursor_(n) {
    for (std::size_t i = 0; i < n; ++i) order_[i] = i;
}

void BatchSampler::reshuffle() {
    std::shuffle(order_.begin(), order_.end(), rng_);
    cursor_ = 0;
}

std::vector<std::size_t> BatchSampler::next(std::size_t m) {
    if (order_.empty()) throw ConfigError("cannot sample from an empty dataset");
    std::vector<std::size_t> out;
    out.reserve(m);
    while (out.size() < m) {
        if (cursor_ == order_.size()) reshuffle();
        out.push_back(order_[cursor_++]);
    }
    return out;
}

ModelParams initial_params(const LossModel& model, const TrainerConfig& cfg) {
    Rng rng(derive_seed(cfg.seed, 0));
    std::uniform_real_distribution<double> u(-0.05, 0.05);
    ModelParams p{Vec(model.weights_dim()), cfg.robust.gamma0 + 1.0};
    for (double& v : p.theta) v = u(rng);
    return p;
}

TrainerState initial_state(const LossModel& model, std::size_t dataset_size, const TrainerConfig& cfg) {
    return TrainerState{initial_params(model, cfg), 0, {}, BatchSampler(derive_seed(cfg.seed, 1), dataset_size)};
}

namespace {

void divide(Vec& g, std::size_t n) {
    for (double& v : g) v /= static_cast<double>(n);
}

}  // namespace

Vec perturbed_batch_gradient(const LossModel& model, const ModelParams& params, std::span<const Datum> data,
                             std::span<const std::size_t> batch, double rho, double eta, const TransportCost& c) {
    Vec g(params.dim() + 1, 0.0);
    for (std::size_t idx : batch) {
        const Datum& z = data[idx];
        Vec zeta = z.x;
        axpy(eta, psi_grad_zeta(model, params, z.x, z, c), zeta);
        axpy(1.0, psi_grad_params(model, params, zeta, z, rho, c), g);
    }
    divide(g, batch.size());
    return g;
}

Vec empirical_batch_gradient(const LossModel& model, const ModelParams& params, std::span<const Datum> data,
                             std::span<const std::size_t> batch) {
    Vec g(params.dim(), 0.0);
    for (std::size_t idx : batch) axpy(1.0, grad_theta(model, params.theta, data[idx].x, data[idx].y), g);
    divide(g, batch.size());
    return g;
}

ModelParams erm_update(const ModelParams& params, std::span<const double> grad, const Regularizer& reg, double alpha) {
    ModelParams next = params;
    axpy(-alpha, grad.first(params.dim()), next.theta);
    return prox(reg, alpha, next);
}

ModelParams robust_update(const ModelParams& params, std::span<const double> grad, const Regularizer& reg,
                          double gamma0, double alpha) {
    Vec flat = params.flat();
    axpy(-alpha, grad, flat);
    return AugmentedRegularizer{reg, gamma0}.prox(alpha, ModelParams::from_flat(flat));
}

TrainerState spgd_step(TrainerState state, std::span<const Datum> data, const LossModel& model, const Regularizer& reg,
                       const TrainerConfig& cfg) {
    const std::size_t t = state.iteration;
    const auto batch = state.sampler.next(cfg.batch_size);
    Vec g(state.params.dim() + 1, 0.0);
    for (std::size_t idx : batch) {
        const Datum& z = data[idx];
        const OracleResult r =
            with_context(sample_context(idx), [&] { return inner_max_oracle(model, state.params, z, cfg.robust, cfg.cost); });
        axpy(1.0, psi_grad_params(model, state.params, r.zeta, z, cfg.robust.rho, cfg.cost), g);
    }
    divide(g, batch.size());
    state.params = robust_update(state.params, g, reg, cfg.robust.gamma0, cfg.alpha_at(t));
    ++state.iteration;
    return state;
}

TrainerState spgda_step(TrainerState state, std::span<const Datum> data, const LossModel& model, const Regularizer& reg,
                        const TrainerConfig& cfg) {
    const std::size_t t = state.iteration;
    const auto batch = state.sampler.next(cfg.batch_size);
    const Vec g = perturbed_batch_gradient(model, state.params, data, batch, cfg.robust.rho, cfg.eta_at(t), cfg.cost);
    state.params = robust_update(state.params, g, reg, cfg.robust.gamma0, cfg.alpha_at(t));
    ++state.iteration;
    return state;
}

TrainerState erm_step(TrainerState state, std::span<const Datum> data, const LossModel& model, const Regularizer& reg,
                      const TrainerConfig& cfg) {
    const std::size_t t = state.iteration;
    const auto batch = state.sampler.next(cfg.batch_size);
    const Vec g = empirical_batch_gradient(model, state.params, data, batch);
    state.params = erm_update(state.params, g, reg, cfg.alpha_at(t));
    ++state.iteration;
    return state;
}

TrainerState adv_train_step(TrainerState state, std::span<const Datum> data, const LossModel& model,
                            const Regularizer& reg, const TrainerConfig& cfg) {
    const std::size_t t = state.iteration;
    const auto batch = state.sampler.next(cfg.batch_size);
    Vec g(state.params.dim(), 0.0);
    for (std::size_t idx : batch) {
        const Datum& z = data[idx];
        const Vec adv = with_context(sample_context(idx), [&] { return attack(model, state.params, z, cfg.attack, cfg.cost); });
        axpy(1.0, grad_theta(model, state.params.theta, adv, z.y), g);
    }
    divide(g, batch.size());
    state.params = erm_update(state.params, g, reg, cfg.alpha_at(t));
    ++state.iteration;
    return state;
}

TrainerState wrm_step(TrainerState state, std::span<const Datum> data, const LossModel& model, const Regularizer& reg,
                      const TrainerConfig& cfg) {
    const std::size_t t = state.iteration;
    const auto batch = state.sampler.next(cfg.batch_size);
    const ModelParams penalized{state.params.theta, cfg.wrm_gamma};
    const AscentOptions opts{cfg.robust.oracle_step, cfg.robust.oracle_eps, cfg.robust.oracle_max_iters,
                             cfg.robust.lambda_proxy, false, 0.0};
    Vec g(state.params.dim(), 0.0);
    for (std::size_t idx : batch) {
        const Datum& z = data[idx];
        const OracleResult r =
            with_context(sample_context(idx), [&] { return penalized_ascent(model, penalized, z, 0.0, cfg.cost, opts); });
        axpy(1.0, grad_theta(model, state.params.theta, r.zeta, z.y), g);
    }
    divide(g, batch.size());
    state.params = erm_update(state.params, g, reg, cfg.alpha_at(t));
    ++state.iteration;
    return state;
}

TrainerState train_step(TrainerState state, std::span<const Datum> data, const LossModel& model,
                        const Regularizer& reg, const TrainerConfig& cfg) {
    switch (cfg.algorithm) {
        case Algorithm::Erm: return erm_step(std::move(state), data, model, reg, cfg);
        case Algorithm::Spgd: return spgd_step(std::move(state), data, model, reg, cfg);
        case Algorithm::Spgda: return spgda_step(std::move(state), data, model, reg, cfg);
        case Algorithm::AdvTrain: return adv_train_step(std::move(state), data, model, reg, cfg);
        case Algorithm::Wrm: return wrm_step(std::move(state), data, model, reg, cfg);
    }
    return state;
}

TraceEntry measure(const LossModel& model, const ModelParams& params, const Regularizer& reg,
                   std::span<const Datum> data, const TrainerConfig& cfg, std::size_t iteration) {
    if (is_robust(cfg.algorithm)) {
        try {
            return {iteration, robust_objective(model, params, reg, data, cfg.robust, cfg.cost),
                    stationarity_distance(model, params, reg, data, cfg.robust, cfg.cost)};
        } catch (const ConfigError&) {
            // The oracle cannot certify the inner problem at these parameters.
            const double nan = std::numeric_limits<double>::quiet_NaN();
            return {iteration, nan, nan};
        }
    }
    double total = 0.0;
    Vec g(params.dim(), 0.0);
    for (const Datum& z : data) {
        total += loss(model, params, z);
        axpy(1.0, grad_theta(model, params, z), g);
    }
    divide(g, data.size());
    return {iteration, total / static_cast<double>(data.size()) + reg_value(reg, params.theta),
            theta_subgradient_distance(reg, params.theta, g)};
}

TrainResult train(std::span<const Datum> data, const LossModel& model, const Regularizer& reg,
                  const TrainerConfig& cfg, const EvalHook& hook) {
    cfg.validate(data.size());
    for (const Datum& z : data) check_dims(model, Vec(model.weights_dim()), z.x);
    TrainerState state = initial_state(model, data.size(), cfg);
    auto record = [&] {
        const std::string where = " at iteration " + std::to_string(state.iteration);
        state.trace.push_back(
            with_context(where, [&] { return measure(model, state.params, reg, data, cfg, state.iteration); }));
        if (hook) hook(state);
    };
    record();
    while (state.iteration < cfg.iters) {
        const std::size_t t = state.iteration;
        state = with_context(" at iteration " + std::to_string(t),
                             [&] { return train_step(std::move(state), data, model, reg, cfg); });
        if (state.iteration % cfg.stride == 0 || state.iteration == cfg.iters) record();
    }
    return {state.params, state.trace};
}

}  // namespace wassrobust
