#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "wassrobust/attacks.hpp"
#include "wassrobust/model.hpp"
#include "wassrobust/regularizer.hpp"
#include "wassrobust/rng.hpp"
#include "wassrobust/robust.hpp"
#include "wassrobust/transport.hpp"

namespace wassrobust {

enum class Algorithm { Erm, Spgd, Spgda, AdvTrain, Wrm };
enum class StepSchedule { Constant, InvSqrt };

std::string_view to_string(Algorithm a);
bool is_robust(Algorithm a);

struct TrainerConfig {
    Algorithm algorithm = Algorithm::Spgda;
    double alpha = 0.001;
    double eta = 0.02;
    std::size_t batch_size = 128;
    std::size_t iters = 1000;
    std::uint64_t seed = 0;
    RobustConfig robust;
    TransportCost cost = TransportCost::squared_l2();
    /// Attack used to augment batches (adv-train only).
    AttackConfig attack;
    /// Frozen dual variable (wrm only).
    double wrm_gamma = 1.0;
    StepSchedule schedule = StepSchedule::Constant;
    /// Trace sampling period of train().
    std::size_t stride = 100;

    double alpha_at(std::size_t t) const;
    double eta_at(std::size_t t) const;
    void validate(std::size_t dataset_size) const;
};

/// Epoch-based sampling without replacement, reshuffled at every epoch.
class BatchSampler {
  public:
    BatchSampler(std::uint64_t seed, std::size_t n);

    /// Next m indices; an epoch boundary inside a batch reshuffles and continues.
    std::vector<std::size_t> next(std::size_t m);
    std::size_t population() const { return order_.size(); }

    friend bool operator==(const BatchSampler&, const BatchSampler&) = default;

  private:
    void reshuffle();
    Rng rng_;
    std::vector<std::size_t> order_;
    std::size_t cursor_;
};

struct TraceEntry {
    std::size_t iteration = 0;
    double objective = 0.0;
    double stationarity = 0.0;
    friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

struct TrainerState {
    ModelParams params;
    std::size_t iteration = 0;
    std::vector<TraceEntry> trace;
    BatchSampler sampler;

    friend bool operator==(const TrainerState&, const TrainerState&) = default;
};

/// theta ~ U(-0.05, 0.05) from stream 0 of the run seed; gamma = gamma0 + 1.
ModelParams initial_params(const LossModel& model, const TrainerConfig& cfg);
TrainerState initial_state(const LossModel& model, std::size_t dataset_size, const TrainerConfig& cfg);

/// SPGDA batch gradient: each sample takes one ascent step
/// zeta = x + eta * grad_zeta psi|_{zeta=x}, and the (theta, gamma) gradients of
/// psi at those points are averaged in batch order.
Vec perturbed_batch_gradient(const LossModel& model, const ModelParams& params, std::span<const Datum> data,
                             std::span<const std::size_t> batch, double rho, double eta, const TransportCost& c);

/// Mean grad_theta l over a batch.
Vec empirical_batch_gradient(const LossModel& model, const ModelParams& params, std::span<const Datum> data,
                             std::span<const std::size_t> batch);

/// theta <- prox_{alpha r}(theta - alpha g); gamma untouched.
ModelParams erm_update(const ModelParams& params, std::span<const double> grad, const Regularizer& reg, double alpha);
/// theta_bar <- prox_{alpha (r + h)}(theta_bar - alpha g) with g over (theta, gamma).
ModelParams robust_update(const ModelParams& params, std::span<const double> grad, const Regularizer& reg,
                          double gamma0, double alpha);

TrainerState spgd_step(TrainerState state, std::span<const Datum> data, const LossModel& model, const Regularizer& reg,
                       const TrainerConfig& cfg);
TrainerState spgda_step(TrainerState state, std::span<const Datum> data, const LossModel& model, const Regularizer& reg,
                        const TrainerConfig& cfg);
TrainerState erm_step(TrainerState state, std::span<const Datum> data, const LossModel& model, const Regularizer& reg,
                      const TrainerConfig& cfg);
TrainerState adv_train_step(TrainerState state, std::span<const Datum> data, const LossModel& model,
                            const Regularizer& reg, const TrainerConfig& cfg);
TrainerState wrm_step(TrainerState state, std::span<const Datum> data, const LossModel& model, const Regularizer& reg,
                      const TrainerConfig& cfg);

/// Step function selected by cfg.algorithm.
TrainerState train_step(TrainerState state, std::span<const Datum> data, const LossModel& model,
                        const Regularizer& reg, const TrainerConfig& cfg);

/// Full-batch (objective, stationarity) for the algorithm's own objective:
/// the robust surrogate for spgd/spgda, the regularized empirical loss otherwise.
/// Robust values are NaN where the oracle rejects the inner problem as not
/// strongly concave.
TraceEntry measure(const LossModel& model, const ModelParams& params, const Regularizer& reg,
                   std::span<const Datum> data, const TrainerConfig& cfg, std::size_t iteration);

/// Called after each trace point is recorded.
using EvalHook = std::function<void(const TrainerState&)>;

struct TrainResult {
    ModelParams params;
    std::vector<TraceEntry> trace;
};

/// Runs cfg.iters steps. Trace points at iteration 0, every multiple of
/// cfg.stride, and the final iteration.
TrainResult train(std::span<const Datum> data, const LossModel& model, const Regularizer& reg,
                  const TrainerConfig& cfg, const EvalHook& hook = {});

}  // namespace wassrobust
