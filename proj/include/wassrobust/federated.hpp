#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "wassrobust/model.hpp"
#include "wassrobust/regularizer.hpp"
#include "wassrobust/trainers.hpp"
#include "wassrobust/transport.hpp"

namespace wassrobust {

enum class PartitionScheme { Iid, OneClassPerWorker };

/// Splits a dataset into K disjoint covering shards.
///
/// iid: a seeded shuffle dealt round-robin, so sizes differ by at most one.
/// one-class: worker k (1-based) holds only class k mod class_count; the
/// workers sharing a class split its items round-robin. Every class needs at
/// least one worker, so K >= class_count.
std::vector<std::vector<Datum>> partition(std::span<const Datum> data, PartitionScheme scheme, std::size_t workers,
                                          std::uint64_t seed, std::size_t class_count = 2);

struct Broadcast {
    std::size_t round = 0;
    ModelParams params;
};

struct Report {
    std::size_t round = 0;
    std::size_t worker = 0;
    Vec gradient;
    std::size_t batch_count = 0;
};

using RoundMessage = std::variant<Broadcast, Report>;

struct WorkerState {
    std::size_t id = 0;  // 1-based
    std::vector<Datum> shard;
    BatchSampler sampler;
    std::size_t batch_size = 0;
};

/// Worker k samples with derive_seed(run_seed, k); its batch size is
/// min(batch_size, shard size). Throws ConfigError for an empty shard.
std::vector<WorkerState> make_workers(std::vector<std::vector<Datum>> shards, std::uint64_t run_seed,
                                      std::size_t batch_size);

/// One DRFL worker round: sample a minibatch, take one ascent step per datum
/// and report the minibatch-averaged (theta, gamma) gradient of psi.
RoundMessage worker_round(WorkerState& w, const RoundMessage& broadcast, const LossModel& model, const TransportCost& c,
                          const TrainerConfig& cfg);

struct ServerState {
    ModelParams params;
    std::size_t round = 0;
    std::size_t workers = 1;
    TrainerConfig cfg;

    RoundMessage broadcast() const { return Broadcast{round, params}; }
};

/// theta_bar <- prox(theta_bar - (alpha / K) * sum_k report_k), reduced in
/// worker-id order. Throws ProtocolError on stale, missing or duplicate reports.
ServerState server_aggregate(ServerState s, std::span<const RoundMessage> reports, const Regularizer& reg);

struct RoundMetrics {
    std::size_t round = 0;  // rounds completed
    double gamma = 0.0;
    double mean_report_norm = 0.0;
};

struct FederatedResult {
    ModelParams params;
    std::vector<RoundMetrics> metrics;
};

/// Called with the server state after every aggregation.
using RoundHook = std::function<void(const ServerState&)>;

/// cfg.iters synchronous rounds of broadcast, K worker rounds and aggregation.
FederatedResult drfl_train(std::vector<std::vector<Datum>> shards, const LossModel& model, const Regularizer& reg,
                           const TrainerConfig& cfg, const RoundHook& hook = {});

/// Federated averaging: each round every worker runs local_epochs epochs of
/// ERM prox-SGD from the broadcast weights; the server averages weights by shard size.
FederatedResult fedavg_train(std::vector<std::vector<Datum>> shards, const LossModel& model, const Regularizer& reg,
                             std::size_t local_epochs, const TrainerConfig& cfg, const RoundHook& hook = {});

}  // namespace wassrobust
