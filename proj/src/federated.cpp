#include "wassrobust/federated.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>

#include "wassrobust/error.hpp"
#include "wassrobust/parallel.hpp"
#include "wassrobust/rng.hpp"

namespace wassrobust {

std::vector<std::vector<Datum>> partition(std::span<const Datum> data, PartitionScheme scheme, std::size_t workers,
                                          std::uint64_t seed, std::size_t class_count) {
    if (workers == 0) throw ConfigError("need at least one worker");
    if (workers > data.size())
        throw ConfigError(std::to_string(workers) + " workers for " + std::to_string(data.size()) + " items");
    Rng rng(derive_seed(seed, 0));
    std::vector<std::size_t> order(data.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<std::vector<Datum>> shards(workers);
    if (scheme == PartitionScheme::Iid) {
        for (std::size_t j = 0; j < order.size(); ++j) shards[j % workers].push_back(data[order[j]]);
        return shards;
    }

    if (class_count == 0) throw ConfigError("one-class partition needs a classification dataset");
    if (workers < class_count)
        throw ConfigError("one-class partition needs at least one worker per class (" + std::to_string(class_count) +
                          " classes, " + std::to_string(workers) + " workers)");
    std::vector<std::vector<std::size_t>> owners(class_count);
    for (std::size_t k = 1; k <= workers; ++k) owners[k % class_count].push_back(k - 1);
    std::vector<std::size_t> dealt(class_count, 0);
    for (std::size_t idx : order) {
        const double y = data[idx].y;
        if (y < 0.0 || y >= static_cast<double>(class_count) || y != std::floor(y))
            throw ValidationError("label " + std::to_string(y) + " is not a class index");
        const auto cls = static_cast<std::size_t>(y);
        const auto& own = owners[cls];
        shards[own[dealt[cls]++ % own.size()]].push_back(data[idx]);
    }
    for (std::size_t k = 0; k < workers; ++k)
        if (shards[k].empty()) throw ConfigError("worker " + std::to_string(k + 1) + " received no data");
    return shards;
}

std::vector<WorkerState> make_workers(std::vector<std::vector<Datum>> shards, std::uint64_t run_seed,
                                      std::size_t batch_size) {
    if (shards.empty()) throw ConfigError("need at least one worker");
    if (batch_size == 0) throw ConfigError("batch size must be positive");
    std::vector<WorkerState> out;
    out.reserve(shards.size());
    for (std::size_t k = 0; k < shards.size(); ++k) {
        if (shards[k].empty()) throw ConfigError("worker " + std::to_string(k + 1) + " has an empty shard");
        const std::size_t n = shards[k].size();
        out.push_back(WorkerState{k + 1, std::move(shards[k]), BatchSampler(derive_seed(run_seed, k + 1), n),
                                  std::min(batch_size, n)});
    }
    return out;
}

RoundMessage worker_round(WorkerState& w, const RoundMessage& broadcast, const LossModel& model, const TransportCost& c,
                          const TrainerConfig& cfg) {
    const auto* b = std::get_if<Broadcast>(&broadcast);
    if (b == nullptr) throw ProtocolError("worker " + std::to_string(w.id) + " expected a broadcast");
    const auto batch = w.sampler.next(w.batch_size);
    Vec g = perturbed_batch_gradient(model, b->params, w.shard, batch, cfg.robust.rho, cfg.eta_at(b->round), c);
    return Report{b->round, w.id, std::move(g), batch.size()};
}

ServerState server_aggregate(ServerState s, std::span<const RoundMessage> reports, const Regularizer& reg) {
    std::vector<const Report*> by_worker(s.workers, nullptr);
    for (const auto& msg : reports) {
        const auto* r = std::get_if<Report>(&msg);
        if (r == nullptr) throw ProtocolError("server received a broadcast instead of a report");
        if (r->worker < 1 || r->worker > s.workers)
            throw ProtocolError("report from unknown worker " + std::to_string(r->worker));
        if (r->round != s.round)
            throw ProtocolError("worker " + std::to_string(r->worker) + " reported for round " +
                                std::to_string(r->round) + " during round " + std::to_string(s.round));
        if (r->gradient.size() != s.params.dim() + 1)
            throw ProtocolError("worker " + std::to_string(r->worker) + " sent a gradient of wrong dimension");
        if (by_worker[r->worker - 1] != nullptr)
            throw ProtocolError("duplicate report from worker " + std::to_string(r->worker));
        by_worker[r->worker - 1] = r;
    }
    for (std::size_t k = 0; k < s.workers; ++k)
        if (by_worker[k] == nullptr) throw ProtocolError("missing report from worker " + std::to_string(k + 1));
    Vec total = by_worker[0]->gradient;
    for (std::size_t k = 1; k < s.workers; ++k) axpy(1.0, by_worker[k]->gradient, total);
    const double alpha = s.cfg.alpha_at(s.round) / static_cast<double>(s.workers);
    s.params = robust_update(s.params, total, reg, s.cfg.robust.gamma0, alpha);
    ++s.round;
    return s;
}

namespace {

// Runs fn for every worker; rethrows the failure of the lowest worker index.
template <typename Fn>
void for_each_worker(std::size_t n, Fn&& fn) {
    std::vector<std::exception_ptr> errors(n);
    parallel_for(n, [&](std::size_t k) {
        try {
            fn(k);
        } catch (...) {
            errors[k] = std::current_exception();
        }
    });
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace

FederatedResult drfl_train(std::vector<std::vector<Datum>> shards, const LossModel& model, const Regularizer& reg,
                           const TrainerConfig& cfg, const RoundHook& hook) {
    cfg.robust.validate();
    if (!(cfg.alpha > 0.0) || !(cfg.eta > 0.0)) throw ConfigError("alpha and eta must be positive");
    auto workers = make_workers(std::move(shards), cfg.seed, cfg.batch_size);
    const std::size_t k_count = workers.size();
    ServerState server{initial_params(model, cfg), 0, k_count, cfg};
    FederatedResult out;
    out.metrics.reserve(cfg.iters);
    std::vector<RoundMessage> reports(k_count);
    for (std::size_t t = 0; t < cfg.iters; ++t) {
        const RoundMessage msg = server.broadcast();
        for_each_worker(k_count, [&](std::size_t k) { reports[k] = worker_round(workers[k], msg, model, cfg.cost, cfg); });
        double norms = 0.0;
        for (const auto& r : reports) norms += norm2(std::get<Report>(r).gradient);
        server = server_aggregate(std::move(server), reports, reg);
        out.metrics.push_back({server.round, server.params.gamma, norms / static_cast<double>(k_count)});
        if (hook) hook(server);
    }
    out.params = server.params;
    return out;
}

FederatedResult fedavg_train(std::vector<std::vector<Datum>> shards, const LossModel& model, const Regularizer& reg,
                             std::size_t local_epochs, const TrainerConfig& cfg, const RoundHook& hook) {
    if (local_epochs == 0) throw ConfigError("local_epochs must be positive");
    if (!(cfg.alpha > 0.0)) throw ConfigError("alpha must be positive");
    auto workers = make_workers(std::move(shards), cfg.seed, cfg.batch_size);
    const std::size_t k_count = workers.size();
    std::size_t total_items = 0;
    for (const auto& w : workers) total_items += w.shard.size();

    ServerState server{initial_params(model, cfg), 0, k_count, cfg};
    std::vector<ModelParams> local(k_count);
    std::vector<std::size_t> local_steps(k_count, 0);
    FederatedResult out;
    out.metrics.reserve(cfg.iters);
    for (std::size_t t = 0; t < cfg.iters; ++t) {
        for_each_worker(k_count, [&](std::size_t k) {
            WorkerState& w = workers[k];
            const std::size_t per_epoch = (w.shard.size() + w.batch_size - 1) / w.batch_size;
            ModelParams p = server.params;
            for (std::size_t s = 0; s < local_epochs * per_epoch; ++s) {
                const auto batch = w.sampler.next(w.batch_size);
                const Vec g = empirical_batch_gradient(model, p, w.shard, batch);
                p = erm_update(p, g, reg, cfg.alpha_at(local_steps[k]++));
            }
            local[k] = std::move(p);
        });
        auto weight = [&](std::size_t k) {
            return static_cast<double>(workers[k].shard.size()) / static_cast<double>(total_items);
        };
        Vec avg = scaled(weight(0), local[0].theta);
        double drift = 0.0;
        for (std::size_t k = 0; k < k_count; ++k) {
            if (k > 0) axpy(weight(k), local[k].theta, avg);
            drift += norm2(sub(local[k].theta, server.params.theta));
        }
        server.params.theta = std::move(avg);
        ++server.round;
        out.metrics.push_back({server.round, server.params.gamma, drift / static_cast<double>(k_count)});
        if (hook) hook(server);
    }
    out.params = server.params;
    return out;
}

}  // namespace wassrobust
