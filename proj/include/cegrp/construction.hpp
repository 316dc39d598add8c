#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "cegrp/route_cache.hpp"

// Regret insertion. Tasks are appended to route ends; each step inserts the
// task whose second-cheapest candidate exceeds its cheapest by the most, so
// tasks with few good options are placed early. A fresh one-task route is
// always a candidate while the fleet cap allows it. Best of rho independent
// constructions is kept, each on its own rng stream so a larger rho only adds
// candidates.

namespace cegrp {

class InfeasibleError : public std::runtime_error {
 public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace detail

struct EndCandidate {
    double delta = kInf;
    int route = -1;  // -1 = open a new route
    EdgeDir dir = EdgeDir::Forward;
};

struct RegretInfo {
    EndCandidate best;
    double second = kInf;
    // Infinite when fewer than two finite candidates exist, which forces the
    // task to the front of the insertion order.
    double rv = kInf;
};

class RegretInsertionState {
 public:
    RegretInsertionState(const Instance& inst, const TaskCache& cache)
        : inst_(&inst), cache_(&cache) {}

    RegretInfo evaluate(int slot) const {
        const auto& fleet = inst_->fleet;
        const bool is_node = cache_->is_node(slot);
        RegretInfo info;
        auto offer = [&](double delta, int route, EdgeDir dir) {
            if (delta < info.best.delta) {
                info.second = info.best.delta;
                info.best = {delta, route, dir};
            } else if (delta < info.second) {
                info.second = delta;
            }
        };
        for (std::size_t r = 0; r < sol_.routes.size(); ++r) {
            if (is_node && route_nodes_[r] >= fleet.node_capacity) continue;
            const auto p = cache_->append_placement(sol_.routes[r].tasks, slot);
            if (route_len_[r] + p.delta > fleet.flight_range + 1e-9) continue;
            offer(p.delta, static_cast<int>(r), p.dir);
        }
        if (!fleet.max_vehicles ||
            sol_.routes.size() < static_cast<std::size_t>(*fleet.max_vehicles)) {
            const double c = cache_->singleton_cost(slot);
            if (c <= fleet.flight_range + 1e-9) offer(c, -1, cache_->singleton_dir(slot));
        }
        if (info.best.delta < kInf && info.second < kInf) info.rv = info.second - info.best.delta;
        return info;
    }

    void insert(int slot, const EndCandidate& cand) {
        if (cand.delta >= kInf)
            throw InfeasibleError("task has no feasible insertion: " +
                                  std::to_string(cache_->ref(slot).id));
        if (cand.route < 0) {
            sol_.routes.push_back(Route{{cache_->ref(slot, cand.dir)}});
            route_len_.push_back(cand.delta);
            route_nodes_.push_back(cache_->is_node(slot) ? 1 : 0);
        } else {
            sol_.routes[cand.route].tasks.push_back(cache_->ref(slot, cand.dir));
            route_len_[cand.route] += cand.delta;
            route_nodes_[cand.route] += cache_->is_node(slot);
        }
    }

    const Solution& solution() const { return sol_; }
    double total() const {
        double t = 0.0;
        for (const double l : route_len_) t += l;
        return t;
    }

 private:
    const Instance* inst_;
    const TaskCache* cache_;
    Solution sol_;
    std::vector<double> route_len_;
    std::vector<int> route_nodes_;
};

// One construction pass over all tasks.
inline Solution regret_insertion(const Instance& inst, const TaskCache& cache,
                                 std::mt19937_64& rng, double* total_out = nullptr) {
    RegretInsertionState state(inst, cache);
    std::vector<int> pending(cache.size());
    for (int s = 0; s < cache.size(); ++s) pending[s] = s;

    std::vector<int> tied;
    while (!pending.empty()) {
        std::vector<RegretInfo> infos(pending.size());
        double max_rv = -kInf;
        for (std::size_t i = 0; i < pending.size(); ++i) {
            infos[i] = state.evaluate(pending[i]);
            if (infos[i].rv > max_rv) max_rv = infos[i].rv;
        }
        tied.clear();
        for (std::size_t i = 0; i < pending.size(); ++i)
            if (infos[i].rv == max_rv) tied.push_back(static_cast<int>(i));
        const int pick =
            tied.size() == 1
                ? tied[0]
                : tied[std::uniform_int_distribution<std::size_t>(0, tied.size() - 1)(rng)];
        state.insert(pending[pick], infos[pick].best);
        pending.erase(pending.begin() + pick);
    }
    if (total_out) *total_out = state.total();
    return state.solution();
}

// Best of rho constructions under the center objective.
inline Solution regret_construct(const Instance& inst, const TaskCache& cache,
                                 std::uint64_t seed, int rho, double* total_out = nullptr) {
    if (rho < 1) throw std::invalid_argument("rho must be positive");
    Solution best;
    double best_total = kInf;
    for (int j = 0; j < rho; ++j) {
        std::mt19937_64 rng(detail::mix_seed(seed, static_cast<std::uint64_t>(j)));
        double total = 0.0;
        Solution cand = regret_insertion(inst, cache, rng, &total);
        if (total < best_total) {
            best_total = total;
            best = std::move(cand);
        }
    }
    if (total_out) *total_out = best_total;
    return best;
}

}  // namespace cegrp
