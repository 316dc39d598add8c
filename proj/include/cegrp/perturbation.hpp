#pragma once

#include <random>
#include <vector>

#include "cegrp/neighborhoods.hpp"

// Perturbation: pair a random destroy operator with a random repair operator
// and apply them, retrying a few times until the solution actually changes.
// Destroy intensity tau is owned by the caller and grows while the search
// stagnates. All operators preserve coverage: whatever is removed is
// reinserted before returning.

namespace cegrp {

namespace detail {

inline void erase_positions(Solution& sol,
                            std::vector<std::pair<std::size_t, std::size_t>> positions) {
    // Descending position order per route keeps earlier indices stable.
    std::sort(positions.begin(), positions.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first < b.first : a.second > b.second;
    });
    for (const auto& [r, p] : positions)
        sol.routes[r].tasks.erase(sol.routes[r].tasks.begin() + p);
    sol.routes.erase(std::remove_if(sol.routes.begin(), sol.routes.end(),
                                    [](const Route& r) { return r.tasks.empty(); }),
                     sol.routes.end());
}

inline std::vector<std::pair<std::size_t, std::size_t>> all_positions(const Solution& sol,
                                                                      TaskKind* kind = nullptr) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t r = 0; r < sol.routes.size(); ++r)
        for (std::size_t p = 0; p < sol.routes[r].tasks.size(); ++p)
            if (!kind || sol.routes[r].tasks[p].kind == *kind) out.emplace_back(r, p);
    return out;
}

inline std::vector<TaskRef> remove_random_of(Solution& sol, TaskKind* kind, int tau,
                                             std::mt19937_64& rng) {
    auto positions = all_positions(sol, kind);
    const int take = std::min<int>(tau, static_cast<int>(positions.size()));
    for (int i = 0; i < take; ++i) {
        const std::size_t j =
            std::uniform_int_distribution<std::size_t>(i, positions.size() - 1)(rng);
        std::swap(positions[i], positions[j]);
    }
    positions.resize(take);
    std::vector<TaskRef> removed;
    for (const auto& [r, p] : positions) removed.push_back(sol.routes[r].tasks[p]);
    erase_positions(sol, positions);
    return removed;
}

}  // namespace detail

inline std::vector<TaskRef> destroy_random(Solution& sol, int tau, std::mt19937_64& rng) {
    return detail::remove_random_of(sol, nullptr, tau, rng);
}

inline std::vector<TaskRef> destroy_node(Solution& sol, int tau, std::mt19937_64& rng) {
    TaskKind k = TaskKind::Node;
    return detail::remove_random_of(sol, &k, tau, rng);
}

inline std::vector<TaskRef> destroy_edge(Solution& sol, int tau, std::mt19937_64& rng) {
    TaskKind k = TaskKind::Edge;
    return detail::remove_random_of(sol, &k, tau, rng);
}

// Removes the task with the highest removal cost, recomputing costs after
// every removal. Exact cost ties go to nodes before edges, then lower ids.
inline std::vector<TaskRef> destroy_worst(Solution& sol, const TaskCache& cache, int tau) {
    std::vector<TaskRef> removed;
    for (int step = 0; step < tau; ++step) {
        double best = -kInf;
        std::size_t best_r = 0, best_p = 0;
        bool found = false;
        for (std::size_t r = 0; r < sol.routes.size(); ++r) {
            const auto& tasks = sol.routes[r].tasks;
            for (std::size_t p = 0; p < tasks.size(); ++p) {
                const double delta = cache.removal_delta(tasks, p);
                bool better = delta > best;
                if (!better && delta == best) {
                    const TaskRef& cand = tasks[p];
                    const TaskRef& cur = sol.routes[best_r].tasks[best_p];
                    better = std::pair{cand.kind == TaskKind::Edge, cand.id} <
                             std::pair{cur.kind == TaskKind::Edge, cur.id};
                }
                if (better) {
                    best = delta;
                    best_r = r;
                    best_p = p;
                    found = true;
                }
            }
        }
        if (!found) break;
        removed.push_back(sol.routes[best_r].tasks[best_p]);
        sol.routes[best_r].tasks.erase(sol.routes[best_r].tasks.begin() + best_p);
        if (sol.routes[best_r].tasks.empty()) sol.routes.erase(sol.routes.begin() + best_r);
    }
    return removed;
}

// Reinserts tasks in removal order, each into a uniformly random feasible
// slot (route, position, orientation). A task with no feasible slot opens a
// new route.
inline void repair_random(Solution& sol, const Instance& inst, const TaskCache& cache,
                          const std::vector<TaskRef>& removed, std::mt19937_64& rng) {
    const auto& fleet = inst.fleet;
    std::vector<double> len(sol.routes.size());
    std::vector<int> nodes(sol.routes.size());
    for (std::size_t r = 0; r < sol.routes.size(); ++r) {
        len[r] = cache.length(sol.routes[r].tasks);
        nodes[r] = count_nodes(sol.routes[r].tasks);
    }
    struct Slot {
        std::size_t route, pos;
        EdgeDir dir;
        double delta;
    };
    std::vector<Slot> slots;
    for (const TaskRef& t : removed) {
        const int slot = cache.slot(t);
        slots.clear();
        for (std::size_t r = 0; r < sol.routes.size(); ++r) {
            if (cache.is_node(slot) && nodes[r] >= fleet.node_capacity) continue;
            const auto& tasks = sol.routes[r].tasks;
            for (std::size_t pos = 0; pos <= tasks.size(); ++pos) {
                for (const EdgeDir dir : {EdgeDir::Forward, EdgeDir::Reverse}) {
                    if (dir == EdgeDir::Reverse && cache.is_node(slot)) continue;
                    const double delta =
                        cache.insertion_delta(tasks, pos, cache.ref(slot, dir));
                    if (len[r] + delta > fleet.flight_range + 1e-9) continue;
                    slots.push_back({r, pos, dir, delta});
                }
            }
        }
        if (slots.empty()) {
            if (fleet.max_vehicles &&
                sol.routes.size() >= static_cast<std::size_t>(*fleet.max_vehicles))
                throw InfeasibleError("random repair cannot place task within the fleet cap");
            const double c = cache.singleton_cost(slot);
            if (c > fleet.flight_range + 1e-9)
                throw InfeasibleError("task exceeds flight range on its own");
            sol.routes.push_back(Route{{cache.ref(slot, cache.singleton_dir(slot))}});
            len.push_back(c);
            nodes.push_back(cache.is_node(slot) ? 1 : 0);
        } else {
            const Slot& s =
                slots[std::uniform_int_distribution<std::size_t>(0, slots.size() - 1)(rng)];
            auto& tasks = sol.routes[s.route].tasks;
            tasks.insert(tasks.begin() + s.pos, cache.ref(slot, s.dir));
            len[s.route] += s.delta;
            nodes[s.route] += cache.is_node(slot);
        }
    }
}

// Always inserts the globally cheapest pending task next, at its best
// position. Tasks nothing can take are costed at their new-route round trip.
inline void repair_greedy(Solution& sol, const Instance& inst, const TaskCache& cache,
                          std::vector<TaskRef> pending) {
    const auto& fleet = inst.fleet;
    std::vector<double> len(sol.routes.size());
    std::vector<int> nodes(sol.routes.size());
    for (std::size_t r = 0; r < sol.routes.size(); ++r) {
        len[r] = cache.length(sol.routes[r].tasks);
        nodes[r] = count_nodes(sol.routes[r].tasks);
    }
    while (!pending.empty()) {
        double best_cost = kInf;
        std::size_t best_task = 0;
        int best_route = -1;
        TaskCache::Placement best_place;
        for (std::size_t i = 0; i < pending.size(); ++i) {
            const int slot = cache.slot(pending[i]);
            double cost = kInf;
            int route = -1;
            TaskCache::Placement place;
            for (std::size_t r = 0; r < sol.routes.size(); ++r) {
                if (cache.is_node(slot) && nodes[r] >= fleet.node_capacity) continue;
                const auto p = cache.best_placement(sol.routes[r].tasks, slot);
                if (len[r] + p.delta > fleet.flight_range + 1e-9) continue;
                if (p.delta < cost) {
                    cost = p.delta;
                    route = static_cast<int>(r);
                    place = p;
                }
            }
            if (route < 0) {
                const double c = cache.singleton_cost(slot);
                const bool cap_ok =
                    !fleet.max_vehicles ||
                    sol.routes.size() < static_cast<std::size_t>(*fleet.max_vehicles);
                if (cap_ok && c <= fleet.flight_range + 1e-9) cost = c;
            }
            if (cost < best_cost) {
                best_cost = cost;
                best_task = i;
                best_route = route;
                best_place = place;
            }
        }
        if (best_cost >= kInf)
            throw InfeasibleError("greedy repair cannot place any remaining task");
        const int slot = cache.slot(pending[best_task]);
        if (best_route >= 0) {
            auto& tasks = sol.routes[best_route].tasks;
            tasks.insert(tasks.begin() + best_place.pos, cache.ref(slot, best_place.dir));
            len[best_route] += best_place.delta;
            nodes[best_route] += cache.is_node(slot);
        } else {
            sol.routes.push_back(Route{{cache.ref(slot, cache.singleton_dir(slot))}});
            len.push_back(cache.singleton_cost(slot));
            nodes.push_back(cache.is_node(slot) ? 1 : 0);
        }
        pending.erase(pending.begin() + best_task);
    }
}

constexpr int kDestroyOps = 4;
constexpr int kRepairOps = 3;

inline const char* destroy_name(int op) {
    switch (op) {
        case 0: return "random";
        case 1: return "worst";
        case 2: return "node";
        case 3: return "edge";
    }
    return "?";
}

inline const char* repair_name(int op) {
    switch (op) {
        case 0: return "regret";
        case 1: return "random";
        case 2: return "greedy";
    }
    return "?";
}

struct PerturbOutcome {
    Solution solution;
    int destroy_op = -1;
    int repair_op = -1;
    bool changed = false;
};

// Up to lambda attempts with freshly drawn operator pairs; the first attempt
// that produces a different solution wins, otherwise the input is returned.
inline PerturbOutcome perturb(const Solution& sol, const Instance& inst, const TaskCache& cache,
                              int tau, std::mt19937_64& rng, int lambda = 5) {
    PerturbOutcome out;
    for (int attempt = 0; attempt < lambda; ++attempt) {
        const int d = std::uniform_int_distribution<int>(0, kDestroyOps - 1)(rng);
        const int rep = std::uniform_int_distribution<int>(0, kRepairOps - 1)(rng);
        out.destroy_op = d;
        out.repair_op = rep;

        Solution work = sol;
        std::vector<TaskRef> removed;
        switch (d) {
            case 0: removed = destroy_random(work, tau, rng); break;
            case 1: removed = destroy_worst(work, cache, tau); break;
            case 2: removed = destroy_node(work, tau, rng); break;
            case 3: removed = destroy_edge(work, tau, rng); break;
        }
        if (removed.empty()) continue;
        try {
            switch (rep) {
                case 0: regret_repair(work, inst, cache, std::move(removed)); break;
                case 1: repair_random(work, inst, cache, removed, rng); break;
                case 2: repair_greedy(work, inst, cache, std::move(removed)); break;
            }
        } catch (const InfeasibleError&) {
            continue;  // tight fleet corner, redraw operators
        }
        if (work != sol) {
            out.solution = std::move(work);
            out.changed = true;
            return out;
        }
    }
    out.solution = sol;
    return out;
}

}  // namespace cegrp
