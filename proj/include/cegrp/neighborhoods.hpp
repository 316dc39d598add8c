#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "cegrp/construction.hpp"
#include "cegrp/route_cache.hpp"

// Variable neighborhood descent over five structures, explored in a fixed
// order and restarted from the first one after every improvement: segment
// reversal inside a route, edge orientation flips, a randomized
// destroy-and-repair probe, relocation of short task chains between routes,
// and chain exchanges. All moves keep node capacity and flight range intact;
// lengths are compared with a small positive gain threshold so floating-point
// noise cannot loop forever.

namespace cegrp {

struct VndParams {
    int pass_limit = 200;   // hard cap on neighborhood applications
    int zeta_min = 2;       // destroy size range for the probe
    int zeta_max = 8;
    int patience = 5;       // probe retries before giving up
    int chain_limit = 3;    // longest chain moved or exchanged
    double min_gain = 1e-9;
};

// Best-improvement segment reversal. Reversing tasks [i, j] changes only the
// two boundary legs: interior legs are symmetric and contained edges flip
// orientation, which swaps their endpoints consistently.
inline bool two_opt_best(Solution& sol, const TaskCache& cache, double min_gain = 1e-9) {
    double best = -min_gain;
    int best_r = -1;
    std::size_t best_i = 0, best_j = 0;
    for (std::size_t r = 0; r < sol.routes.size(); ++r) {
        const auto& tasks = sol.routes[r].tasks;
        for (std::size_t i = 0; i + 1 < tasks.size(); ++i) {
            const Point2 before = cache.before(tasks, i);
            const Point2 entry_i = cache.entry(tasks[i]);
            for (std::size_t j = i + 1; j < tasks.size(); ++j) {
                const Point2 after = cache.after(tasks, j + 1);
                const Point2 exit_j = cache.exit(tasks[j]);
                const double delta = dist(before, exit_j) + dist(entry_i, after) -
                                     dist(before, entry_i) - dist(exit_j, after);
                if (delta < best) {
                    best = delta;
                    best_r = static_cast<int>(r);
                    best_i = i;
                    best_j = j;
                }
            }
        }
    }
    if (best_r < 0) return false;
    auto& tasks = sol.routes[best_r].tasks;
    std::reverse(tasks.begin() + best_i, tasks.begin() + best_j + 1);
    for (std::size_t k = best_i; k <= best_j; ++k) {
        if (tasks[k].kind == TaskKind::Edge)
            tasks[k].orientation = tasks[k].orientation == EdgeDir::Forward ? EdgeDir::Reverse
                                                                            : EdgeDir::Forward;
    }
    return true;
}

// First-improvement orientation flip, required edges scanned in id order.
inline bool flip_first(Solution& sol, const TaskCache& cache, double min_gain = 1e-9) {
    std::vector<std::tuple<int, std::size_t, std::size_t>> edges;  // id, route, pos
    for (std::size_t r = 0; r < sol.routes.size(); ++r)
        for (std::size_t p = 0; p < sol.routes[r].tasks.size(); ++p)
            if (sol.routes[r].tasks[p].kind == TaskKind::Edge)
                edges.emplace_back(sol.routes[r].tasks[p].id, r, p);
    std::sort(edges.begin(), edges.end());
    for (const auto& [id, r, p] : edges) {
        auto& tasks = sol.routes[r].tasks;
        const TaskRef& t = tasks[p];
        const TaskRef flipped = TaskRef::edge(
            id, t.orientation == EdgeDir::Forward ? EdgeDir::Reverse : EdgeDir::Forward);
        const Point2 before = cache.before(tasks, p);
        const Point2 after = cache.after(tasks, p + 1);
        const double delta = dist(before, cache.entry(flipped)) +
                             dist(cache.exit(flipped), after) -
                             dist(before, cache.entry(t)) - dist(cache.exit(t), after);
        if (delta < -min_gain) {
            tasks[p] = flipped;
            return true;
        }
    }
    return false;
}

// Best-position reinsertion of the pending tasks, highest regret first. The
// regret of a task is the gap between its best and second-best route; with
// fewer than two feasible routes it is infinite, which schedules the task
// immediately. A task no existing route can take opens a new route.
inline void regret_repair(Solution& sol, const Instance& inst, const TaskCache& cache,
                          std::vector<TaskRef> pending) {
    std::vector<double> len(sol.routes.size());
    std::vector<int> nodes(sol.routes.size());
    for (std::size_t r = 0; r < sol.routes.size(); ++r) {
        len[r] = cache.length(sol.routes[r].tasks);
        nodes[r] = count_nodes(sol.routes[r].tasks);
    }
    const auto& fleet = inst.fleet;

    while (!pending.empty()) {
        struct Option {
            double best = kInf, second = kInf;
            int route = -1;
            TaskCache::Placement place;
            double rv = kInf;
        };
        std::vector<Option> opts(pending.size());
        std::size_t pick = 0;
        for (std::size_t i = 0; i < pending.size(); ++i) {
            const int slot = cache.slot(pending[i]);
            Option& o = opts[i];
            for (std::size_t r = 0; r < sol.routes.size(); ++r) {
                if (cache.is_node(slot) && nodes[r] >= fleet.node_capacity) continue;
                const auto p = cache.best_placement(sol.routes[r].tasks, slot);
                if (len[r] + p.delta > fleet.flight_range + 1e-9) continue;
                if (p.delta < o.best) {
                    o.second = o.best;
                    o.best = p.delta;
                    o.route = static_cast<int>(r);
                    o.place = p;
                } else if (p.delta < o.second) {
                    o.second = p.delta;
                }
            }
            if (o.best < kInf && o.second < kInf) o.rv = o.second - o.best;
            if (o.rv > opts[pick].rv) pick = i;
        }

        const Option& o = opts[pick];
        const int slot = cache.slot(pending[pick]);
        if (o.route >= 0) {
            auto& tasks = sol.routes[o.route].tasks;
            tasks.insert(tasks.begin() + o.place.pos, cache.ref(slot, o.place.dir));
            len[o.route] += o.place.delta;
            nodes[o.route] += cache.is_node(slot);
        } else {
            if (fleet.max_vehicles &&
                sol.routes.size() >= static_cast<std::size_t>(*fleet.max_vehicles))
                throw InfeasibleError("repair cannot place task within the fleet cap");
            const double c = cache.singleton_cost(slot);
            if (c > fleet.flight_range + 1e-9)
                throw InfeasibleError("task exceeds flight range on its own");
            sol.routes.push_back(Route{{cache.ref(slot, cache.singleton_dir(slot))}});
            len.push_back(c);
            nodes.push_back(cache.is_node(slot) ? 1 : 0);
        }
        pending.erase(pending.begin() + pick);
    }
}

// Remove a few random tasks and repair; keep the result only if it is
// strictly better. Retries a handful of times with fresh draws.
inline bool destroy_repair_probe(Solution& sol, const Instance& inst, const TaskCache& cache,
                                 std::mt19937_64& rng, const VndParams& params = {}) {
    const int total_tasks = static_cast<int>(sol.task_count());
    if (total_tasks < 2) return false;
    const double current = total_distance(sol, inst);
    for (int attempt = 0; attempt < params.patience; ++attempt) {
        const int hi = std::min(params.zeta_max, total_tasks);
        const int lo = std::min(params.zeta_min, hi);
        const int zeta = std::uniform_int_distribution<int>(lo, hi)(rng);

        std::vector<std::pair<std::size_t, std::size_t>> slots;
        for (std::size_t r = 0; r < sol.routes.size(); ++r)
            for (std::size_t p = 0; p < sol.routes[r].tasks.size(); ++p) slots.emplace_back(r, p);
        for (int i = 0; i < zeta; ++i) {
            const std::size_t j =
                std::uniform_int_distribution<std::size_t>(i, slots.size() - 1)(rng);
            std::swap(slots[i], slots[j]);
        }
        slots.resize(zeta);
        std::sort(slots.begin(), slots.end(), [](const auto& a, const auto& b) {
            return a.first != b.first ? a.first < b.first : a.second > b.second;
        });

        Solution trial = sol;
        std::vector<TaskRef> removed;
        for (const auto& [r, p] : slots) {
            removed.push_back(trial.routes[r].tasks[p]);
            trial.routes[r].tasks.erase(trial.routes[r].tasks.begin() + p);
        }
        trial.routes.erase(std::remove_if(trial.routes.begin(), trial.routes.end(),
                                          [](const Route& r) { return r.tasks.empty(); }),
                           trial.routes.end());
        try {
            regret_repair(trial, inst, cache, std::move(removed));
        } catch (const InfeasibleError&) {
            continue;  // this draw painted itself into a corner, try another
        }
        if (total_distance(trial, inst) < current - params.min_gain) {
            sol = std::move(trial);
            return true;
        }
    }
    return false;
}

namespace detail {

struct ChainInfo {
    Point2 entry, exit;
    double inner = 0.0;  // entry-to-exit length of the chain
    int nodes = 0;
};

inline ChainInfo chain_info(const std::vector<TaskRef>& tasks, std::size_t i, std::size_t len,
                            const TaskCache& cache) {
    ChainInfo c;
    c.entry = cache.entry(tasks[i]);
    c.exit = cache.exit(tasks[i + len - 1]);
    for (std::size_t k = i; k < i + len; ++k) {
        c.inner += cache.internal(tasks[k]);
        if (k + 1 < i + len) c.inner += dist(cache.exit(tasks[k]), cache.entry(tasks[k + 1]));
        c.nodes += tasks[k].kind == TaskKind::Node;
    }
    return c;
}

// Length freed by cutting the chain [i, i+len) out of the route.
inline double chain_removal_delta(const std::vector<TaskRef>& tasks, std::size_t i,
                                  std::size_t len, const ChainInfo& c, const TaskCache& cache) {
    const Point2 before = cache.before(tasks, i);
    const Point2 after = cache.after(tasks, i + len);
    return dist(before, c.entry) + c.inner + dist(c.exit, after) - dist(before, after);
}

inline double chain_insertion_delta(const std::vector<TaskRef>& tasks, std::size_t pos,
                                    const ChainInfo& c, const TaskCache& cache) {
    const Point2 p = cache.before(tasks, pos);
    const Point2 q = cache.after(tasks, pos);
    return dist(p, c.entry) + c.inner + dist(c.exit, q) - dist(p, q);
}

}  // namespace detail

// Relocate a chain of consecutive tasks into another route. Chain lengths are
// tried in ascending order; the best move of the first improving length wins.
inline bool chain_insert(Solution& sol, const Instance& inst, const TaskCache& cache,
                         const VndParams& params = {}) {
    const auto& fleet = inst.fleet;
    std::vector<double> len(sol.routes.size());
    std::vector<int> nodes(sol.routes.size());
    for (std::size_t r = 0; r < sol.routes.size(); ++r) {
        len[r] = cache.length(sol.routes[r].tasks);
        nodes[r] = count_nodes(sol.routes[r].tasks);
    }
    for (int gamma = 1; gamma <= params.chain_limit; ++gamma) {
        double best = -params.min_gain;
        std::size_t best_a = 0, best_i = 0, best_b = 0, best_pos = 0;
        bool found = false;
        for (std::size_t a = 0; a < sol.routes.size(); ++a) {
            const auto& src = sol.routes[a].tasks;
            if (src.size() < static_cast<std::size_t>(gamma)) continue;
            for (std::size_t i = 0; i + gamma <= src.size(); ++i) {
                const auto info = detail::chain_info(src, i, gamma, cache);
                const double removal = detail::chain_removal_delta(src, i, gamma, info, cache);
                for (std::size_t b = 0; b < sol.routes.size(); ++b) {
                    if (b == a) continue;
                    if (info.nodes > 0 && nodes[b] + info.nodes > fleet.node_capacity) continue;
                    const auto& dst = sol.routes[b].tasks;
                    for (std::size_t pos = 0; pos <= dst.size(); ++pos) {
                        const double ins =
                            detail::chain_insertion_delta(dst, pos, info, cache);
                        if (len[b] + ins > fleet.flight_range + 1e-9) continue;
                        const double delta = ins - removal;
                        if (delta < best) {
                            best = delta;
                            best_a = a;
                            best_i = i;
                            best_b = b;
                            best_pos = pos;
                            found = true;
                        }
                    }
                }
            }
        }
        if (found) {
            auto& src = sol.routes[best_a].tasks;
            std::vector<TaskRef> chain(src.begin() + best_i, src.begin() + best_i + gamma);
            src.erase(src.begin() + best_i, src.begin() + best_i + gamma);
            auto& dst = sol.routes[best_b].tasks;
            dst.insert(dst.begin() + best_pos, chain.begin(), chain.end());
            if (src.empty()) sol.routes.erase(sol.routes.begin() + best_a);
            return true;
        }
    }
    return false;
}

// Swap a chain from one route with a chain from another, both keeping their
// internal order. Outer loop grows the first chain, inner loop the second.
inline bool chain_exchange(Solution& sol, const Instance& inst, const TaskCache& cache,
                           const VndParams& params = {}) {
    const auto& fleet = inst.fleet;
    std::vector<double> len(sol.routes.size());
    std::vector<int> nodes(sol.routes.size());
    for (std::size_t r = 0; r < sol.routes.size(); ++r) {
        len[r] = cache.length(sol.routes[r].tasks);
        nodes[r] = count_nodes(sol.routes[r].tasks);
    }
    for (int g1 = 1; g1 <= params.chain_limit; ++g1) {
        for (int g2 = 1; g2 <= params.chain_limit; ++g2) {
            double best = -params.min_gain;
            std::size_t best_a = 0, best_i = 0, best_b = 0, best_j = 0;
            bool found = false;
            for (std::size_t a = 0; a < sol.routes.size(); ++a) {
                const auto& ta = sol.routes[a].tasks;
                if (ta.size() < static_cast<std::size_t>(g1)) continue;
                for (std::size_t i = 0; i + g1 <= ta.size(); ++i) {
                    const auto ca = detail::chain_info(ta, i, g1, cache);
                    const Point2 before_a = cache.before(ta, i);
                    const Point2 after_a = cache.after(ta, i + g1);
                    for (std::size_t b = 0; b < sol.routes.size(); ++b) {
                        if (b == a) continue;
                        const auto& tb = sol.routes[b].tasks;
                        if (tb.size() < static_cast<std::size_t>(g2)) continue;
                        for (std::size_t j = 0; j + g2 <= tb.size(); ++j) {
                            const auto cb = detail::chain_info(tb, j, g2, cache);
                            if (nodes[a] - ca.nodes + cb.nodes > fleet.node_capacity) continue;
                            if (nodes[b] - cb.nodes + ca.nodes > fleet.node_capacity) continue;
                            const double da = dist(before_a, cb.entry) + cb.inner +
                                              dist(cb.exit, after_a) -
                                              dist(before_a, ca.entry) - ca.inner -
                                              dist(ca.exit, after_a);
                            const Point2 before_b = cache.before(tb, j);
                            const Point2 after_b = cache.after(tb, j + g2);
                            const double db = dist(before_b, ca.entry) + ca.inner +
                                              dist(ca.exit, after_b) -
                                              dist(before_b, cb.entry) - cb.inner -
                                              dist(cb.exit, after_b);
                            if (len[a] + da > fleet.flight_range + 1e-9) continue;
                            if (len[b] + db > fleet.flight_range + 1e-9) continue;
                            if (da + db < best) {
                                best = da + db;
                                best_a = a;
                                best_i = i;
                                best_b = b;
                                best_j = j;
                                found = true;
                            }
                        }
                    }
                }
            }
            if (found) {
                auto& ta = sol.routes[best_a].tasks;
                auto& tb = sol.routes[best_b].tasks;
                std::vector<TaskRef> chain_a(ta.begin() + best_i, ta.begin() + best_i + g1);
                std::vector<TaskRef> chain_b(tb.begin() + best_j, tb.begin() + best_j + g2);
                ta.erase(ta.begin() + best_i, ta.begin() + best_i + g1);
                ta.insert(ta.begin() + best_i, chain_b.begin(), chain_b.end());
                tb.erase(tb.begin() + best_j, tb.begin() + best_j + g2);
                tb.insert(tb.begin() + best_j, chain_a.begin(), chain_a.end());
                return true;
            }
        }
    }
    return false;
}

// Descent driver: restart from the first structure after every improvement,
// stop once the last one fails or the pass budget runs out.
inline bool vnd(Solution& sol, const Instance& inst, const TaskCache& cache,
                std::mt19937_64& rng, const VndParams& params = {}) {
    bool any = false;
    int mu = 1;
    for (int pass = 0; mu <= 5 && pass < params.pass_limit; ++pass) {
        bool improved = false;
        switch (mu) {
            case 1: improved = two_opt_best(sol, cache, params.min_gain); break;
            case 2: improved = flip_first(sol, cache, params.min_gain); break;
            case 3: improved = destroy_repair_probe(sol, inst, cache, rng, params); break;
            case 4: improved = chain_insert(sol, inst, cache, params); break;
            case 5: improved = chain_exchange(sol, inst, cache, params); break;
        }
        if (improved) {
            mu = 1;
            any = true;
        } else {
            ++mu;
        }
    }
    return any;
}

}  // namespace cegrp
