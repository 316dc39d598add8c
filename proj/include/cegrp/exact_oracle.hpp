#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <vector>

#include "cegrp/close_enough.hpp"
#include "cegrp/route_cache.hpp"
#include "cegrp/solution.hpp"

// Exact reference solvers, usable only on small inputs. solve_exact_global
// enumerates every partition of the task set into feasible routes and every
// task order and edge orientation inside each route, evaluating the
// close-enough objective after point optimization. refine_route_exact finds
// the optimal center-based order of one route by subset dynamic programming.

namespace cegrp {

struct RefineResult {
    Route route;
    double length = 0.0;
    bool refined = false;  // false when the route exceeded the size cap
};

// Optimal task order and edge orientations for a single route under the
// center-based objective. States are (visited subset, last task, exit side);
// nodes have one exit side, edges two.
inline RefineResult refine_route_exact(const Route& route, const Instance& inst,
                                       int max_tasks = 12) {
    RefineResult res{route, route_length(route, inst), false};
    const int k = static_cast<int>(route.tasks.size());
    if (k == 0 || k > max_tasks) return res;

    struct Local {
        Point2 entry[2], exit[2];
        double internal = 0.0;
        int orients = 1;
    };
    std::vector<Local> loc(k);
    for (int i = 0; i < k; ++i) {
        const TaskRef& t = route.tasks[i];
        if (t.kind == TaskKind::Node) {
            const Point2 c = inst.node(t.id).center;
            loc[i] = {{c, c}, {c, c}, 0.0, 1};
        } else {
            const auto& e = inst.edge(t.id);
            loc[i] = {{e.a, e.b}, {e.b, e.a}, e.length(), 2};
        }
    }

    const int full = (1 << k) - 1;
    const auto idx = [k](int mask, int last, int o) { return (mask * k + last) * 2 + o; };
    std::vector<double> dp(static_cast<std::size_t>(full + 1) * k * 2, kInf);
    std::vector<int> parent(dp.size(), -1);  // encodes last*2+o of the predecessor

    for (int i = 0; i < k; ++i)
        for (int o = 0; o < loc[i].orients; ++o)
            dp[idx(1 << i, i, o)] = dist(inst.depot, loc[i].entry[o]) + loc[i].internal;

    for (int mask = 1; mask <= full; ++mask) {
        for (int last = 0; last < k; ++last) {
            if (!(mask & (1 << last))) continue;
            for (int o = 0; o < loc[last].orients; ++o) {
                const double cur = dp[idx(mask, last, o)];
                if (cur >= kInf) continue;
                for (int j = 0; j < k; ++j) {
                    if (mask & (1 << j)) continue;
                    for (int o2 = 0; o2 < loc[j].orients; ++o2) {
                        const double cand = cur + dist(loc[last].exit[o], loc[j].entry[o2]) +
                                            loc[j].internal;
                        const int t = idx(mask | (1 << j), j, o2);
                        if (cand < dp[t]) {
                            dp[t] = cand;
                            parent[t] = last * 2 + o;
                        }
                    }
                }
            }
        }
    }

    int best_last = -1, best_o = 0;
    double best = kInf;
    for (int last = 0; last < k; ++last) {
        for (int o = 0; o < loc[last].orients; ++o) {
            const double cand = dp[idx(full, last, o)] + dist(loc[last].exit[o], inst.depot);
            if (cand < best) {
                best = cand;
                best_last = last;
                best_o = o;
            }
        }
    }

    std::vector<TaskRef> order(k);
    int mask = full, last = best_last, o = best_o;
    for (int pos = k; pos-- > 0;) {
        TaskRef t = route.tasks[last];
        if (t.kind == TaskKind::Edge)
            t.orientation = o == 0 ? EdgeDir::Forward : EdgeDir::Reverse;
        order[pos] = t;
        const int enc = parent[idx(mask, last, o)];
        mask &= ~(1 << last);
        if (enc < 0) break;
        last = enc / 2;
        o = enc % 2;
    }

    res.route.tasks = std::move(order);
    res.length = best;
    res.refined = true;
    return res;
}

struct ExactResult {
    Solution solution;
    PointAssignment points;
    double objective = kInf;
    bool solved = false;    // size cap respected
    bool feasible = false;  // some partition satisfies Q, L and the fleet cap
};

namespace detail {

struct BlockBest {
    double f = kInf;  // optimized close-enough length of the best order
    std::vector<TaskRef> order;
    std::vector<Point2> points;
    bool feasible = false;
};

struct ExactContext {
    const Instance* inst;
    std::vector<TaskRef> tasks;      // canonical task list, nodes then edges
    std::vector<double> internal;
    double slack = 0.0;              // 2 * sum of all radii, for the pruning bound
    TouringParams touring;
    std::map<std::uint32_t, BlockBest> memo;
};

// Enumerates orders of the tasks in `mask` depth first, carrying the partial
// center length. Lower bound used for pruning: remaining internals plus the
// straight return leg, minus twice the total radius the points could save.
inline void block_orders(ExactContext& ctx, std::uint32_t mask, std::vector<int>& order,
                         std::uint32_t used, Point2 exit_pt, double partial_len,
                         double remaining_internal, BlockBest& best) {
    const Instance& inst = *ctx.inst;
    if (used == mask) {
        const double center_len = partial_len + dist(exit_pt, inst.depot);
        if (center_len > inst.fleet.flight_range + 1e-9) return;
        if (order.size() >= 2 && order.front() > order.back()) return;  // reversal duplicate
        Route r;
        for (const int enc : order) {
            TaskRef t = ctx.tasks[enc / 2];
            if (t.kind == TaskKind::Edge)
                t.orientation = enc % 2 == 0 ? EdgeDir::Forward : EdgeDir::Reverse;
            r.tasks.push_back(t);
        }
        const TouringResult tr = optimize_route_points(r, inst, ctx.touring);
        if (tr.length < best.f) {
            best.f = tr.length;
            best.order = r.tasks;
            best.points = tr.points;
        }
        best.feasible = true;
        return;
    }
    for (std::uint32_t i = 0; i < ctx.tasks.size(); ++i) {
        const std::uint32_t bit = 1u << i;
        if (!(mask & bit) || (used & bit)) continue;
        const TaskRef& t = ctx.tasks[i];
        const int orients = t.kind == TaskKind::Edge ? 2 : 1;
        for (int o = 0; o < orients; ++o) {
            TaskRef placed = t;
            if (t.kind == TaskKind::Edge)
                placed.orientation = o == 0 ? EdgeDir::Forward : EdgeDir::Reverse;
            const double step = dist(exit_pt, task_entry(inst, placed)) + ctx.internal[i];
            const double len = partial_len + step;
            const double rem = remaining_internal - ctx.internal[i];
            const Point2 out = task_exit(inst, placed);
            // Lower bound on any completion: the remaining legs plus internals
            // stretch from `out` to the depot, and the internals are walked in
            // full, so completion >= max(rem, dist(out, depot)). The two are
            // not additive: edge internals also advance toward the depot.
            const double bound = len + std::max(rem, dist(out, inst.depot));
            if (bound > inst.fleet.flight_range + 1e-9) continue;
            if (bound - ctx.slack >= best.f) continue;
            order.push_back(static_cast<int>(i) * 2 + o);
            block_orders(ctx, mask, order, used | bit, out, len, rem, best);
            order.pop_back();
        }
    }
}

inline const BlockBest& block_best(ExactContext& ctx, std::uint32_t mask) {
    auto it = ctx.memo.find(mask);
    if (it != ctx.memo.end()) return it->second;
    BlockBest best;
    int nodes = 0;
    double remaining_internal = 0.0;
    for (std::uint32_t i = 0; i < ctx.tasks.size(); ++i) {
        if (!(mask & (1u << i))) continue;
        nodes += ctx.tasks[i].kind == TaskKind::Node;
        remaining_internal += ctx.internal[i];
    }
    if (nodes <= ctx.inst->fleet.node_capacity) {
        std::vector<int> order;
        block_orders(ctx, mask, order, 0, ctx.inst->depot, 0.0, remaining_internal, best);
    }
    return ctx.memo.emplace(mask, std::move(best)).first->second;
}

inline void partitions(ExactContext& ctx, std::uint32_t remaining, int blocks,
                       double acc, std::vector<std::uint32_t>& current,
                       double& best_total, std::vector<std::uint32_t>& best_blocks) {
    if (acc >= best_total) return;
    if (!remaining) {
        best_total = acc;
        best_blocks = current;
        return;
    }
    const auto& fleet = ctx.inst->fleet;
    if (fleet.max_vehicles && blocks >= *fleet.max_vehicles) return;
    const std::uint32_t low = remaining & (~remaining + 1);
    for (std::uint32_t sub = remaining;; sub = (sub - 1) & remaining) {
        if (sub & low) {
            const BlockBest& bb = block_best(ctx, sub);
            if (bb.feasible) {
                current.push_back(sub);
                partitions(ctx, remaining & ~sub, blocks + 1, acc + bb.f, current, best_total,
                           best_blocks);
                current.pop_back();
            }
        }
        if (!sub) break;
    }
}

}  // namespace detail

inline ExactResult solve_exact_global(const Instance& inst, int max_tasks = 7,
                                      const TouringParams& touring = {1e-10, 5000}) {
    ExactResult res;
    if (static_cast<int>(inst.task_count()) > max_tasks) return res;
    res.solved = true;

    detail::ExactContext ctx;
    ctx.inst = &inst;
    ctx.touring = touring;
    for (const auto& n : inst.nodes) {
        ctx.tasks.push_back(TaskRef::node(n.id));
        ctx.internal.push_back(0.0);
        ctx.slack += 2.0 * n.radius;
    }
    for (const auto& e : inst.edges) {
        ctx.tasks.push_back(TaskRef::edge(e.id));
        ctx.internal.push_back(e.length());
    }

    const std::uint32_t full = (1u << inst.task_count()) - 1;
    double best_total = kInf;
    std::vector<std::uint32_t> current, best_blocks;
    detail::partitions(ctx, full, 0, 0.0, current, best_total, best_blocks);
    if (best_blocks.empty()) return res;

    res.feasible = true;
    res.objective = best_total;
    for (const std::uint32_t mask : best_blocks) {
        const auto& bb = ctx.memo.at(mask);
        res.solution.routes.push_back(Route{bb.order});
        res.points.routes.push_back(bb.points);
    }
    return res;
}

}  // namespace cegrp
