#pragma once

#include <limits>
#include <vector>

#include "cegrp/instance.hpp"
#include "cegrp/solution.hpp"

// Dense per-task geometry tables plus incremental route-cost deltas. All the
// search code evaluates moves through this cache instead of re-walking routes;
// deltas are exact (not approximations), so cached lengths drift only by
// floating-point accumulation.

namespace cegrp {

constexpr double kInf = std::numeric_limits<double>::infinity();

class TaskCache {
 public:
    explicit TaskCache(const Instance& inst) : depot_(inst.depot) {
        tasks_.reserve(inst.task_count());
        for (const auto& n : inst.nodes) {
            Entry e;
            e.id = n.id;
            e.is_edge = false;
            e.entry[0] = e.entry[1] = n.center;
            e.exit[0] = e.exit[1] = n.center;
            e.internal = 0.0;
            node_slot_[n.id] = static_cast<int>(tasks_.size());
            tasks_.push_back(e);
        }
        first_edge_slot_ = static_cast<int>(tasks_.size());
        for (const auto& ed : inst.edges) {
            Entry e;
            e.id = ed.id;
            e.is_edge = true;
            e.entry[0] = ed.a;
            e.exit[0] = ed.b;
            e.entry[1] = ed.b;
            e.exit[1] = ed.a;
            e.internal = ed.length();
            edge_slot_[ed.id] = static_cast<int>(tasks_.size());
            tasks_.push_back(e);
        }
    }

    int size() const { return static_cast<int>(tasks_.size()); }
    int node_count() const { return first_edge_slot_; }
    const Point2& depot() const { return depot_; }

    int slot(const TaskRef& t) const {
        const auto& index = t.kind == TaskKind::Node ? node_slot_ : edge_slot_;
        return index.at(t.id);
    }
    bool is_edge(int slot) const { return tasks_[slot].is_edge; }
    bool is_node(int slot) const { return !tasks_[slot].is_edge; }

    TaskRef ref(int slot, EdgeDir dir = EdgeDir::Forward) const {
        const Entry& e = tasks_[slot];
        return e.is_edge ? TaskRef::edge(e.id, dir) : TaskRef::node(e.id);
    }

    const Point2& entry(const TaskRef& t) const {
        return tasks_[slot(t)].entry[t.orientation == EdgeDir::Reverse];
    }
    const Point2& exit(const TaskRef& t) const {
        return tasks_[slot(t)].exit[t.orientation == EdgeDir::Reverse];
    }
    double internal(const TaskRef& t) const { return tasks_[slot(t)].internal; }
    double internal_at(int slot) const { return tasks_[slot].internal; }

    double length(const std::vector<TaskRef>& tasks) const {
        double len = 0.0;
        Point2 prev = depot_;
        for (const auto& t : tasks) {
            const Entry& e = tasks_[slot(t)];
            const int o = t.orientation == EdgeDir::Reverse;
            len += dist(prev, e.entry[o]) + e.internal;
            prev = e.exit[o];
        }
        return len + dist(prev, depot_);
    }

    double length(const Route& r) const { return length(r.tasks); }

    // Point faced by position `pos` from the left (exit of tasks[pos-1]).
    Point2 before(const std::vector<TaskRef>& tasks, std::size_t pos) const {
        return pos == 0 ? depot_ : exit(tasks[pos - 1]);
    }
    // Point faced by position `pos` from the right (entry of tasks[pos]).
    Point2 after(const std::vector<TaskRef>& tasks, std::size_t pos) const {
        return pos == tasks.size() ? depot_ : entry(tasks[pos]);
    }

    // Length delta of inserting `t` (with its orientation) at `pos`.
    double insertion_delta(const std::vector<TaskRef>& tasks, std::size_t pos,
                           const TaskRef& t) const {
        const Point2 p = before(tasks, pos);
        const Point2 q = after(tasks, pos);
        const Entry& e = tasks_[slot(t)];
        const int o = t.orientation == EdgeDir::Reverse;
        return dist(p, e.entry[o]) + e.internal + dist(e.exit[o], q) - dist(p, q);
    }

    struct Placement {
        double delta = kInf;
        std::size_t pos = 0;
        EdgeDir dir = EdgeDir::Forward;
    };

    // Cheapest orientation for slot at a fixed position.
    Placement best_orientation(const std::vector<TaskRef>& tasks, std::size_t pos,
                               int slot) const {
        const Point2 p = before(tasks, pos);
        const Point2 q = after(tasks, pos);
        const Entry& e = tasks_[slot];
        const double base = e.internal - dist(p, q);
        Placement best;
        best.pos = pos;
        best.delta = dist(p, e.entry[0]) + dist(e.exit[0], q) + base;
        if (e.is_edge) {
            const double rev = dist(p, e.entry[1]) + dist(e.exit[1], q) + base;
            if (rev < best.delta) {
                best.delta = rev;
                best.dir = EdgeDir::Reverse;
            }
        }
        return best;
    }

    // Cheapest position and orientation over the whole route. Ties keep the
    // earliest position with forward before reverse.
    Placement best_placement(const std::vector<TaskRef>& tasks, int slot) const {
        Placement best;
        for (std::size_t pos = 0; pos <= tasks.size(); ++pos) {
            const Placement cand = best_orientation(tasks, pos, slot);
            if (cand.delta < best.delta) best = cand;
        }
        return best;
    }

    // End-of-route append cost (insertion just before the return leg).
    Placement append_placement(const std::vector<TaskRef>& tasks, int slot) const {
        return best_orientation(tasks, tasks.size(), slot);
    }

    // Length saved by removing the task at `pos` (a nonnegative delta).
    double removal_delta(const std::vector<TaskRef>& tasks, std::size_t pos) const {
        const Point2 p = before(tasks, pos);
        const Point2 q = pos + 1 == tasks.size() ? depot_ : entry(tasks[pos + 1]);
        const TaskRef& t = tasks[pos];
        const Entry& e = tasks_[slot(t)];
        const int o = t.orientation == EdgeDir::Reverse;
        return dist(p, e.entry[o]) + e.internal + dist(e.exit[o], q) - dist(p, q);
    }

    // Round trip depot -> task -> depot, cheapest orientation.
    double singleton_cost(int slot) const {
        const Entry& e = tasks_[slot];
        double c = dist(depot_, e.entry[0]) + e.internal + dist(e.exit[0], depot_);
        if (e.is_edge) {
            const double rev = dist(depot_, e.entry[1]) + e.internal + dist(e.exit[1], depot_);
            if (rev < c) c = rev;
        }
        return c;
    }
    EdgeDir singleton_dir(int slot) const {
        const Entry& e = tasks_[slot];
        if (!e.is_edge) return EdgeDir::Forward;
        const double fwd = dist(depot_, e.entry[0]) + dist(e.exit[0], depot_);
        const double rev = dist(depot_, e.entry[1]) + dist(e.exit[1], depot_);
        return rev < fwd ? EdgeDir::Reverse : EdgeDir::Forward;
    }

 private:
    struct Entry {
        Point2 entry[2];
        Point2 exit[2];
        double internal = 0.0;
        int id = 0;
        bool is_edge = false;
    };

    Point2 depot_;
    std::vector<Entry> tasks_;
    std::unordered_map<int, int> node_slot_, edge_slot_;
    int first_edge_slot_ = 0;
};

inline int count_nodes(const std::vector<TaskRef>& tasks) {
    int n = 0;
    for (const auto& t : tasks) n += t.kind == TaskKind::Node;
    return n;
}

// Tasks whose cheapest depot round trip already breaks the flight range. Any
// of these makes the instance unservable regardless of routing.
inline std::vector<TaskRef> infeasible_tasks(const Instance& inst) {
    const TaskCache cache(inst);
    std::vector<TaskRef> out;
    for (int s = 0; s < cache.size(); ++s) {
        if (cache.singleton_cost(s) > inst.fleet.flight_range + 1e-9)
            out.push_back(cache.ref(s, cache.singleton_dir(s)));
    }
    return out;
}

}  // namespace cegrp
