#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cegrp/geometry.hpp"
#include "cegrp/instance.hpp"

// Route/solution representation and evaluation. A route is an ordered task
// sequence implicitly anchored at the depot on both ends; a solution is a set
// of routes. The validator reports coverage, capacity, range and fleet-size
// violations as data. Subtours cannot occur in this representation: a route is
// a single depot-anchored chain by construction, and flow balance at edge
// endpoints is implied by traversing each required edge end-to-end.

namespace cegrp {

enum class TaskKind { Node, Edge };
enum class EdgeDir { Forward, Reverse };  // Forward = a -> b

struct TaskRef {
    TaskKind kind = TaskKind::Node;
    int id = 0;
    EdgeDir orientation = EdgeDir::Forward;  // meaningful for edges only

    static TaskRef node(int id) { return {TaskKind::Node, id, EdgeDir::Forward}; }
    static TaskRef edge(int id, EdgeDir dir = EdgeDir::Forward) {
        return {TaskKind::Edge, id, dir};
    }
};

inline bool operator==(const TaskRef& a, const TaskRef& b) {
    if (a.kind != b.kind || a.id != b.id) return false;
    return a.kind == TaskKind::Node || a.orientation == b.orientation;
}
inline bool operator!=(const TaskRef& a, const TaskRef& b) { return !(a == b); }

// Same task irrespective of traversal direction.
inline bool same_task(const TaskRef& a, const TaskRef& b) {
    return a.kind == b.kind && a.id == b.id;
}

struct Route {
    std::vector<TaskRef> tasks;
};

inline bool operator==(const Route& a, const Route& b) { return a.tasks == b.tasks; }

struct Solution {
    std::vector<Route> routes;

    std::size_t task_count() const {
        std::size_t n = 0;
        for (const auto& r : routes) n += r.tasks.size();
        return n;
    }
};

inline bool operator==(const Solution& a, const Solution& b) { return a.routes == b.routes; }
inline bool operator!=(const Solution& a, const Solution& b) { return !(a == b); }

// One representative point per visited vertex of each route, in
// vertex_sequence order (depot, task vertices..., depot).
struct PointAssignment {
    std::vector<std::vector<Point2>> routes;
};

// Entry point of a task under its orientation (center for nodes).
inline Point2 task_entry(const Instance& inst, const TaskRef& t) {
    if (t.kind == TaskKind::Node) return inst.node(t.id).center;
    const auto& e = inst.edge(t.id);
    return t.orientation == EdgeDir::Forward ? e.a : e.b;
}

inline Point2 task_exit(const Instance& inst, const TaskRef& t) {
    if (t.kind == TaskKind::Node) return inst.node(t.id).center;
    const auto& e = inst.edge(t.id);
    return t.orientation == EdgeDir::Forward ? e.b : e.a;
}

inline double task_internal_length(const Instance& inst, const TaskRef& t) {
    return t.kind == TaskKind::Node ? 0.0 : inst.edge(t.id).length();
}

// Expands a route into its visited-vertex chain: depot (radius 0), then per
// task either the node disk or the two edge endpoints in orientation order
// (radius 0), then depot again.
inline std::vector<Disk> vertex_sequence(const Route& route, const Instance& inst) {
    std::vector<Disk> chain;
    chain.reserve(route.tasks.size() * 2 + 2);
    chain.push_back({inst.depot, 0.0});
    for (const auto& t : route.tasks) {
        if (t.kind == TaskKind::Node) {
            const auto& n = inst.node(t.id);
            chain.push_back({n.center, n.radius});
        } else {
            const auto& e = inst.edge(t.id);
            if (t.orientation == EdgeDir::Forward) {
                chain.push_back({e.a, 0.0});
                chain.push_back({e.b, 0.0});
            } else {
                chain.push_back({e.b, 0.0});
                chain.push_back({e.a, 0.0});
            }
        }
    }
    chain.push_back({inst.depot, 0.0});
    return chain;
}

// Center-based route length (the general routing phase objective).
inline double route_length(const Route& route, const Instance& inst) {
    double len = 0.0;
    Point2 prev = inst.depot;
    for (const auto& t : route.tasks) {
        len += dist(prev, task_entry(inst, t)) + task_internal_length(inst, t);
        prev = task_exit(inst, t);
    }
    return len + dist(prev, inst.depot);
}

// Length through an explicit representative-point chain.
inline double route_length(const Route& route, const Instance& inst,
                           const std::vector<Point2>& points) {
    const auto chain = vertex_sequence(route, inst);
    if (points.size() != chain.size())
        throw std::invalid_argument("point count " + std::to_string(points.size()) +
                                    " does not match vertex count " +
                                    std::to_string(chain.size()));
    double len = 0.0;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) len += dist(points[i], points[i + 1]);
    return len;
}

inline double total_distance(const Solution& sol, const Instance& inst) {
    double total = 0.0;
    for (const auto& r : sol.routes) total += route_length(r, inst);
    return total;
}

inline double total_distance(const Solution& sol, const Instance& inst,
                             const PointAssignment& points) {
    if (points.routes.size() != sol.routes.size())
        throw std::invalid_argument("point assignment route count mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < sol.routes.size(); ++i)
        total += route_length(sol.routes[i], inst, points.routes[i]);
    return total;
}

enum class ViolationKind {
    UncoveredTask,
    DuplicateCoverage,
    UnknownTask,
    CapacityExceeded,
    RangeExceeded,
    FleetExceeded,
    EmptyRoute,
};

inline const char* violation_name(ViolationKind k) {
    switch (k) {
        case ViolationKind::UncoveredTask: return "uncovered task";
        case ViolationKind::DuplicateCoverage: return "duplicate coverage";
        case ViolationKind::UnknownTask: return "unknown task";
        case ViolationKind::CapacityExceeded: return "capacity exceeded";
        case ViolationKind::RangeExceeded: return "range exceeded";
        case ViolationKind::FleetExceeded: return "fleet exceeded";
        case ViolationKind::EmptyRoute: return "empty route";
    }
    return "?";
}

struct Violation {
    ViolationKind kind;
    std::string detail;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
    bool has(ViolationKind k) const {
        for (const auto& v : violations)
            if (v.kind == k) return true;
        return false;
    }
    std::string to_string() const {
        if (ok()) return "valid\n";
        std::string s;
        for (const auto& v : violations) {
            s += std::string(violation_name(v.kind)) + ": " + v.detail + "\n";
        }
        return s;
    }
};

// Checks coverage (each task exactly once), per-route node capacity Q, the
// center-evaluated flight range L, and the fleet cap. Range is checked on
// centers: point optimization only shortens routes, so a center-feasible route
// stays feasible under any valid point assignment.
inline ValidationReport validate(const Solution& sol, const Instance& inst) {
    ValidationReport rep;
    auto add = [&](ViolationKind k, std::string d) { rep.violations.push_back({k, std::move(d)}); };

    std::unordered_map<int, int> node_seen, edge_seen;
    for (std::size_t ri = 0; ri < sol.routes.size(); ++ri) {
        const auto& route = sol.routes[ri];
        if (route.tasks.empty()) {
            add(ViolationKind::EmptyRoute, "route " + std::to_string(ri));
            continue;
        }
        int route_nodes = 0;
        bool resolvable = true;
        for (const auto& t : route.tasks) {
            if (t.kind == TaskKind::Node) {
                try {
                    inst.node(t.id);
                } catch (const std::out_of_range&) {
                    add(ViolationKind::UnknownTask, "node " + std::to_string(t.id));
                    resolvable = false;
                    continue;
                }
                ++node_seen[t.id];
                ++route_nodes;
            } else {
                try {
                    inst.edge(t.id);
                } catch (const std::out_of_range&) {
                    add(ViolationKind::UnknownTask, "edge " + std::to_string(t.id));
                    resolvable = false;
                    continue;
                }
                ++edge_seen[t.id];
            }
        }
        if (route_nodes > inst.fleet.node_capacity) {
            add(ViolationKind::CapacityExceeded,
                "route " + std::to_string(ri) + " serves " + std::to_string(route_nodes) +
                    " nodes, capacity " + std::to_string(inst.fleet.node_capacity));
        }
        if (resolvable) {
            const double len = route_length(route, inst);
            if (len > inst.fleet.flight_range + 1e-9) {
                add(ViolationKind::RangeExceeded,
                    "route " + std::to_string(ri) + " length " + std::to_string(len) +
                        " exceeds range " + std::to_string(inst.fleet.flight_range));
            }
        }
    }
    for (const auto& n : inst.nodes) {
        const auto it = node_seen.find(n.id);
        if (it == node_seen.end())
            add(ViolationKind::UncoveredTask, "node " + std::to_string(n.id));
        else if (it->second > 1)
            add(ViolationKind::DuplicateCoverage,
                "node " + std::to_string(n.id) + " covered " + std::to_string(it->second) + "x");
    }
    for (const auto& e : inst.edges) {
        const auto it = edge_seen.find(e.id);
        if (it == edge_seen.end())
            add(ViolationKind::UncoveredTask, "edge " + std::to_string(e.id));
        else if (it->second > 1)
            add(ViolationKind::DuplicateCoverage,
                "edge " + std::to_string(e.id) + " covered " + std::to_string(it->second) + "x");
    }
    if (inst.fleet.max_vehicles && sol.routes.size() > static_cast<std::size_t>(*inst.fleet.max_vehicles)) {
        add(ViolationKind::FleetExceeded, std::to_string(sol.routes.size()) + " routes, cap " +
                                              std::to_string(*inst.fleet.max_vehicles));
    }
    return rep;
}

// ---- solution file format ----

inline nlohmann::json solution_to_json(const Solution& sol, const Instance& inst,
                                       const PointAssignment* points = nullptr) {
    nlohmann::json doc;
    doc["instance"] = inst.name;
    doc["routes"] = nlohmann::json::array();
    for (std::size_t ri = 0; ri < sol.routes.size(); ++ri) {
        nlohmann::json jr;
        jr["tasks"] = nlohmann::json::array();
        for (const auto& t : sol.routes[ri].tasks) {
            nlohmann::json jt;
            jt["kind"] = t.kind == TaskKind::Node ? "node" : "edge";
            jt["id"] = t.id;
            if (t.kind == TaskKind::Edge)
                jt["orientation"] = t.orientation == EdgeDir::Forward ? "fwd" : "rev";
            jr["tasks"].push_back(jt);
        }
        if (points) {
            jr["points"] = nlohmann::json::array();
            for (const auto& p : points->routes.at(ri)) jr["points"].push_back({p.x, p.y});
        }
        doc["routes"].push_back(jr);
    }
    doc["total_distance"] =
        points ? total_distance(sol, inst, *points) : total_distance(sol, inst);
    return doc;
}

struct ParsedSolution {
    std::string instance_name;
    Solution solution;
    std::optional<PointAssignment> points;
    double total_distance = 0.0;
};

inline ParsedSolution parse_solution(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    ParsedSolution out;
    out.instance_name = detail::require_key(doc, "instance", "$").get<std::string>();
    const auto& routes = detail::require_key(doc, "routes", "$");
    if (!routes.is_array()) throw ParseError("expected array at $.routes");
    bool any_points = false;
    for (std::size_t ri = 0; ri < routes.size(); ++ri) {
        const std::string path = "$.routes[" + std::to_string(ri) + "]";
        Route route;
        const auto& tasks = detail::require_key(routes[ri], "tasks", path);
        for (std::size_t ti = 0; ti < tasks.size(); ++ti) {
            const std::string tpath = path + ".tasks[" + std::to_string(ti) + "]";
            const auto& jt = tasks[ti];
            TaskRef t;
            const std::string kind = detail::require_key(jt, "kind", tpath).get<std::string>();
            if (kind == "node") {
                t.kind = TaskKind::Node;
            } else if (kind == "edge") {
                t.kind = TaskKind::Edge;
                const std::string dir =
                    detail::require_key(jt, "orientation", tpath).get<std::string>();
                if (dir == "fwd")
                    t.orientation = EdgeDir::Forward;
                else if (dir == "rev")
                    t.orientation = EdgeDir::Reverse;
                else
                    throw ParseError("expected fwd|rev at " + tpath + ".orientation");
            } else {
                throw ParseError("expected node|edge at " + tpath + ".kind");
            }
            t.id = detail::require_key(jt, "id", tpath).get<int>();
            route.tasks.push_back(t);
        }
        out.solution.routes.push_back(route);
        if (routes[ri].contains("points")) {
            any_points = true;
            if (!out.points) out.points.emplace();
            out.points->routes.resize(out.solution.routes.size());
            for (const auto& jp : routes[ri]["points"])
                out.points->routes[ri].push_back(detail::parse_point(jp, path + ".points"));
        } else if (any_points) {
            throw ParseError("points present on some routes but missing at " + path);
        }
    }
    out.total_distance = detail::require_key(doc, "total_distance", "$").get<double>();
    return out;
}

}  // namespace cegrp
