#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "cegrp/geometry.hpp"

// Problem-instance data model: required nodes with disk radii, required edges
// with fixed endpoints, fleet limits. Includes the `.cegrp.json` file format
// and a seeded generator that reproduces the structural shape of the benchmark
// families (node/edge counts, square operating area, centered depot).

namespace cegrp {

struct RequiredNode {
    int id = 0;
    Point2 center;
    double radius = 0.0;
};

struct RequiredEdge {
    int id = 0;
    Point2 a;
    Point2 b;

    double length() const { return dist(a, b); }
};

struct FleetSpec {
    double flight_range = 0.0;              // L, per-route length cap
    int node_capacity = 1;                  // Q, max required nodes per route
    std::optional<int> max_vehicles;        // empty = unbounded fleet
};

class ParseError : public std::runtime_error {
 public:
    using std::runtime_error::runtime_error;
};

struct Instance {
    std::string name;
    Point2 depot;
    std::vector<RequiredNode> nodes;
    std::vector<RequiredEdge> edges;
    FleetSpec fleet;

    std::size_t task_count() const { return nodes.size() + edges.size(); }

    const RequiredNode& node(int id) const {
        auto it = node_index_.find(id);
        if (it == node_index_.end()) throw std::out_of_range("unknown node id " + std::to_string(id));
        return nodes[it->second];
    }
    const RequiredEdge& edge(int id) const {
        auto it = edge_index_.find(id);
        if (it == edge_index_.end()) throw std::out_of_range("unknown edge id " + std::to_string(id));
        return edges[it->second];
    }

    // Call after filling nodes/edges; instances are immutable afterwards.
    void rebuild_index() {
        node_index_.clear();
        edge_index_.clear();
        for (std::size_t i = 0; i < nodes.size(); ++i) node_index_[nodes[i].id] = i;
        for (std::size_t i = 0; i < edges.size(); ++i) edge_index_[edges[i].id] = i;
    }

 private:
    std::unordered_map<int, std::size_t> node_index_;
    std::unordered_map<int, std::size_t> edge_index_;
};

namespace detail {

inline double require_finite(double v, const std::string& path) {
    if (!std::isfinite(v)) throw ParseError("non-finite number at " + path);
    return v;
}

inline const nlohmann::json& require_key(const nlohmann::json& j, const char* key,
                                         const std::string& path) {
    if (!j.is_object() || !j.contains(key))
        throw ParseError("missing key at " + path + "." + key);
    return j.at(key);
}

inline Point2 parse_point(const nlohmann::json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ParseError("expected [x, y] at " + path);
    return {require_finite(j[0].get<double>(), path + "[0]"),
            require_finite(j[1].get<double>(), path + "[1]")};
}

}  // namespace detail

inline Instance parse_instance_json(const nlohmann::json& doc) {
    using detail::parse_point;
    using detail::require_finite;
    using detail::require_key;

    Instance inst;
    const auto& name = require_key(doc, "name", "$");
    if (!name.is_string()) throw ParseError("expected string at $.name");
    inst.name = name.get<std::string>();
    inst.depot = parse_point(require_key(doc, "depot", "$"), "$.depot");

    const auto& nodes = require_key(doc, "nodes", "$");
    if (!nodes.is_array()) throw ParseError("expected array at $.nodes");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const std::string path = "$.nodes[" + std::to_string(i) + "]";
        const auto& n = nodes[i];
        RequiredNode rn;
        const auto& id = require_key(n, "id", path);
        if (!id.is_number_integer()) throw ParseError("expected integer at " + path + ".id");
        rn.id = id.get<int>();
        rn.center = parse_point(require_key(n, "center", path), path + ".center");
        const auto& radius = require_key(n, "radius", path);
        if (!radius.is_number()) throw ParseError("expected number at " + path + ".radius");
        rn.radius = require_finite(radius.get<double>(), path + ".radius");
        if (rn.radius < 0.0) throw ParseError("negative radius at " + path + ".radius");
        inst.nodes.push_back(rn);
    }

    const auto& edges = require_key(doc, "edges", "$");
    if (!edges.is_array()) throw ParseError("expected array at $.edges");
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const std::string path = "$.edges[" + std::to_string(i) + "]";
        const auto& e = edges[i];
        RequiredEdge re;
        const auto& id = require_key(e, "id", path);
        if (!id.is_number_integer()) throw ParseError("expected integer at " + path + ".id");
        re.id = id.get<int>();
        re.a = parse_point(require_key(e, "a", path), path + ".a");
        re.b = parse_point(require_key(e, "b", path), path + ".b");
        if (re.a == re.b) throw ParseError("zero-length edge at " + path);
        inst.edges.push_back(re);
    }

    const auto& fleet = require_key(doc, "fleet", "$");
    const auto& L = require_key(fleet, "L", "$.fleet");
    if (!L.is_number()) throw ParseError("expected number at $.fleet.L");
    inst.fleet.flight_range = require_finite(L.get<double>(), "$.fleet.L");
    if (inst.fleet.flight_range <= 0.0) throw ParseError("non-positive flight range at $.fleet.L");
    const auto& Q = require_key(fleet, "Q", "$.fleet");
    if (!Q.is_number_integer()) throw ParseError("expected integer at $.fleet.Q");
    inst.fleet.node_capacity = Q.get<int>();
    if (inst.fleet.node_capacity < 1) throw ParseError("capacity < 1 at $.fleet.Q");
    const auto& mv = require_key(fleet, "max_vehicles", "$.fleet");
    if (mv.is_null()) {
        inst.fleet.max_vehicles.reset();
    } else if (mv.is_number_integer() && mv.get<int>() >= 1) {
        inst.fleet.max_vehicles = mv.get<int>();
    } else {
        throw ParseError("expected null or integer >= 1 at $.fleet.max_vehicles");
    }

    if (inst.task_count() == 0) throw ParseError("instance has no tasks");

    // Duplicate-id checks
    {
        std::unordered_map<int, int> seen;
        for (const auto& n : inst.nodes) {
            if (seen.count(n.id)) throw ParseError("duplicate node id " + std::to_string(n.id));
            seen[n.id] = 1;
        }
        seen.clear();
        for (const auto& e : inst.edges) {
            if (seen.count(e.id)) throw ParseError("duplicate edge id " + std::to_string(e.id));
            seen[e.id] = 1;
        }
    }

    inst.rebuild_index();
    return inst;
}

inline Instance parse_instance(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    return parse_instance_json(doc);
}

inline nlohmann::json instance_to_json(const Instance& inst) {
    nlohmann::json doc;
    doc["name"] = inst.name;
    doc["depot"] = {inst.depot.x, inst.depot.y};
    doc["nodes"] = nlohmann::json::array();
    for (const auto& n : inst.nodes) {
        doc["nodes"].push_back({{"id", n.id},
                                {"center", {n.center.x, n.center.y}},
                                {"radius", n.radius}});
    }
    doc["edges"] = nlohmann::json::array();
    for (const auto& e : inst.edges) {
        doc["edges"].push_back(
            {{"id", e.id}, {"a", {e.a.x, e.a.y}}, {"b", {e.b.x, e.b.y}}});
    }
    doc["fleet"]["L"] = inst.fleet.flight_range;
    doc["fleet"]["Q"] = inst.fleet.node_capacity;
    if (inst.fleet.max_vehicles)
        doc["fleet"]["max_vehicles"] = *inst.fleet.max_vehicles;
    else
        doc["fleet"]["max_vehicles"] = nullptr;
    return doc;
}

inline std::string serialize_instance(const Instance& inst) {
    return instance_to_json(inst).dump(2) + "\n";
}

// Deterministic generator. Nodes uniform in the [0, area]^2 square, edges as
// random segments with length in [0.05*area, 0.4*area] and both endpoints in
// the square, depot at the center.
inline Instance generate_instance(std::uint64_t seed, int n_nodes, int n_edges, double area,
                                  double radius, const FleetSpec& fleet) {
    if (n_nodes < 0 || n_edges < 0 || n_nodes + n_edges < 1)
        throw std::invalid_argument("generate_instance: need at least one task");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coord(0.0, area);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::acos(-1.0));
    std::uniform_real_distribution<double> edge_len(0.05 * area, 0.4 * area);

    Instance inst;
    inst.name = "gen_s" + std::to_string(seed) + "_n" + std::to_string(n_nodes) + "_e" +
                std::to_string(n_edges);
    inst.depot = {area / 2.0, area / 2.0};
    inst.fleet = fleet;

    for (int i = 0; i < n_nodes; ++i) {
        inst.nodes.push_back({i, {coord(rng), coord(rng)}, radius});
    }
    for (int i = 0; i < n_edges; ++i) {
        RequiredEdge e;
        e.id = i;
        for (;;) {
            e.a = {coord(rng), coord(rng)};
            const double phi = angle(rng);
            const double len = edge_len(rng);
            e.b = {e.a.x + len * std::cos(phi), e.a.y + len * std::sin(phi)};
            if (e.b.x >= 0.0 && e.b.x <= area && e.b.y >= 0.0 && e.b.y <= area) break;
        }
        inst.edges.push_back(e);
    }
    inst.rebuild_index();
    return inst;
}

// All radii replaced by r; used for the global-radius experiment modes.
inline Instance with_radius(Instance inst, double r) {
    for (auto& n : inst.nodes) n.radius = r;
    return inst;
}

}  // namespace cegrp
