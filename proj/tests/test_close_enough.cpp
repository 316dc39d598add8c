#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "cegrp/close_enough.hpp"
#include "grid_oracle.hpp"

using namespace cegrp;

namespace {

Instance one_node_instance(double radius) {
    Instance inst;
    inst.name = "one";
    inst.depot = {0, 0};
    inst.nodes = {{0, {3, 4}, radius}};
    inst.fleet = {1000.0, 1, std::nullopt};
    inst.rebuild_index();
    return inst;
}

std::vector<Disk> random_chain(std::mt19937_64& rng, int free_disks) {
    std::uniform_real_distribution<double> coord(-10.0, 10.0);
    std::uniform_real_distribution<double> radius(0.2, 4.0);
    std::vector<Disk> chain;
    chain.push_back({{coord(rng), coord(rng)}, 0.0});
    int placed = 0;
    while (placed < free_disks) {
        if (rng() % 3 == 0) {
            chain.push_back({{coord(rng), coord(rng)}, 0.0});  // fixed waypoint
        } else {
            chain.push_back({{coord(rng), coord(rng)}, radius(rng)});
            ++placed;
        }
    }
    chain.push_back({{coord(rng), coord(rng)}, 0.0});
    return chain;
}

}  // namespace

TEST_CASE("single disk visit shortens by twice the radius") {
    const Instance inst = one_node_instance(1.0);
    const Route r{{TaskRef::node(0)}};
    const auto res = optimize_route_points(r, inst);
    CHECK(res.converged);
    CHECK_THAT(res.length, Catch::Matchers::WithinAbs(8.0, 1e-6));
    // Touch point sits on the boundary toward the depot.
    CHECK_THAT(dist(res.points[1], Point2{2.4, 3.2}), Catch::Matchers::WithinAbs(0.0, 1e-6));
}

TEST_CASE("disk containing the depot costs nothing") {
    Instance inst = one_node_instance(6.0);
    const Route r{{TaskRef::node(0)}};
    const auto res = optimize_route_points(r, inst);
    CHECK_THAT(res.length, Catch::Matchers::WithinAbs(0.0, 1e-9));
}

TEST_CASE("zero radii leave centers untouched") {
    Instance inst = one_node_instance(0.0);
    inst.edges = {{0, {5, 0}, {5, 5}}};
    inst.rebuild_index();
    const Route r{{TaskRef::node(0), TaskRef::edge(0, EdgeDir::Forward)}};
    const auto res = optimize_route_points(r, inst);
    CHECK(res.converged);
    CHECK(res.passes == 0);
    CHECK_THAT(res.length, Catch::Matchers::WithinAbs(route_length(r, inst), 1e-12));
    const auto chain = vertex_sequence(r, inst);
    for (std::size_t i = 0; i < chain.size(); ++i) CHECK(res.points[i] == chain[i].center);
}

TEST_CASE("empty chain degenerates cleanly") {
    const Instance inst = one_node_instance(1.0);
    const auto res = optimize_route_points(Route{}, inst);
    CHECK(res.converged);
    CHECK(res.length == 0.0);
    CHECK(res.points.size() == 2);
}

TEST_CASE("descent is monotone pass over pass") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 50; ++trial) {
        const auto chain = random_chain(rng, 1 + static_cast<int>(rng() % 4));
        std::vector<double> trace;
        const auto res = optimize_points(chain, {}, &trace);
        CHECK(res.converged);
        double prev = chain_length([&] {
            std::vector<Point2> centers;
            for (const auto& d : chain) centers.push_back(d.center);
            return centers;
        }());
        for (const double len : trace) {
            CHECK(len <= prev + 1e-9);
            prev = len;
        }
        CHECK_THAT(res.length, Catch::Matchers::WithinAbs(trace.back(), 1e-12));
        // Every point stays inside its disk.
        for (std::size_t i = 0; i < chain.size(); ++i)
            CHECK(dist(res.points[i], chain[i].center) <= chain[i].radius + 1e-9);
    }
}

TEST_CASE("coordinate descent matches the grid reference") {
    std::mt19937_64 rng(22);
    for (int trial = 0; trial < 25; ++trial) {
        const auto chain = random_chain(rng, 1 + static_cast<int>(rng() % 3));
        const auto res = optimize_points(chain);
        const double ref = test_oracle::grid_tour_length(chain);
        CHECK_THAT(res.length, Catch::Matchers::WithinAbs(ref, 1e-4));
    }
}

TEST_CASE("pass cap reports non-convergence") {
    std::mt19937_64 rng(23);
    const auto chain = random_chain(rng, 3);
    const auto res = optimize_points(chain, {0.0, 1});
    CHECK(res.passes == 1);
    CHECK_FALSE(res.converged);
}

TEST_CASE("larger radii never lengthen the optimized tour") {
    const Instance base = generate_instance(31, 4, 3, 100.0, 0.0, {1e9, 10, std::nullopt});
    Route r;
    for (const auto& n : base.nodes) r.tasks.push_back(TaskRef::node(n.id));
    for (const auto& e : base.edges) r.tasks.push_back(TaskRef::edge(e.id));
    double prev = std::numeric_limits<double>::infinity();
    for (const double radius : {0.0, 10.0, 30.0, 50.0, 70.0, 100.0}) {
        const Instance inst = with_radius(base, radius);
        const auto res = optimize_route_points(r, inst);
        CHECK(res.length <= prev + 1e-9);
        prev = res.length;
    }
}

TEST_CASE("solution optimizer aggregates per-route results") {
    Instance inst = one_node_instance(1.0);
    inst.nodes.push_back({1, {-6, 8}, 2.0});
    inst.rebuild_index();
    Solution sol;
    sol.routes = {{{TaskRef::node(0)}}, {{TaskRef::node(1)}}};
    const auto res = optimize_solution(sol, inst);
    REQUIRE(res.points.routes.size() == 2);
    CHECK(res.points.routes[0].size() == 3);
    CHECK(res.points.routes[1].size() == 3);
    CHECK_THAT(res.total, Catch::Matchers::WithinAbs(8.0 + (20.0 - 4.0), 1e-6));
    CHECK_THAT(total_distance(sol, inst, res.points), Catch::Matchers::WithinAbs(res.total, 1e-9));
}
