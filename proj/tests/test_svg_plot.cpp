#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "cegrp/close_enough.hpp"
#include "cegrp/svg_plot.hpp"

using namespace cegrp;

namespace {

std::size_t count_of(const std::string& hay, const std::string& needle) {
    std::size_t n = 0;
    for (std::size_t at = hay.find(needle); at != std::string::npos;
         at = hay.find(needle, at + needle.size()))
        ++n;
    return n;
}

Instance small_instance() {
    Instance inst;
    inst.name = "plotme";
    inst.depot = {0, 0};
    inst.nodes = {{0, {10, 10}, 5.0}, {1, {30, 5}, 0.0}, {2, {20, 25}, 2.0}};
    inst.edges = {{0, {5, 30}, {15, 35}}, {1, {35, 20}, {40, 28}}};
    inst.fleet = {1000.0, 10, std::nullopt};
    inst.rebuild_index();
    return inst;
}

}  // namespace

TEST_CASE("empty solution renders a depot-only figure") {
    Instance inst;
    inst.name = "bare";
    inst.depot = {3, 4};
    inst.fleet = {100.0, 1, std::nullopt};

    const std::string svg = plot_solution({}, nullptr, inst);
    CHECK(svg.rfind("<svg ", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(count_of(svg, "class=\"depot\"") == 1);
    CHECK(count_of(svg, "<polyline") == 0);
    CHECK(count_of(svg, "class=\"disk\"") == 0);
    CHECK(count_of(svg, "class=\"edge\"") == 0);
}

TEST_CASE("figure elements match the instance and solution") {
    const Instance inst = small_instance();
    Solution sol;
    sol.routes = {{{TaskRef::node(0), TaskRef::edge(0, EdgeDir::Forward)}},
                  {{TaskRef::node(1), TaskRef::node(2), TaskRef::edge(1, EdgeDir::Reverse)}}};

    const std::string svg = plot_solution(sol, nullptr, inst);
    CHECK(count_of(svg, "class=\"edge\"") == 2);
    CHECK(count_of(svg, "class=\"node\"") == 3);
    // Dashed circles appear only for positive radii.
    CHECK(count_of(svg, "class=\"disk\"") == 2);
    CHECK(count_of(svg, "class=\"route\"") == 2);
    CHECK(count_of(svg, "class=\"depot\"") == 1);
    // Distinct colors per route.
    CHECK(svg.find("#1f77b4") != std::string::npos);
    CHECK(svg.find("#ff7f0e") != std::string::npos);
}

TEST_CASE("single route draws a single polyline") {
    const Instance inst = small_instance();
    Solution sol;
    sol.routes = {{{TaskRef::node(0)}}};
    CHECK(count_of(plot_solution(sol, nullptr, inst), "<polyline") == 1);
}

TEST_CASE("optimized points steer the polylines") {
    const Instance inst = small_instance();
    Solution sol;
    sol.routes = {{{TaskRef::node(0)}}};
    const CloseEnoughResult ce = optimize_solution(sol, inst);

    const std::string with_points = plot_solution(sol, &ce.points, inst);
    const std::string with_centers = plot_solution(sol, nullptr, inst);
    CHECK(with_points != with_centers);
    CHECK(count_of(with_points, "<polyline") == 1);
}
