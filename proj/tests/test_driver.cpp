#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <sstream>
#include <vector>

#include "cegrp/driver.hpp"

using namespace cegrp;

namespace {

Instance mid_instance(std::uint64_t seed, double radius = 2.0) {
    return generate_instance(seed, 8, 4, 100.0, radius, {500.0, 4, std::nullopt});
}

Instance single_node_instance() {
    Instance inst;
    inst.name = "single";
    inst.depot = {0, 0};
    inst.nodes = {{0, {30, 40}, 0.0}};
    inst.fleet = {1000.0, 4, std::nullopt};
    inst.rebuild_index();
    return inst;
}

}  // namespace

TEST_CASE("acceptance band starts wide and tightens with progress") {
    ThresholdState th;
    CHECK(th.eta == Catch::Approx(2.0));
    CHECK(th.accepts(199.0, 100.0));
    CHECK_FALSE(th.accepts(201.0, 100.0));

    th.refresh(90.0, 100.0, 1, 2);
    CHECK(th.alpha1 == Catch::Approx(0.9));
    CHECK(th.alpha2 == Catch::Approx(0.5));
    CHECK(th.eta == Catch::Approx(1.45));
    CHECK(th.accepts(130.0, 90.0));
    CHECK_FALSE(th.accepts(131.0, 90.0));

    th.reincrease();
    CHECK(th.eta == Catch::Approx(1.90));

    // A fully converged search collapses the band to exact matches.
    th.refresh(100.0, 100.0, 0, 5);
    CHECK(th.alpha2 == 0.0);
    CHECK(th.eta == Catch::Approx(1.0));
}

TEST_CASE("point cache reuses work and ignores node orientation") {
    const Instance inst = mid_instance(11);
    const TaskCache cache(inst);
    Solution sol = regret_construct(inst, cache, 3, 2);

    PointCache pc(inst, cache, {});
    PointAssignment pts;
    const double a = pc.evaluate(sol, &pts);
    const std::size_t filled = pc.size();
    CHECK(a == Catch::Approx(total_distance(sol, inst, pts)));
    CHECK(pc.evaluate(sol) == a);
    CHECK(pc.size() == filled);

    // Flipping a node's stored orientation must not create a new entry.
    for (auto& r : sol.routes)
        for (auto& t : r.tasks)
            if (t.kind == TaskKind::Node) t.orientation = EdgeDir::Reverse;
    CHECK(pc.evaluate(sol) == a);
    CHECK(pc.size() == filled);
}

TEST_CASE("solve returns a valid solution with a consistent objective") {
    for (std::uint64_t seed : {1, 2, 3}) {
        const Instance inst = mid_instance(seed);
        DriverParams params;
        params.seed = seed;
        params.max_it = 20;
        SolveResult res = solve(inst, params);

        CAPTURE(seed);
        CHECK(validate(res.solution, inst).ok());
        CHECK(res.objective ==
              Catch::Approx(total_distance(res.solution, inst, res.points)).margin(1e-9));
        CHECK(res.center_total == Catch::Approx(total_distance(res.solution, inst)).margin(1e-9));
        CHECK(res.objective <= res.center_total + 1e-9);
        // Descent, reordering and point placement only ever shave distance
        // off the construction.
        CHECK(res.objective < res.initial_center);
        CHECK(res.iterations <= params.max_it);
    }
}

TEST_CASE("solve is deterministic for a fixed seed") {
    const Instance inst = mid_instance(7);
    DriverParams params;
    params.seed = 42;
    params.max_it = 15;

    RunLog log_a, log_b;
    SolveResult a = solve(inst, params, &log_a);
    SolveResult b = solve(inst, params, &log_b);

    CHECK(a.objective == b.objective);
    CHECK(a.iterations == b.iterations);
    CHECK(solution_to_json(a.solution, inst, &a.points).dump() ==
          solution_to_json(b.solution, inst, &b.points).dump());
    CHECK(log_a.to_json_lines() == log_b.to_json_lines());
}

TEST_CASE("run log invariants hold") {
    const Instance inst = mid_instance(5);
    DriverParams params;
    params.seed = 9;
    params.max_it = 40;
    RunLog log;
    SolveResult res = solve(inst, params, &log);

    REQUIRE(log.records.size() == static_cast<std::size_t>(res.iterations));
    double prev_best = res.initial_center + 1e-9;
    int iter = 0;
    for (const auto& r : log.records) {
        CHECK(r.iter == ++iter);
        CHECK(r.best <= prev_best);
        prev_best = r.best;
        if (r.improved) {
            CHECK(r.accepted);
            CHECK(r.best == r.objective);
        }
        CHECK(r.objective <= r.center + 1e-9);
        CHECK(r.tau >= params.tau_min);
        CHECK(r.tau <= params.tau_max);
        CHECK(r.eta_after >= 1.0 - 1e-12);
        CHECK(r.destroy_op >= 0);
        CHECK(r.destroy_op < kDestroyOps);
        CHECK(r.repair_op >= 0);
        CHECK(r.repair_op < kRepairOps);
    }
    CHECK(log.records.back().best == Catch::Approx(res.objective));

    // One json object per line, parseable, with the op names spelled out.
    std::istringstream lines(log.to_json_lines());
    std::string line;
    std::size_t count = 0;
    while (std::getline(lines, line)) {
        const auto j = nlohmann::json::parse(line);
        CHECK(j.at("iter").get<int>() == static_cast<int>(count) + 1);
        CHECK(j.at("destroy").is_string());
        CHECK(j.at("repair").is_string());
        ++count;
    }
    CHECK(count == log.records.size());
}

TEST_CASE("stalled search stops at it_max and walks the tau schedule") {
    const Instance inst = single_node_instance();
    DriverParams params;
    params.max_it = 100;
    RunLog log;
    SolveResult res = solve(inst, params, &log);

    CHECK(res.iterations == params.it_max);
    CHECK(res.objective == Catch::Approx(100.0));
    CHECK(res.objective == res.initial_center);

    REQUIRE(log.records.size() == 30);
    for (const auto& r : log.records) {
        CHECK_FALSE(r.improved);
        CHECK(r.accepted);  // equal objectives always sit inside the band
        CHECK(r.eta_after == Catch::Approx(1.0));
        // tau grows by one every l_max stalled iterations.
        const int expected_tau = params.tau_min + (r.iter - 1) / params.l_max;
        CHECK(r.tau == std::min(expected_tau, params.tau_max));
        CHECK(r.returned_to_best == (r.iter % params.theta == 0));
    }
}

TEST_CASE("max_it zero returns the polished construction") {
    const Instance inst = mid_instance(13);
    DriverParams params;
    params.seed = 4;
    params.max_it = 0;
    RunLog log;
    SolveResult res = solve(inst, params, &log);

    CHECK(res.iterations == 0);
    CHECK(log.records.empty());
    CHECK(validate(res.solution, inst).ok());
    CHECK(res.objective ==
          Catch::Approx(total_distance(res.solution, inst, res.points)).margin(1e-9));
}

TEST_CASE("disabling threshold reincrease freezes the band on rejection") {
    const Instance inst = mid_instance(21);
    DriverParams params;
    params.seed = 17;
    params.max_it = 40;
    params.threshold_reincrease = false;
    RunLog log;
    solve(inst, params, &log);

    for (const auto& r : log.records)
        if (!r.accepted) CHECK(r.eta_after == r.eta_before);

    params.threshold_reincrease = true;
    RunLog log_on;
    solve(inst, params, &log_on);
    for (const auto& r : log_on.records)
        if (!r.accepted) CHECK(r.eta_after >= r.eta_before);
}

TEST_CASE("solve rejects hopeless instances up front") {
    Instance inst = single_node_instance();
    inst.fleet.flight_range = 10.0;  // the lone node sits 50 out and back
    CHECK_THROWS_AS(solve(inst), InfeasibleError);

    Instance empty;
    empty.name = "empty";
    empty.depot = {0, 0};
    empty.fleet = {100.0, 2, std::nullopt};
    CHECK_THROWS_AS(solve(empty), InfeasibleError);
}

TEST_CASE("solve beats or matches plain construction across seeds") {
    std::mt19937_64 rng(310);
    for (int trial = 0; trial < 6; ++trial) {
        const Instance inst = mid_instance(rng(), 3.0);
        const TaskCache cache(inst);
        double plain = 0.0;
        regret_construct(inst, cache, 1, 10, &plain);

        DriverParams params;
        params.max_it = 30;
        SolveResult res = solve(inst, params);
        CAPTURE(trial, inst.name);
        CHECK(res.objective < plain);
        CHECK(validate(res.solution, inst).ok());
    }
}
