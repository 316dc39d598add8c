#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "cegrp/perturbation.hpp"

using namespace cegrp;

namespace {

Instance random_instance(std::mt19937_64& rng) {
    const int n_nodes = 2 + static_cast<int>(rng() % 6);
    const int n_edges = 1 + static_cast<int>(rng() % 6);
    return generate_instance(rng(), n_nodes, n_edges, 100.0, 5.0,
                             {400.0, 2 + static_cast<int>(rng() % 3), std::nullopt});
}

Solution start_solution(const Instance& inst, const TaskCache& cache, std::uint64_t seed) {
    return regret_construct(inst, cache, seed, 3);
}

}  // namespace

TEST_CASE("random destroy removes the requested number of tasks") {
    std::mt19937_64 rng(71);
    for (int trial = 0; trial < 30; ++trial) {
        const Instance inst = random_instance(rng);
        const TaskCache cache(inst);
        Solution sol = start_solution(inst, cache, rng());
        const std::size_t total = sol.task_count();
        const int tau = 1 + static_cast<int>(rng() % 12);
        std::mt19937_64 dr(rng());
        const auto removed = destroy_random(sol, tau, dr);
        CHECK(removed.size() == std::min<std::size_t>(tau, total));
        CHECK(sol.task_count() == total - removed.size());
        for (const auto& r : sol.routes) CHECK_FALSE(r.tasks.empty());
        // Removed tasks are exactly the missing ones.
        auto rep = validate(sol, inst);
        std::size_t uncovered = 0;
        for (const auto& v : rep.violations)
            uncovered += v.kind == ViolationKind::UncoveredTask;
        CHECK(uncovered == removed.size());
    }
}

TEST_CASE("worst destroy takes the costliest task first") {
    std::mt19937_64 rng(72);
    for (int trial = 0; trial < 30; ++trial) {
        const Instance inst = random_instance(rng);
        const TaskCache cache(inst);
        const Solution sol = start_solution(inst, cache, rng());
        if (sol.task_count() > 10) continue;

        // Exhaustively find the maximum removal cost in the starting solution.
        double max_delta = -kInf;
        for (const auto& r : sol.routes)
            for (std::size_t p = 0; p < r.tasks.size(); ++p)
                max_delta = std::max(max_delta, cache.removal_delta(r.tasks, p));

        Solution work = sol;
        const auto removed = destroy_worst(work, cache, 1);
        REQUIRE(removed.size() == 1);
        // Recompute the cost of the task that was taken, in the original.
        double taken_delta = -kInf;
        for (const auto& r : sol.routes)
            for (std::size_t p = 0; p < r.tasks.size(); ++p)
                if (r.tasks[p] == removed[0]) taken_delta = cache.removal_delta(r.tasks, p);
        CHECK_THAT(taken_delta, Catch::Matchers::WithinAbs(max_delta, 1e-12));
    }
}

TEST_CASE("node and edge destroy respect their kind and clamp") {
    std::mt19937_64 rng(73);
    const Instance inst = generate_instance(73, 3, 4, 100.0, 5.0, {500.0, 3, std::nullopt});
    const TaskCache cache(inst);
    Solution sol = start_solution(inst, cache, 7);

    Solution nodes_gone = sol;
    const auto removed_nodes = destroy_node(nodes_gone, 50, rng);
    CHECK(removed_nodes.size() == 3);  // clamped to the node count
    for (const auto& t : removed_nodes) CHECK(t.kind == TaskKind::Node);
    for (const auto& r : nodes_gone.routes)
        for (const auto& t : r.tasks) CHECK(t.kind == TaskKind::Edge);

    Solution edges_gone = sol;
    const auto removed_edges = destroy_edge(edges_gone, 50, rng);
    CHECK(removed_edges.size() == 4);
    for (const auto& t : removed_edges) CHECK(t.kind == TaskKind::Edge);
}

TEST_CASE("random repair restores coverage at a feasible slot") {
    std::mt19937_64 rng(74);
    for (int trial = 0; trial < 30; ++trial) {
        const Instance inst = random_instance(rng);
        const TaskCache cache(inst);
        Solution sol = start_solution(inst, cache, rng());
        std::mt19937_64 dr(rng());
        const auto removed = destroy_random(sol, 1 + static_cast<int>(rng() % 6), dr);
        repair_random(sol, inst, cache, removed, dr);
        CHECK(validate(sol, inst).ok());
    }
}

TEST_CASE("greedy repair gives the contested slot to the cheaper task") {
    Instance inst;
    inst.name = "contest";
    inst.depot = {0, 0};
    inst.nodes = {{0, {10, 0}, 0.0}, {1, {12, 0}, 0.0}, {2, {40, 0}, 0.0}};
    inst.fleet = {1000.0, 2, std::nullopt};
    inst.rebuild_index();
    const TaskCache cache(inst);

    Solution sol;
    sol.routes = {{{TaskRef::node(0)}}};
    repair_greedy(sol, inst, cache, {TaskRef::node(2), TaskRef::node(1)});
    CHECK(validate(sol, inst).ok());
    REQUIRE(sol.routes.size() == 2);
    // Node 1 is cheaper to add to the existing route, so it claims the last
    // capacity slot there; node 2 has to open the new route.
    REQUIRE(sol.routes[0].tasks.size() == 2);
    bool has0 = false, has1 = false;
    for (const auto& t : sol.routes[0].tasks) {
        has0 = has0 || same_task(t, TaskRef::node(0));
        has1 = has1 || same_task(t, TaskRef::node(1));
    }
    CHECK(has0);
    CHECK(has1);
    REQUIRE(sol.routes[1].tasks.size() == 1);
    CHECK(same_task(sol.routes[1].tasks[0], TaskRef::node(2)));
}

TEST_CASE("greedy repair restores coverage") {
    std::mt19937_64 rng(75);
    for (int trial = 0; trial < 30; ++trial) {
        const Instance inst = random_instance(rng);
        const TaskCache cache(inst);
        Solution sol = start_solution(inst, cache, rng());
        std::mt19937_64 dr(rng());
        const auto removed = destroy_worst(sol, cache, 1 + static_cast<int>(rng() % 6));
        repair_greedy(sol, inst, cache, removed);
        CHECK(validate(sol, inst).ok());
    }
}

TEST_CASE("perturb changes the solution and preserves validity") {
    std::mt19937_64 rng(76);
    int changed_count = 0;
    for (int trial = 0; trial < 30; ++trial) {
        const Instance inst = random_instance(rng);
        const TaskCache cache(inst);
        const Solution sol = start_solution(inst, cache, rng());
        std::mt19937_64 pr(rng());
        const auto out = perturb(sol, inst, cache, 3, pr);
        CHECK(validate(out.solution, inst).ok());
        CHECK(out.changed == (out.solution != sol));
        if (out.changed) {
            ++changed_count;
            CHECK(out.destroy_op >= 0);
            CHECK(out.destroy_op < kDestroyOps);
            CHECK(out.repair_op >= 0);
            CHECK(out.repair_op < kRepairOps);
        }
    }
    CHECK(changed_count >= 25);  // nearly every perturbation should move
}

TEST_CASE("perturb is deterministic under a fixed stream") {
    const Instance inst = generate_instance(77, 5, 5, 100.0, 5.0, {400.0, 3, std::nullopt});
    const TaskCache cache(inst);
    const Solution sol = start_solution(inst, cache, 5);
    std::mt19937_64 a(123), b(123);
    const auto oa = perturb(sol, inst, cache, 4, a);
    const auto ob = perturb(sol, inst, cache, 4, b);
    CHECK(oa.solution == ob.solution);
    CHECK(oa.destroy_op == ob.destroy_op);
    CHECK(oa.repair_op == ob.repair_op);
    CHECK(oa.changed == ob.changed);
}

TEST_CASE("perturb reports no change when nothing can move") {
    Instance inst;
    inst.name = "stuck";
    inst.depot = {0, 0};
    inst.nodes = {{0, {5, 0}, 0.0}};
    inst.fleet = {100.0, 1, std::nullopt};
    inst.rebuild_index();
    const TaskCache cache(inst);
    Solution sol;
    sol.routes = {{{TaskRef::node(0)}}};
    std::mt19937_64 rng(1);
    const auto out = perturb(sol, inst, cache, 3, rng);
    CHECK_FALSE(out.changed);
    CHECK(out.solution == sol);
}

TEST_CASE("perturb survives a tight fleet cap") {
    Instance inst = generate_instance(78, 4, 0, 100.0, 0.0, {400.0, 1, 4});
    const TaskCache cache(inst);
    Solution sol;
    for (const auto& n : inst.nodes) sol.routes.push_back(Route{{TaskRef::node(n.id)}});
    REQUIRE(validate(sol, inst).ok());
    std::mt19937_64 rng(2);
    for (int i = 0; i < 20; ++i) {
        const auto out = perturb(sol, inst, cache, 2, rng);
        CHECK(validate(out.solution, inst).ok());
    }
}
