#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "cegrp/construction.hpp"
#include "cegrp/exact_oracle.hpp"

using namespace cegrp;

namespace {

Instance line_instance(FleetSpec fleet) {
    Instance inst;
    inst.name = "line";
    inst.depot = {0, 0};
    inst.nodes = {{0, {10, 0}, 0.0}, {1, {12, 0}, 0.0}};
    inst.fleet = fleet;
    inst.rebuild_index();
    return inst;
}

}  // namespace

TEST_CASE("regret value from end-insertion candidates") {
    const Instance inst = line_instance({1000.0, 10, std::nullopt});
    const TaskCache cache(inst);
    RegretInsertionState state(inst, cache);

    // No routes yet: only the new-route candidate exists, regret is infinite.
    const auto before = state.evaluate(cache.slot(TaskRef::node(1)));
    CHECK(before.best.route == -1);
    CHECK_THAT(before.best.delta, Catch::Matchers::WithinAbs(24.0, 1e-12));
    CHECK(before.rv == kInf);

    state.insert(cache.slot(TaskRef::node(0)), {20.0, -1, EdgeDir::Forward});
    // Now: append after node 0 costs 2 + 12 - 10 = 4, new route costs 24.
    const auto after = state.evaluate(cache.slot(TaskRef::node(1)));
    CHECK(after.best.route == 0);
    CHECK_THAT(after.best.delta, Catch::Matchers::WithinAbs(4.0, 1e-12));
    CHECK_THAT(after.second, Catch::Matchers::WithinAbs(24.0, 1e-12));
    CHECK_THAT(after.rv, Catch::Matchers::WithinAbs(20.0, 1e-12));
}

TEST_CASE("capacity makes a full route drop out of the candidate set") {
    const Instance inst = line_instance({1000.0, 1, std::nullopt});
    const TaskCache cache(inst);
    RegretInsertionState state(inst, cache);
    state.insert(cache.slot(TaskRef::node(0)), {20.0, -1, EdgeDir::Forward});
    const auto info = state.evaluate(cache.slot(TaskRef::node(1)));
    CHECK(info.best.route == -1);  // only the new route remains
    CHECK(info.rv == kInf);
}

TEST_CASE("range cuts candidates the same way") {
    const Instance inst = line_instance({25.0, 10, std::nullopt});
    const TaskCache cache(inst);
    RegretInsertionState state(inst, cache);
    state.insert(cache.slot(TaskRef::node(0)), {20.0, -1, EdgeDir::Forward});
    // Appending node 1 would give length 24 <= 25, still feasible.
    CHECK(state.evaluate(cache.slot(TaskRef::node(1))).best.route == 0);

    const Instance tight = line_instance({23.0, 10, std::nullopt});
    const TaskCache tcache(tight);
    RegretInsertionState tstate(tight, tcache);
    tstate.insert(tcache.slot(TaskRef::node(0)), {20.0, -1, EdgeDir::Forward});
    const auto info = tstate.evaluate(tcache.slot(TaskRef::node(1)));
    CHECK(info.best.delta == kInf);  // singleton needs 24 > 23: nothing fits
    CHECK_THROWS_AS(tstate.insert(tcache.slot(TaskRef::node(1)), info.best), InfeasibleError);
}

TEST_CASE("construction covers every task feasibly") {
    std::mt19937_64 rng(51);
    for (int trial = 0; trial < 60; ++trial) {
        const int n_nodes = 1 + static_cast<int>(rng() % 8);
        const int n_edges = static_cast<int>(rng() % 8);
        const Instance inst = generate_instance(rng(), n_nodes, n_edges, 100.0, 5.0,
                                                {400.0, 1 + static_cast<int>(rng() % 4),
                                                 std::nullopt});
        const TaskCache cache(inst);
        std::mt19937_64 local(rng());
        double total = 0.0;
        const Solution sol = regret_insertion(inst, cache, local, &total);
        CHECK(validate(sol, inst).ok());
        CHECK_THAT(total, Catch::Matchers::WithinAbs(total_distance(sol, inst), 1e-6));
    }
}

TEST_CASE("capacity one yields singleton routes") {
    const Instance inst = generate_instance(52, 5, 0, 100.0, 0.0, {1e9, 1, std::nullopt});
    const TaskCache cache(inst);
    std::mt19937_64 rng(1);
    const Solution sol = regret_insertion(inst, cache, rng);
    CHECK(sol.routes.size() == 5);
    for (const auto& r : sol.routes) CHECK(r.tasks.size() == 1);
}

TEST_CASE("construction is deterministic per seed and stream") {
    const Instance inst = generate_instance(53, 6, 6, 100.0, 5.0, {500.0, 3, std::nullopt});
    const TaskCache cache(inst);
    const Solution a = regret_construct(inst, cache, 99, 5);
    const Solution b = regret_construct(inst, cache, 99, 5);
    CHECK(a == b);
}

TEST_CASE("more constructions never hurt") {
    std::mt19937_64 rng(54);
    for (int trial = 0; trial < 20; ++trial) {
        const Instance inst = generate_instance(rng(), 4 + static_cast<int>(rng() % 5),
                                                static_cast<int>(rng() % 5), 100.0, 5.0,
                                                {600.0, 3, std::nullopt});
        const TaskCache cache(inst);
        const std::uint64_t seed = rng();
        double prev = kInf;
        for (const int rho : {1, 3, 10}) {
            double total = 0.0;
            regret_construct(inst, cache, seed, rho, &total);
            CHECK(total <= prev + 1e-12);
            prev = total;
        }
    }
}

TEST_CASE("construction lands near the exact optimum on tiny instances") {
    std::mt19937_64 rng(55);
    double ratio_sum = 0.0;
    int counted = 0;
    for (int trial = 0; trial < 10; ++trial) {
        // Radius zero so the center objective is the whole story.
        const Instance inst =
            generate_instance(rng(), 2 + static_cast<int>(rng() % 2),
                              1 + static_cast<int>(rng() % 2), 80.0, 0.0,
                              {1e9, 2, std::nullopt});
        const auto exact = solve_exact_global(inst);
        REQUIRE(exact.solved);
        REQUIRE(exact.feasible);
        const TaskCache cache(inst);
        double total = 0.0;
        const Solution sol = regret_construct(inst, cache, rng(), 10, &total);
        CHECK(validate(sol, inst).ok());
        CHECK(total >= exact.objective - 1e-9);
        CHECK(total <= exact.objective * 1.75 + 1e-9);
        ratio_sum += total / exact.objective;
        ++counted;
    }
    CHECK(ratio_sum / counted <= 1.25);
}
