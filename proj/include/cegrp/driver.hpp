#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "close_enough.hpp"
#include "construction.hpp"
#include "exact_oracle.hpp"
#include "instance.hpp"
#include "neighborhoods.hpp"
#include "perturbation.hpp"
#include "route_cache.hpp"
#include "solution.hpp"

namespace cegrp {

// Outer-loop parameters. zeta, xi, gamma_max and pass_limit feed the descent
// (see VndParams); the rest steer construction, perturbation strength, the
// acceptance threshold and the stopping rules.
struct DriverParams {
    int max_it = 100;    // outer iterations
    int it_max = 30;     // stop after this many consecutive non-improving iterations
    int rho = 10;        // construction restarts
    int tau_min = 3;     // perturbation strength bounds
    int tau_max = 8;
    int l_max = 8;       // non-improving streak that bumps tau
    int lambda = 5;      // operator draws per perturbation call
    int beta = 10;       // rejection streak that widens the threshold again
    int theta = 10;      // restart from the incumbent best this often
    int zeta_min = 2;
    int zeta_max = 8;
    int xi = 5;
    int gamma_max = 3;
    int pass_limit = 200;
    int refine_cap = 12;  // exact reordering limit for initial routes
    bool threshold_reincrease = true;
    TouringParams touring{};
    std::uint64_t seed = 1;

    VndParams vnd() const { return {pass_limit, zeta_min, zeta_max, xi, gamma_max, 1e-9}; }
};

// Record-to-record acceptance band. A candidate is kept while its objective
// stays within eta times the incumbent best; eta tightens as the search
// improves (alpha1 tracks overall progress, alpha2 the improvement rate) and
// widens again by one alpha1 * alpha2 step after beta straight rejections.
struct ThresholdState {
    double alpha1 = 1.0;
    double alpha2 = 1.0;
    double eta = 2.0;

    bool accepts(double objective, double best_objective) const {
        return objective <= eta * best_objective;
    }
    void refresh(double best_objective, double initial_objective, int improved, int iteration) {
        alpha1 = initial_objective > 0.0 ? best_objective / initial_objective : 0.0;
        alpha2 = static_cast<double>(improved) / static_cast<double>(iteration);
        eta = 1.0 + alpha1 * alpha2;
    }
    void reincrease() { eta += alpha1 * alpha2; }
};

// Memoizes optimized touring points per route signature so routes untouched
// by an iteration are not re-solved. Node orientation never matters and is
// normalized out of the key.
class PointCache {
public:
    PointCache(const Instance& inst, const TaskCache& cache, const TouringParams& params)
        : inst_(inst), cache_(cache), params_(params) {}

    double evaluate(const Solution& sol, PointAssignment* out = nullptr) {
        double total = 0.0;
        if (out) {
            out->routes.clear();
            out->routes.reserve(sol.routes.size());
        }
        for (const auto& r : sol.routes) {
            const Entry& e = route_entry(r);
            total += e.length;
            if (out) out->routes.push_back(e.points);
        }
        return total;
    }

    std::size_t size() const { return memo_.size(); }

private:
    struct Entry {
        std::vector<Point2> points;
        double length = 0.0;
    };

    const Entry& route_entry(const Route& r) {
        key_.clear();
        for (const auto& t : r.tasks) {
            const int o = t.kind == TaskKind::Edge && t.orientation == EdgeDir::Reverse;
            key_.push_back(cache_.slot(t) * 2 + o);
        }
        auto it = memo_.find(key_);
        if (it == memo_.end()) {
            TouringResult tr = optimize_route_points(r, inst_, params_);
            it = memo_.emplace(key_, Entry{std::move(tr.points), tr.length}).first;
        }
        return it->second;
    }

    const Instance& inst_;
    const TaskCache& cache_;
    TouringParams params_;
    std::vector<int> key_;
    std::map<std::vector<int>, Entry> memo_;
};

struct IterRecord {
    int iter = 0;
    double center = 0.0;     // center objective of the candidate
    double objective = 0.0;  // touring objective of the candidate
    double best = 0.0;       // best touring objective after this iteration
    double eta_before = 0.0;
    double eta_after = 0.0;
    int tau = 0;  // perturbation strength used this iteration
    int destroy_op = -1;
    int repair_op = -1;
    bool perturb_changed = false;
    bool improved = false;
    bool accepted = false;
    bool returned_to_best = false;
};

struct RunLog {
    std::vector<IterRecord> records;

    std::string to_json_lines() const {
        std::string out;
        for (const auto& r : records) {
            const nlohmann::json j{
                {"iter", r.iter},
                {"center", r.center},
                {"objective", r.objective},
                {"best", r.best},
                {"eta_before", r.eta_before},
                {"eta_after", r.eta_after},
                {"tau", r.tau},
                {"destroy", r.destroy_op >= 0 ? destroy_name(r.destroy_op) : "none"},
                {"repair", r.repair_op >= 0 ? repair_name(r.repair_op) : "none"},
                {"changed", r.perturb_changed},
                {"improved", r.improved},
                {"accepted", r.accepted},
                {"returned", r.returned_to_best},
            };
            out += j.dump();
            out += '\n';
        }
        return out;
    }
};

struct SolveResult {
    Solution solution;
    PointAssignment points;
    double objective = 0.0;       // touring objective of the returned solution
    double center_total = 0.0;    // same routes evaluated at the centers
    double initial_center = 0.0;  // construction objective before any descent
    int iterations = 0;
};

// Two-phase search: regret construction, descent, exact reordering of the
// initial routes, then perturb-descend-reoptimize under the acceptance band.
// Touring points are re-placed for every candidate; the best point solution
// seen anywhere is returned.
inline SolveResult solve(const Instance& inst, const DriverParams& params = {},
                         RunLog* log = nullptr) {
    if (inst.task_count() == 0) throw InfeasibleError("instance has no tasks");
    if (!infeasible_tasks(inst).empty()) throw InfeasibleError("task out of flight range");

    const TaskCache cache(inst);
    const VndParams vp = params.vnd();

    double initial = 0.0;
    Solution cur = regret_construct(inst, cache, params.seed, params.rho, &initial);
    // Streams at 2^32 and above cannot collide with construction streams 0..rho-1.
    std::mt19937_64 rng(detail::mix_seed(params.seed, (1ULL << 32) + 1));
    vnd(cur, inst, cache, rng, vp);
    for (auto& r : cur.routes) {
        RefineResult rr = refine_route_exact(r, inst, params.refine_cap);
        if (rr.refined) r = std::move(rr.route);
    }

    PointCache touring(inst, cache, params.touring);
    PointAssignment cur_points;
    double cur_f = touring.evaluate(cur, &cur_points);

    Solution best = cur;
    PointAssignment best_points = cur_points;
    double best_f = cur_f;

    ThresholdState th;
    int tau = params.tau_min;
    int unimproved = 0;
    int rejected = 0;
    int improved = 0;
    int noim = 0;
    int iterations = 0;

    for (int i = 1; i <= params.max_it; ++i) {
        ++iterations;
        PerturbOutcome pert = perturb(cur, inst, cache, tau, rng, params.lambda);
        Solution cand = std::move(pert.solution);
        vnd(cand, inst, cache, rng, vp);
        PointAssignment cand_points;
        const double cand_f = touring.evaluate(cand, &cand_points);
        double cand_center = 0.0;
        for (const auto& r : cand.routes) cand_center += cache.length(r);

        const double eta_before = th.eta;
        const bool is_better = cand_f < best_f;
        if (is_better) {
            best = cand;
            best_points = cand_points;
            best_f = cand_f;
            unimproved = 0;
            rejected = 0;
            ++improved;
            noim = 0;
        } else {
            ++unimproved;
            ++rejected;
            ++noim;
        }
        const bool accepted = th.accepts(cand_f, best_f);
        if (accepted) {
            cur = std::move(cand);
            cur_f = cand_f;
            th.refresh(best_f, initial, improved, i);
        }
        if (params.threshold_reincrease && rejected > 0 && rejected % params.beta == 0) {
            th.reincrease();
            rejected = 0;
        }
        const int tau_used = tau;
        if (noim >= params.l_max) {
            tau = std::min(tau + 1, params.tau_max);
            noim = 0;
        } else if (noim == 0) {
            tau = params.tau_min;
        }
        bool returned = false;
        if (unimproved > 0 && unimproved % params.theta == 0) {
            cur = best;
            cur_f = best_f;
            returned = true;
        }
        if (log)
            log->records.push_back({i, cand_center, cand_f, best_f, eta_before, th.eta, tau_used,
                                    pert.destroy_op, pert.repair_op, pert.changed, is_better,
                                    accepted, returned});
        if (unimproved >= params.it_max) break;
    }

    SolveResult out;
    out.solution = std::move(best);
    out.points = std::move(best_points);
    out.objective = best_f;
    out.initial_center = initial;
    out.iterations = iterations;
    for (const auto& r : out.solution.routes) out.center_total += cache.length(r);
    return out;
}

}  // namespace cegrp
