#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "driver.hpp"
#include "instance.hpp"

namespace cegrp {

// One batch job. An instance that failed to load keeps its row so the report
// stays aligned with the manifest.
struct BatchItem {
    std::string name;
    std::optional<Instance> instance;
    std::string load_error;
};

struct BatchRow {
    std::string instance;
    int rep = 0;
    std::uint64_t seed = 0;
    bool ok = false;
    double objective = 0.0;
    double center = 0.0;
    int vehicles = 0;
    int iterations = 0;
    double seconds = 0.0;
    std::string error;
    Solution solution;
    PointAssignment points;
    RunLog log;
};

struct BatchOptions {
    int repetitions = 1;
    int workers = 0;  // 0 picks the hardware concurrency
    bool capture_logs = false;
};

struct BatchSummary {
    std::string instance;
    int runs = 0;  // successful repetitions
    double best = 0.0;
    double avg = 0.0;
    double worst = 0.0;
    double avg_seconds = 0.0;
};

namespace detail {

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace detail

struct BatchResult {
    int repetitions = 1;
    std::vector<BatchRow> rows;  // item-major, repetition-minor

    std::string to_csv() const {
        std::ostringstream csv;
        csv << std::setprecision(12);
        csv << "instance,rep,seed,status,objective,center,vehicles,iterations,seconds,error\n";
        for (const auto& r : rows) {
            csv << detail::csv_field(r.instance) << ',' << r.rep << ',' << r.seed << ','
                << (r.ok ? "ok" : "failed") << ',';
            if (r.ok)
                csv << r.objective << ',' << r.center << ',' << r.vehicles << ',' << r.iterations;
            else
                csv << ",,,";
            csv << ',' << std::fixed << std::setprecision(3) << r.seconds
                << std::defaultfloat << std::setprecision(12) << ','
                << detail::csv_field(r.error) << '\n';
        }
        return csv.str();
    }

    std::vector<BatchSummary> summaries() const {
        std::vector<BatchSummary> out;
        const std::size_t reps = static_cast<std::size_t>(repetitions);
        for (std::size_t start = 0; start < rows.size(); start += reps) {
            BatchSummary s;
            s.instance = rows[start].instance;
            double total = 0.0;
            for (std::size_t k = start; k < std::min(start + reps, rows.size()); ++k) {
                const BatchRow& r = rows[k];
                if (!r.ok) continue;
                s.best = s.runs == 0 ? r.objective : std::min(s.best, r.objective);
                s.worst = s.runs == 0 ? r.objective : std::max(s.worst, r.objective);
                total += r.objective;
                s.avg_seconds += r.seconds;
                ++s.runs;
            }
            if (s.runs > 0) {
                s.avg = total / s.runs;
                s.avg_seconds /= s.runs;
            }
            out.push_back(std::move(s));
        }
        return out;
    }
};

// Runs every item x repetition on a worker pool (seed = base + repetition).
// Rows are preallocated and written by job index, so the output order is
// deterministic no matter how the pool schedules. Failures are recorded in
// place and the batch keeps going.
inline BatchResult run_batch(const std::vector<BatchItem>& items, const DriverParams& params,
                             const BatchOptions& opt = {}) {
    const int reps = std::max(1, opt.repetitions);
    BatchResult out;
    out.repetitions = reps;
    out.rows.resize(items.size() * static_cast<std::size_t>(reps));
    if (out.rows.empty()) return out;

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= out.rows.size()) return;
            const std::size_t item = k / static_cast<std::size_t>(reps);
            BatchRow& row = out.rows[k];
            row.instance = items[item].name;
            row.rep = static_cast<int>(k % static_cast<std::size_t>(reps));
            DriverParams p = params;
            p.seed = params.seed + static_cast<std::uint64_t>(row.rep);
            row.seed = p.seed;
            if (!items[item].instance) {
                row.error = items[item].load_error.empty() ? "instance not loaded"
                                                           : items[item].load_error;
                continue;
            }
            const auto t0 = std::chrono::steady_clock::now();
            try {
                SolveResult res =
                    solve(*items[item].instance, p, opt.capture_logs ? &row.log : nullptr);
                row.objective = res.objective;
                row.center = res.center_total;
                row.vehicles = static_cast<int>(res.solution.routes.size());
                row.iterations = res.iterations;
                row.solution = std::move(res.solution);
                row.points = std::move(res.points);
                row.ok = true;
            } catch (const std::exception& e) {
                row.error = e.what();
            }
            row.seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        }
    };

    int workers = opt.workers > 0 ? opt.workers
                                  : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::clamp(workers, 1, static_cast<int>(out.rows.size()));
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    return out;
}

inline BatchResult run_batch(const std::vector<Instance>& instances, const DriverParams& params,
                             const BatchOptions& opt = {}) {
    std::vector<BatchItem> items;
    items.reserve(instances.size());
    for (const auto& inst : instances) items.push_back({inst.name, inst, {}});
    return run_batch(items, params, opt);
}

struct SweepPoint {
    double radius = 0.0;
    double best = 0.0;  // best known objective, carried routes included
    double avg = 0.0;   // average over the independent runs only
    int runs = 0;
};

// Re-solves the same instance with every neighborhood radius overridden per
// sweep value, best of `seeds` independent runs each. Walking the radii in
// ascending order, the best routes found so far are re-evaluated under the
// next radius as well: the same routes through larger disks never get
// longer, so the reported best is non-increasing in the radius by
// construction. Fleet feasibility is center-based and radius-independent,
// which keeps the carried routes valid.
inline std::vector<SweepPoint> sweep_radius(const Instance& inst, const std::vector<double>& radii,
                                            const DriverParams& params, int seeds = 5,
                                            int workers = 0) {
    std::vector<BatchItem> items;
    items.reserve(radii.size());
    for (double r : radii) {
        Instance scaled = with_radius(inst, r);
        std::ostringstream name;
        name << inst.name << "_r" << r;
        items.push_back({name.str(), std::move(scaled), {}});
    }
    BatchOptions opt;
    opt.repetitions = std::max(1, seeds);
    opt.workers = workers;
    const BatchResult res = run_batch(items, params, opt);
    const auto sums = res.summaries();

    std::vector<SweepPoint> out;
    out.reserve(radii.size());
    for (std::size_t i = 0; i < radii.size(); ++i)
        out.push_back({radii[i], sums[i].best, sums[i].avg, sums[i].runs});

    std::vector<std::size_t> order(radii.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return radii[a] < radii[b]; });

    const Solution* carried = nullptr;
    double carried_f = kInf;
    for (std::size_t idx : order) {
        const BatchRow* local = nullptr;
        const std::size_t start = idx * static_cast<std::size_t>(res.repetitions);
        for (std::size_t k = start; k < start + static_cast<std::size_t>(res.repetitions); ++k)
            if (res.rows[k].ok && (!local || res.rows[k].objective < local->objective))
                local = &res.rows[k];
        if (carried) {
            const Instance& scaled = *items[idx].instance;
            carried_f = optimize_solution(*carried, scaled, params.touring).total;
            if (carried_f < out[idx].best || out[idx].runs == 0) out[idx].best = carried_f;
        }
        if (local && (!carried || local->objective <= carried_f)) {
            carried = &local->solution;
            carried_f = local->objective;
        }
    }
    return out;
}

inline std::string sweep_csv(const std::vector<SweepPoint>& points) {
    std::ostringstream csv;
    csv << std::setprecision(12) << "radius,best,avg,runs\n";
    for (const auto& p : points)
        csv << p.radius << ',' << p.best << ',' << p.avg << ',' << p.runs << '\n';
    return csv.str();
}

}  // namespace cegrp
