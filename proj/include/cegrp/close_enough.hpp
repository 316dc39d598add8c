#pragma once

#include <vector>

#include "cegrp/geometry.hpp"
#include "cegrp/instance.hpp"
#include "cegrp/solution.hpp"

// Close-enough phase: given a fixed visit sequence, choose one representative
// point inside each disk to minimize the chain length. The problem is convex
// (a sum of norms over points constrained to disks), so cyclic coordinate
// descent with exact per-disk minimizers converges to the global optimum; each
// coordinate step is best_point_on_disk against the current neighbors.

namespace cegrp {

struct TouringParams {
    double tol = 1e-7;    // stop when a full pass improves less than this
    int max_passes = 1000;
};

struct TouringResult {
    std::vector<Point2> points;
    double length = 0.0;
    int passes = 0;
    bool converged = false;
};

inline double chain_length(const std::vector<Point2>& pts) {
    double len = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) len += dist(pts[i], pts[i + 1]);
    return len;
}

// `trace`, when given, receives the chain length after every pass.
inline TouringResult optimize_points(const std::vector<Disk>& chain,
                                     const TouringParams& params = {},
                                     std::vector<double>* trace = nullptr) {
    TouringResult res;
    res.points.reserve(chain.size());
    bool any_free = false;
    for (const auto& d : chain) {
        res.points.push_back(d.center);
        any_free = any_free || d.radius > 0.0;
    }
    res.length = chain_length(res.points);
    if (!any_free || chain.size() < 3) {
        res.converged = true;
        return res;
    }
    for (int pass = 0; pass < params.max_passes; ++pass) {
        for (std::size_t i = 0; i < chain.size(); ++i) {
            if (chain[i].radius <= 0.0) continue;
            if (i == 0) {
                res.points[i] = project_to_disk(res.points[i + 1], chain[i]);
            } else if (i + 1 == chain.size()) {
                res.points[i] = project_to_disk(res.points[i - 1], chain[i]);
            } else {
                res.points[i] =
                    best_point_on_disk(res.points[i - 1], res.points[i + 1], chain[i]).first;
            }
        }
        const double len = chain_length(res.points);
        res.passes = pass + 1;
        if (trace) trace->push_back(len);
        const double gain = res.length - len;
        res.length = len;
        if (gain < params.tol) {
            res.converged = true;
            break;
        }
    }
    return res;
}

inline TouringResult optimize_route_points(const Route& route, const Instance& inst,
                                           const TouringParams& params = {},
                                           std::vector<double>* trace = nullptr) {
    return optimize_points(vertex_sequence(route, inst), params, trace);
}

struct CloseEnoughResult {
    PointAssignment points;
    double total = 0.0;
};

inline CloseEnoughResult optimize_solution(const Solution& sol, const Instance& inst,
                                           const TouringParams& params = {}) {
    CloseEnoughResult out;
    out.points.routes.reserve(sol.routes.size());
    for (const auto& r : sol.routes) {
        TouringResult tr = optimize_route_points(r, inst, params);
        out.total += tr.length;
        out.points.routes.push_back(std::move(tr.points));
    }
    return out;
}

}  // namespace cegrp
