#pragma once

#include <cmath>
#include <utility>

// Planar Euclidean primitives shared by the whole solver: distances, disk
// projection, and the single-disk touring step (best visiting point of a disk
// between two fixed neighbors) that drives the representative-point optimizer.

namespace cegrp {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

inline bool operator==(const Point2& a, const Point2& b) {
    return a.x == b.x && a.y == b.y;
}

struct Disk {
    Point2 center;
    double radius = 0.0;  // radius 0 encodes a fixed point
};

inline double dist(const Point2& a, const Point2& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

// Nearest point of the closed disk to p: p itself when inside, otherwise the
// boundary point on the ray center -> p.
inline Point2 project_to_disk(const Point2& p, const Disk& d) {
    const double dc = dist(p, d.center);
    if (dc <= d.radius) return p;
    const double s = d.radius / dc;
    return {d.center.x + (p.x - d.center.x) * s,
            d.center.y + (p.y - d.center.y) * s};
}

namespace detail {

inline constexpr double kGeomEps = 1e-12;

// Smallest segment parameter t in [0,1] with |a + t*(b-a) - center| = radius,
// assuming the segment does intersect the closed disk. If a is already inside,
// returns 0.
// Parameter of the middle of the chord segment(a,b) ∩ disk, clamped to [0,1].
inline double disk_chord_mid_param(const Point2& a, const Point2& b, const Disk& d) {
    const double ux = b.x - a.x, uy = b.y - a.y;
    const double wx = a.x - d.center.x, wy = a.y - d.center.y;
    const double qa = ux * ux + uy * uy;
    const double qb = wx * ux + wy * uy;
    const double qc = wx * wx + wy * wy - d.radius * d.radius;
    const double disc = qb * qb - qa * qc;
    if (disc <= 0.0 || qa == 0.0) {
        // Tangency / degeneracy: fall back to the closest approach point.
        return qa > 0.0 ? std::clamp(-qb / qa, 0.0, 1.0) : 0.0;
    }
    const double root = std::sqrt(disc);
    const double t0 = std::clamp((-qb - root) / qa, 0.0, 1.0);
    const double t1 = std::clamp((-qb + root) / qa, 0.0, 1.0);
    return 0.5 * (t0 + t1);
}

inline bool segment_intersects_disk(const Point2& a, const Point2& b, const Disk& d) {
    const double ux = b.x - a.x, uy = b.y - a.y;
    const double len2 = ux * ux + uy * uy;
    double t = 0.0;
    if (len2 > 0.0) {
        t = std::clamp(((d.center.x - a.x) * ux + (d.center.y - a.y) * uy) / len2, 0.0, 1.0);
    }
    const Point2 closest{a.x + t * ux, a.y + t * uy};
    return dist(closest, d.center) <= d.radius + kGeomEps;
}

}  // namespace detail

// Point of the disk minimizing dist(a,p) + dist(p,b), with that minimum.
//
// Three regimes: (1) the segment a-b crosses the disk, so the minimum equals
// dist(a,b) and we return the middle of the chord; every chord point is
// optimal, and the midpoint stays clear of a neighbor that sits inside the
// disk, which keeps coordinate descent over a chain from pinning two
// consecutive points together; (2) a == b, where the answer is the disk point
// nearest a;
// (3) otherwise the optimum sits on the boundary and the restricted objective
// is unimodal over the facing arc, so a coarse angular scan brackets it and
// golden-section refines to ~1e-9 on the objective.
inline std::pair<Point2, double> best_point_on_disk(const Point2& a, const Point2& b,
                                                    const Disk& d) {
    if (d.radius <= 0.0) {
        return {d.center, dist(a, d.center) + dist(d.center, b)};
    }
    if (a == b) {
        const Point2 p = project_to_disk(a, d);
        return {p, 2.0 * dist(a, p)};
    }
    if (detail::segment_intersects_disk(a, b, d)) {
        const double t = detail::disk_chord_mid_param(a, b, d);
        const Point2 p{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
        return {p, dist(a, b)};
    }

    const auto at_angle = [&](double th) -> Point2 {
        return {d.center.x + d.radius * std::cos(th), d.center.y + d.radius * std::sin(th)};
    };
    const auto objective = [&](double th) {
        const Point2 p = at_angle(th);
        return dist(a, p) + dist(p, b);
    };

    // Coarse scan; the cyclically unimodal objective is then bracketed by the
    // best sample's neighbors.
    constexpr int kScan = 64;
    constexpr double kTwoPi = 6.283185307179586476925286766559;
    int best_k = 0;
    double best_val = objective(0.0);
    for (int k = 1; k < kScan; ++k) {
        const double v = objective(kTwoPi * k / kScan);
        if (v < best_val) {
            best_val = v;
            best_k = k;
        }
    }
    double lo = kTwoPi * (best_k - 1) / kScan;
    double hi = kTwoPi * (best_k + 1) / kScan;

    constexpr double kInvPhi = 0.6180339887498948482;
    double x1 = hi - kInvPhi * (hi - lo);
    double x2 = lo + kInvPhi * (hi - lo);
    double f1 = objective(x1);
    double f2 = objective(x2);
    for (int it = 0; it < 80 && hi - lo > 1e-13; ++it) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - kInvPhi * (hi - lo);
            f1 = objective(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + kInvPhi * (hi - lo);
            f2 = objective(x2);
        }
    }
    const double th = f1 <= f2 ? x1 : x2;
    const Point2 p = at_angle(th);
    return {p, dist(a, p) + dist(p, b)};
}

}  // namespace cegrp
