#include "srblab/splitting.hpp"

#include <cmath>
#include <stdexcept>

#include "srblab/errors.hpp"

namespace srblab {

namespace {

constexpr double kResidualTol = 1e-6;

// Fixed generic seed for the power iteration; not parallel to either
// eigen-direction of the built-in models.
const Vec2 kSeed{1.0, 0.37};

const TorusPoint kOrigin{0.0, 0.0};

bool pinned_at_fixed_point(const MapModel& m, const TorusPoint& p) {
    return m.kind == MapKind::neutral_cat && torus_distance(p, kOrigin) == 0.0;
}

// Running product of step matrices, renormalized to dodge overflow. Its
// singular-value ratio bounds how much of the seed's misalignment the sweep
// has provably contracted; it stays near 1 when the orbit idles in the
// slow-down region, which is exactly the silent-failure mode of comparing
// consecutive iterates.
struct GapTracker {
    Mat2 P = Mat2::identity();

    void push(const Mat2& T) {
        P = T * P;
        double s = std::sqrt(P.a * P.a + P.b * P.b + P.c * P.c + P.d * P.d);
        if (s > 0.0) P = P.scaled(1.0 / s);
    }

    double ratio() const {
        auto sv = singular_values(P);
        return sv[0] > 0.0 ? sv[1] / sv[0] : 1.0;
    }
};

struct SweepResult {
    Vec2 dir;            // unit direction estimate at the sweep's endpoint
    double last_step;    // angle between the depth and depth-1 estimates
    double gap;          // certified contraction of the sweep product
};

// Push the seed forward along pts[0..last], returning the estimate at
// pts[last]. Both the full-depth and the one-step-shorter iterate are
// carried so the last-step change is observable.
SweepResult forward_sweep(const MapModel& m, const std::vector<TorusPoint>& pts,
                          std::size_t last) {
    Vec2 v = normalized(kSeed);
    Vec2 w = v;
    GapTracker g;
    for (std::size_t i = 0; i < last; ++i) {
        Mat2 T = tangent(m, pts[i]);
        g.push(T);
        v = normalized(T * v);
        if (i > 0) w = normalized(T * w);
    }
    return {v, line_angle(v, w), g.ratio()};
}

SweepResult backward_sweep(const MapModel& m, const std::vector<TorusPoint>& pts,
                           std::size_t first) {
    Vec2 v = normalized(kSeed);
    Vec2 w = v;
    GapTracker g;
    for (std::size_t i = pts.size() - 1; i > first; --i) {
        Mat2 T = tangent_back(m, pts[i]);
        g.push(T);
        v = normalized(T * v);
        if (i + 1 < pts.size()) w = normalized(T * w);
    }
    return {v, line_angle(v, w), g.ratio()};
}

}  // namespace

SplittingSample estimate_splitting(const MapModel& model, const TorusPoint& p,
                                   int depth) {
    if (depth < 8)
        throw std::invalid_argument("estimate_splitting: depth must be >= 8");
    if (pinned_at_fixed_point(model, p))
        return {p, cat::unit_u(), cat::unit_s(), depth, 0.0};

    std::vector<TorusPoint> pts(depth + 1);
    pts[depth] = p;
    for (int k = depth - 1; k >= 0; --k) pts[k] = apply(model, pts[k + 1], -1);
    SweepResult us = forward_sweep(model, pts, depth);

    pts[0] = p;
    for (int k = 1; k <= depth; ++k) pts[k] = apply(model, pts[k - 1], 1);
    SweepResult ss = backward_sweep(model, pts, 0);

    double residual = std::max(std::max(us.last_step, ss.last_step),
                               std::max(us.gap, ss.gap));
    if (residual > kResidualTol)
        throw NonConvergence(
            "estimate_splitting: sweep did not contract at this depth (orbit "
            "spends too long near the neutral fixed point)");
    return {p, us.dir, ss.dir, depth, residual};
}

CocycleTrace cocycle_trace(const MapModel& model, const TorusPoint& p,
                           CocycleDirection direction, int n, int depth) {
    if (n < 1) throw std::invalid_argument("cocycle_trace: n must be >= 1");
    if (depth < 8)
        throw std::invalid_argument("cocycle_trace: depth must be >= 8");

    bool at_s = pinned_at_fixed_point(model, p);
    CocycleTrace out{p, direction, {}};
    out.logs.reserve(n);

    if (direction == CocycleDirection::unstable) {
        // Orbit indices -depth .. n-1; pts[i] holds f^{i-depth}(p).
        std::vector<TorusPoint> pts(depth + n);
        pts[depth] = p;
        for (int k = depth - 1; k >= 0; --k)
            pts[k] = apply(model, pts[k + 1], -1);
        for (int k = depth + 1; k < depth + n; ++k)
            pts[k] = apply(model, pts[k - 1], 1);

        Vec2 v = normalized(kSeed);
        Vec2 w = v;
        GapTracker g;
        for (int i = 0; i < depth + n; ++i) {
            Mat2 T = tangent(model, pts[i]);
            if (i < depth) g.push(T);
            if (i == depth && !at_s) {
                double res = std::max(line_angle(v, w), g.ratio());
                if (res > kResidualTol)
                    throw NonConvergence(
                        "cocycle_trace: unstable direction not converged at "
                        "the trace base");
            }
            if (i == depth && at_s) v = cat::unit_u();
            if (i >= depth) out.logs.push_back(-std::log(norm(T * v)));
            v = normalized(T * v);
            if (i > 0) w = normalized(T * w);
        }
        return out;
    }

    // Stable: orbit indices 0 .. n-1+depth; pull the seed back from the far
    // end and record log ||df | E^s|| at each of the first n points.
    int m_last = n - 1 + depth;
    std::vector<TorusPoint> pts(m_last + 1);
    pts[0] = p;
    for (int k = 1; k <= m_last; ++k) pts[k] = apply(model, pts[k - 1], 1);

    Vec2 v = normalized(kSeed);
    Vec2 w = v;
    GapTracker g;
    out.logs.assign(n, 0.0);
    if (at_s) v = cat::unit_s();
    for (int i = m_last; i >= 1; --i) {
        Mat2 Tb = tangent_back(model, pts[i]);
        if (i > n) g.push(Tb);
        if (i == n && !at_s) {
            double res = std::max(line_angle(v, w), g.ratio());
            if (res > kResidualTol)
                throw NonConvergence(
                    "cocycle_trace: stable direction not converged at the "
                    "last recorded point");
        }
        if (i == n && at_s) v = cat::unit_s();
        Vec2 vn = Tb * v;
        if (i - 1 <= n - 1) out.logs[i - 1] = -std::log(norm(vn));
        v = normalized(vn);
        if (i < m_last) w = normalized(Tb * w);
    }
    return out;
}

double unstable_jacobian(const MapModel& model, const TorusPoint& p,
                         int depth) {
    SplittingSample s = estimate_splitting(model, p, depth);
    return norm(tangent(model, p) * s.e_u);
}

double stable_jacobian(const MapModel& model, const TorusPoint& p, int depth) {
    SplittingSample s = estimate_splitting(model, p, depth);
    return norm(tangent(model, p) * s.e_s);
}

}  // namespace srblab
