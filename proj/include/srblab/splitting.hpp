#pragma once

#include <vector>

#include "srblab/dynamics.hpp"
#include "srblab/geometry.hpp"

namespace srblab {

enum class CocycleDirection { unstable, stable };

// Direction pair of the invariant splitting at a point, estimated by
// finite-depth power iteration along the orbit. residual is a conservative
// error estimate in radians: the larger of the last-step direction change
// and the certified contraction bound accumulated along the sweep (the
// latter is what catches orbits that idle near the neutral fixed point,
// where consecutive iterates agree without having converged).
struct SplittingSample {
    TorusPoint point;
    Vec2 e_u;
    Vec2 e_s;
    int depth = 0;
    double residual = 0.0;
};

// Per-step log norms of the restricted derivative along a forward orbit
// segment. Unstable: logs[k] = log ||df^-1 | E^u(f^{k+1} p)||; stable:
// logs[k] = log ||df | E^s(f^k p)||. Entries <= 0 mean the step behaves
// hyperbolically.
struct CocycleTrace {
    TorusPoint base;
    CocycleDirection direction;
    std::vector<double> logs;
};

// Power-iteration estimate of (e_u, e_s) at p. Throws NonConvergence when
// the error estimate exceeds 1e-6 at the given depth (the orbit spends too
// much of the window in the slow-down region). depth >= 8.
SplittingSample estimate_splitting(const MapModel& model, const TorusPoint& p,
                                   int depth);

CocycleTrace cocycle_trace(const MapModel& model, const TorusPoint& p,
                           CocycleDirection direction, int n, int depth = 24);

// ||tangent(p) e_u(p)||; >= 1 on the built-in models.
double unstable_jacobian(const MapModel& model, const TorusPoint& p,
                         int depth = 24);

// ||tangent(p) e_s(p)||; <= 1 on the built-in models.
double stable_jacobian(const MapModel& model, const TorusPoint& p,
                       int depth = 24);

}  // namespace srblab
