#pragma once

#include <vector>

#include "srblab/geometry.hpp"

namespace srblab {

enum class MapKind { linear_cat, neutral_cat };

// Constants of the hyperbolic automorphism (x, y) -> (2x + y, x + y) mod 1.
namespace cat {
inline const double sqrt5 = 2.2360679774997896964;
inline const double lambda1 = (3.0 + sqrt5) / 2.0;          // expanding eigenvalue
inline const double log_lambda1 = 0.96242365011920689500;   // log lambda1
inline const Mat2 A{2.0, 1.0, 1.0, 1.0};
inline const Mat2 A_inv{1.0, -1.0, -1.0, 2.0};

// Orthonormal eigenframe (A is symmetric). unit_u spans the expanding line.
Vec2 unit_u();
Vec2 unit_s();
Mat2 eigenframe();  // columns (unit_u, unit_s); orthogonal
}  // namespace cat

// A self-map of the 2-torus. neutral_cat replaces the linear action inside
// the disk of radius r0 around the fixed point (0,0), in eigen-coordinates
// (u, s), by the time-1 map of the slowed flow
//     u' =  u psi(u^2 + s^2) log lambda1
//     s' = -s psi(u^2 + s^2) log lambda1
// where psi(rho) = min(1, rho / r0^2), smoothed by a monotone C^2 quintic
// blend on [0.9, 1.0] r0^2. The flow is integrated with fixed-step RK4.
struct MapModel {
    MapKind kind = MapKind::linear_cat;
    double r0 = 0.01;          // slow-down disk radius (neutral_cat only)
    int integrator_steps = 64; // RK4 substeps for the unit-time flow map

    static MapModel linear_cat();
    static MapModel neutral_cat(double r0 = 0.01, int integrator_steps = 64);
};

// n-fold application; n may be negative (inverse iterates).
TorusPoint apply(const MapModel& model, const TorusPoint& p, long long n);

// Derivative of one forward step at p (in torus coordinates).
Mat2 tangent(const MapModel& model, const TorusPoint& p);

// Derivative of one backward step at p, i.e. d(f^{-1}) at p.
Mat2 tangent_back(const MapModel& model, const TorusPoint& p);

// Exceptional set S: empty for linear_cat, {(0,0)} for neutral_cat.
std::vector<TorusPoint> exceptional_set(const MapModel& model);

// Torus distance to S; +infinity when S is empty.
double distance_to_S(const MapModel& model, const TorusPoint& p);

// Slow-down profile psi and its derivative (exposed for diagnostics and
// the exact Jacobian identity det df = psi(f(z)) / psi(z) in eigen coords).
double slowdown_psi(const MapModel& model, double rho);
double slowdown_psi_prime(const MapModel& model, double rho);

// Squared eigen-coordinate distance from (0,0) of the nearest-image lift.
double eigen_radius_sq(const TorusPoint& p);

// max over the torus of max(|df|, |df^{-1}|) in operator norm, estimated on
// a grid. For both built-in models this is lambda1 up to grid resolution.
double kappa_bound(const MapModel& model, int grid = 64);

}  // namespace srblab
