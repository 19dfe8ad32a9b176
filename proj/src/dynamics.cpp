#include "srblab/dynamics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace srblab {

namespace cat {

Vec2 unit_u() {
    double beta = (sqrt5 - 1.0) / 2.0;
    return normalized(Vec2{1.0, beta});
}

Vec2 unit_s() {
    double phi = (sqrt5 + 1.0) / 2.0;
    return normalized(Vec2{1.0, -phi});
}

Mat2 eigenframe() { return Mat2::from_columns(unit_u(), unit_s()); }

}  // namespace cat

MapModel MapModel::linear_cat() { return MapModel{MapKind::linear_cat, 0.0, 0}; }

MapModel MapModel::neutral_cat(double r0, int integrator_steps) {
    if (!(r0 > 0.0 && r0 <= 0.1))
        throw std::invalid_argument("neutral_cat: r0 must lie in (0, 0.1]");
    if (integrator_steps < 8)
        throw std::invalid_argument("neutral_cat: integrator_steps must be >= 8");
    return MapModel{MapKind::neutral_cat, r0, integrator_steps};
}

namespace {

// The flow differs from the linear action only on trajectories that meet the
// slow-down disk. Unit-time trajectories of the linear flow satisfy
// |L^t z| >= |z| / lambda1 for |t| <= 1, so outside 3 r0 (> lambda1 r0) the
// time-1 map in either direction is exactly the cat map.
inline double activation_radius(const MapModel& m) { return 3.0 * m.r0; }

inline TorusPoint cat_step(const TorusPoint& p) {
    return wrap(2.0 * p.x + p.y, p.x + p.y);
}

inline TorusPoint cat_step_inv(const TorusPoint& p) {
    return wrap(p.x - p.y, -p.x + 2.0 * p.y);
}

struct Psi {
    double value;
    double deriv;
};

Psi eval_psi(double rho, double r0) {
    double b = r0 * r0;
    double a = 0.9 * b;
    if (rho >= b) return {1.0, 0.0};
    if (rho <= a) return {rho / b, 1.0 / b};
    // Quintic bridge between the linear ramp and the plateau, matching value,
    // slope and curvature at both ends, so the profile is C^2 and monotone.
    // In t = (rho - a) / (b - a): p = 0.9 + 0.1 t + 0.4 t^3 - 0.7 t^4 + 0.3 t^5.
    double w = b - a;
    double t = (rho - a) / w;
    double p = 0.9 + t * (0.1 + t * t * (0.4 + t * (-0.7 + 0.3 * t)));
    double dp = 0.1 + t * t * (1.2 + t * (-2.8 + 1.5 * t));
    return {p, dp / w};
}

inline Vec2 flow_field(const Vec2& z, double r0, double sign) {
    double rho = z.x * z.x + z.y * z.y;
    double g = sign * cat::log_lambda1 * eval_psi(rho, r0).value;
    return {g * z.x, -g * z.y};
}

Vec2 rk4_flow(Vec2 z, double r0, double sign, int steps) {
    double h = 1.0 / steps;
    for (int i = 0; i < steps; ++i) {
        Vec2 k1 = flow_field(z, r0, sign);
        Vec2 k2 = flow_field(z + (h / 2.0) * k1, r0, sign);
        Vec2 k3 = flow_field(z + (h / 2.0) * k2, r0, sign);
        Vec2 k4 = flow_field(z + h * k3, r0, sign);
        z += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return z;
}

struct FlowState {
    Vec2 z;
    Mat2 V;
};

inline FlowState variational_field(const FlowState& s, double r0, double sign) {
    double u = s.z.x, v = s.z.y;
    double rho = u * u + v * v;
    Psi p = eval_psi(rho, r0);
    double L = sign * cat::log_lambda1;
    Mat2 DX{L * (p.value + 2.0 * u * u * p.deriv), L * 2.0 * u * v * p.deriv,
            -L * 2.0 * u * v * p.deriv, -L * (p.value + 2.0 * v * v * p.deriv)};
    return {Vec2{L * p.value * u, -L * p.value * v}, DX * s.V};
}

FlowState rk4_variational(FlowState s, double r0, double sign, int steps) {
    double h = 1.0 / steps;
    auto axpy = [](const FlowState& a, double c, const FlowState& b) {
        return FlowState{a.z + c * b.z, a.V + b.V.scaled(c)};
    };
    for (int i = 0; i < steps; ++i) {
        FlowState k1 = variational_field(s, r0, sign);
        FlowState k2 = variational_field(axpy(s, h / 2.0, k1), r0, sign);
        FlowState k3 = variational_field(axpy(s, h / 2.0, k2), r0, sign);
        FlowState k4 = variational_field(axpy(s, h, k3), r0, sign);
        s.z += (h / 6.0) * (k1.z + 2.0 * k2.z + 2.0 * k3.z + k4.z);
        s.V = s.V + (k1.V + (k2.V + k3.V).scaled(2.0) + k4.V).scaled(h / 6.0);
    }
    return s;
}

const TorusPoint kNeutralFixedPoint{0.0, 0.0};

TorusPoint neutral_step(const MapModel& m, const TorusPoint& p, double sign) {
    Vec2 w = torus_displacement(kNeutralFixedPoint, p);
    if (norm(w) >= activation_radius(m))
        return sign > 0.0 ? cat_step(p) : cat_step_inv(p);
    Mat2 R = cat::eigenframe();
    Vec2 z = R.transpose() * w;
    z = rk4_flow(z, m.r0, sign, m.integrator_steps);
    return wrap(R * z);
}

Mat2 neutral_tangent(const MapModel& m, const TorusPoint& p, double sign) {
    Vec2 w = torus_displacement(kNeutralFixedPoint, p);
    if (norm(w) >= activation_radius(m))
        return sign > 0.0 ? cat::A : cat::A_inv;
    Mat2 R = cat::eigenframe();
    FlowState s{R.transpose() * w, Mat2::identity()};
    s = rk4_variational(s, m.r0, sign, m.integrator_steps);
    return R * s.V * R.transpose();
}

}  // namespace

TorusPoint apply(const MapModel& model, const TorusPoint& p, long long n) {
    TorusPoint q = p;
    if (model.kind == MapKind::linear_cat) {
        if (n >= 0)
            for (long long i = 0; i < n; ++i) q = cat_step(q);
        else
            for (long long i = 0; i < -n; ++i) q = cat_step_inv(q);
        return q;
    }
    if (n >= 0)
        for (long long i = 0; i < n; ++i) q = neutral_step(model, q, +1.0);
    else
        for (long long i = 0; i < -n; ++i) q = neutral_step(model, q, -1.0);
    return q;
}

Mat2 tangent(const MapModel& model, const TorusPoint& p) {
    if (model.kind == MapKind::linear_cat) return cat::A;
    return neutral_tangent(model, p, +1.0);
}

Mat2 tangent_back(const MapModel& model, const TorusPoint& p) {
    if (model.kind == MapKind::linear_cat) return cat::A_inv;
    return neutral_tangent(model, p, -1.0);
}

std::vector<TorusPoint> exceptional_set(const MapModel& model) {
    if (model.kind == MapKind::linear_cat) return {};
    return {kNeutralFixedPoint};
}

double distance_to_S(const MapModel& model, const TorusPoint& p) {
    if (model.kind == MapKind::linear_cat)
        return std::numeric_limits<double>::infinity();
    return torus_distance(kNeutralFixedPoint, p);
}

double slowdown_psi(const MapModel& model, double rho) {
    if (model.kind == MapKind::linear_cat) return 1.0;
    return eval_psi(rho, model.r0).value;
}

double slowdown_psi_prime(const MapModel& model, double rho) {
    if (model.kind == MapKind::linear_cat) return 0.0;
    return eval_psi(rho, model.r0).deriv;
}

double eigen_radius_sq(const TorusPoint& p) {
    Vec2 w = torus_displacement(TorusPoint{0.0, 0.0}, p);
    return w.x * w.x + w.y * w.y;  // eigenframe is orthogonal
}

double kappa_bound(const MapModel& model, int grid) {
    if (model.kind == MapKind::linear_cat) return cat::lambda1;
    // The map is exactly linear outside the activation radius, where both
    // norms equal lambda1. Inside, sample a polar grid around S; resolution
    // in radius matters because the boundary layer of the slow-down disk
    // slightly overshoots the linear rates.
    double best = cat::lambda1;
    Mat2 R = cat::eigenframe();
    double rmax = activation_radius(model);
    for (int i = 1; i <= grid; ++i) {
        double r = rmax * i / grid;
        for (int j = 0; j < grid; ++j) {
            double th = 2.0 * M_PI * j / grid;
            Vec2 w = R * Vec2{r * std::cos(th), r * std::sin(th)};
            Mat2 T = tangent(model, wrap(w));
            best = std::max(best, std::max(op_norm(T), op_norm(T.inverse())));
        }
    }
    return best;
}

}  // namespace srblab
