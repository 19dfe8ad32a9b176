#pragma once

#include <array>
#include <cmath>

namespace srblab {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double a) const { return {a * x, a * y}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
};

inline Vec2 operator*(double a, const Vec2& v) { return {a * v.x, a * v.y}; }
inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double norm(const Vec2& v) { return std::hypot(v.x, v.y); }
inline Vec2 normalized(const Vec2& v) { double n = norm(v); return {v.x / n, v.y / n}; }

inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }

// Unsigned angle between the LINES spanned by a and b (directions are
// equivalence classes up to sign), in [0, pi/2]. The atan2 form is accurate
// down to zero, where an acos-based one bottoms out near 1e-8.
inline double line_angle(const Vec2& a, const Vec2& b) {
    return std::atan2(std::fabs(cross(a, b)), std::fabs(dot(a, b)));
}

// Column-major 2x2 matrix acting on Vec2.
struct Mat2 {
    // [ a b ]
    // [ c d ]
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

    Mat2() = default;
    Mat2(double a_, double b_, double c_, double d_) : a(a_), b(b_), c(c_), d(d_) {}

    Vec2 operator*(const Vec2& v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
    Mat2 operator*(const Mat2& m) const {
        return {a * m.a + b * m.c, a * m.b + b * m.d,
                c * m.a + d * m.c, c * m.b + d * m.d};
    }
    Mat2 operator+(const Mat2& m) const { return {a + m.a, b + m.b, c + m.c, d + m.d}; }
    Mat2 scaled(double s) const { return {s * a, s * b, s * c, s * d}; }

    double det() const { return a * d - b * c; }
    Mat2 inverse() const {
        double dt = det();
        return {d / dt, -b / dt, -c / dt, a / dt};
    }
    Mat2 transpose() const { return {a, c, b, d}; }

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static Mat2 from_columns(const Vec2& u, const Vec2& v) { return {u.x, v.x, u.y, v.y}; }
};

// Singular values of a 2x2 matrix, {smax, smin}, via the closed form.
inline std::array<double, 2> singular_values(const Mat2& m) {
    double e = (m.a + m.d) / 2.0, f = (m.a - m.d) / 2.0;
    double g = (m.c + m.b) / 2.0, h = (m.c - m.b) / 2.0;
    double q = std::hypot(e, h), r = std::hypot(f, g);
    return {q + r, std::fabs(q - r)};
}

// Spectral (operator) norm.
inline double op_norm(const Mat2& m) { return singular_values(m)[0]; }

// A point on the flat 2-torus R^2 / Z^2, coordinates kept in [0, 1).
struct TorusPoint {
    double x = 0.0;
    double y = 0.0;

    TorusPoint() = default;
    TorusPoint(double x_, double y_) : x(x_), y(y_) {}
};

inline double wrap01(double t) {
    double r = t - std::floor(t);
    if (r >= 1.0) r = 0.0;  // guards floor(t) = t for tiny negative t
    return r;
}

inline TorusPoint wrap(double x, double y) { return {wrap01(x), wrap01(y)}; }
inline TorusPoint wrap(const Vec2& v) { return wrap(v.x, v.y); }

// Minimal-norm representative of q - p among the nine integer shifts.
inline Vec2 torus_displacement(const TorusPoint& p, const TorusPoint& q) {
    double dx = q.x - p.x, dy = q.y - p.y;
    dx -= std::round(dx);
    dy -= std::round(dy);
    return {dx, dy};
}

inline double torus_distance(const TorusPoint& p, const TorusPoint& q) {
    return norm(torus_displacement(p, q));
}

inline TorusPoint translate(const TorusPoint& p, const Vec2& v) {
    return wrap(p.x + v.x, p.y + v.y);
}

// Compensated (Kahan) accumulator for order-stable reductions.
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double v) {
        double y = v - carry;
        double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
};

}  // namespace srblab
