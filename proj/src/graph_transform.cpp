#include "srblab/graph_transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "srblab/errors.hpp"
#include "srblab/splitting.hpp"

namespace srblab {
namespace {

constexpr int kSplitDepth = 24;
constexpr double kLipSlack = 1e-9;
constexpr double kCollapseRadius = 1e-12;
// Forward/backward integrator roundtrip defect is ~3e-10 per slow-annulus
// step and can compound to ~1e-8 across a deep excursion; base mismatches
// beyond this are structural errors, not integrator noise.
constexpr double kBaseMismatch = 1e-7;

// Shape-preserving cubic interpolant (Fritsch-Carlson slopes) on a strictly
// increasing, possibly non-uniform grid. Reproduces affine data exactly and
// never overshoots local extrema of the samples.
class PchipCurve {
  public:
    PchipCurve(std::vector<double> x, std::vector<double> y)
        : x_(std::move(x)), y_(std::move(y)) {
        int n = static_cast<int>(x_.size());
        if (n < 2 || y_.size() != x_.size())
            throw std::invalid_argument("interpolation needs >= 2 samples");
        d_.resize(n);
        if (n == 2) {
            d_[0] = d_[1] = (y_[1] - y_[0]) / (x_[1] - x_[0]);
            return;
        }
        std::vector<double> h(n - 1), del(n - 1);
        for (int i = 0; i + 1 < n; ++i) {
            h[i] = x_[i + 1] - x_[i];
            if (!(h[i] > 0.0))
                throw std::invalid_argument("interpolation grid not increasing");
            del[i] = (y_[i + 1] - y_[i]) / h[i];
        }
        for (int i = 1; i + 1 < n; ++i) {
            if (del[i - 1] * del[i] <= 0.0) {
                d_[i] = 0.0;
            } else {
                double w1 = 2.0 * h[i] + h[i - 1];
                double w2 = h[i] + 2.0 * h[i - 1];
                d_[i] = (w1 + w2) / (w1 / del[i - 1] + w2 / del[i]);
            }
        }
        d_[0] = edge_slope(h[0], h[1], del[0], del[1]);
        d_[n - 1] = edge_slope(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
    }

    double eval(double q) const {
        int i = interval(q);
        double h = x_[i + 1] - x_[i];
        double t = (q - x_[i]) / h;
        double t2 = t * t, t3 = t2 * t;
        return y_[i] * (2.0 * t3 - 3.0 * t2 + 1.0) +
               h * d_[i] * (t3 - 2.0 * t2 + t) +
               y_[i + 1] * (-2.0 * t3 + 3.0 * t2) + h * d_[i + 1] * (t3 - t2);
    }

    double slope(double q) const {
        int i = interval(q);
        double h = x_[i + 1] - x_[i];
        double t = (q - x_[i]) / h;
        double t2 = t * t;
        return y_[i] * (6.0 * t2 - 6.0 * t) / h +
               d_[i] * (3.0 * t2 - 4.0 * t + 1.0) +
               y_[i + 1] * (6.0 * t - 6.0 * t2) / h + d_[i + 1] * (3.0 * t2 - 2.0 * t);
    }

  private:
    static double edge_slope(double h0, double h1, double del0, double del1) {
        double d = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
        if (d * del0 <= 0.0) return 0.0;
        if (del0 * del1 < 0.0 && std::fabs(d) > 3.0 * std::fabs(del0))
            return 3.0 * del0;
        return d;
    }

    int interval(double q) const {
        int n = static_cast<int>(x_.size());
        auto it = std::upper_bound(x_.begin(), x_.end(), q);
        int i = static_cast<int>(it - x_.begin()) - 1;
        return std::clamp(i, 0, n - 2);
    }

    std::vector<double> x_, y_, d_;
};

std::vector<double> patch_grid(const GraphPatch& g) {
    int n = static_cast<int>(g.s.size());
    std::vector<double> u(n);
    for (int i = 0; i < n; ++i) u[i] = g.u_at(i);
    return u;
}

double chord_lip(const std::vector<double>& u, const std::vector<double>& s) {
    double lip = 0.0;
    for (size_t i = 1; i < u.size(); ++i)
        lip = std::max(lip, std::fabs(s[i] - s[i - 1]) / (u[i] - u[i - 1]));
    return lip;
}

void require_transform_input(const GraphPatch& g) {
    g.validate();
    int n = static_cast<int>(g.s.size());
    if (n < 3 || n % 2 == 0)
        throw std::invalid_argument(
            "transform input needs an odd sample count >= 3");
    if (std::fabs(g.s[(n - 1) / 2]) > 1e-10)
        throw std::invalid_argument("transform input graph has g(0) != 0");
    std::vector<double> u = patch_grid(g);
    if (chord_lip(u, g.s) > 1.0 + kLipSlack)
        throw HypothesisViolated("input graph is not 1-Lipschitz");
}

struct TransformResult {
    GraphPatch patch;
    double pre_clamp_radius = 0.0;
};

// Image of the graph under the `steps`-fold map, read in the destination
// chart. Checks the measured Lipschitz distance between the chart map and
// its linearization at 0 on the working square and along the graph, then
// projects, regrids and recenters.
TransformResult transform_core(const MapModel& model, const Chart& src,
                               const Chart& dst, const GraphPatch& g,
                               int steps, const GrowthParams& params) {
    if (steps < 1) throw std::invalid_argument("transform needs steps >= 1");
    require_transform_input(g);
    if (!(src.rho > 0.0) || !(dst.rho > 0.0))
        throw std::invalid_argument("transform charts need positive radius");
    TorusPoint fwd = apply(model, src.base, steps);
    double mismatch = torus_distance(fwd, dst.base);
    if (mismatch > kBaseMismatch)
        throw std::invalid_argument(
            "destination chart base is not the forward image of the source "
            "base (distance " + std::to_string(mismatch) + ")");

    GraphPatch work = g;
    if (work.radius > src.rho * (1.0 + 1e-12))
        work = resample_graph(work, src.rho, static_cast<int>(g.s.size()));
    double l = work.radius;

    Mat2 m_src = Mat2::from_columns(src.e_u, src.e_s);
    Mat2 m_dst_inv = Mat2::from_columns(dst.e_u, dst.e_s).inverse();
    Mat2 deriv = Mat2::identity();
    TorusPoint z = src.base;
    for (int k = 0; k < steps; ++k) {
        deriv = tangent(model, z) * deriv;
        z = apply(model, z, 1);
    }
    Mat2 lin = m_dst_inv * (deriv * m_src);

    auto chart_map = [&](double u, double s) -> Vec2 {
        TorusPoint w = chart_point(src, u, s);
        TorusPoint fw = apply(model, w, steps);
        return m_dst_inv * torus_displacement(dst.base, fw);
    };

    // Residual Lipschitz constant over all pairs of a square sample grid.
    const int hs = 5;
    Vec2 sq[hs * hs];
    Vec2 res[hs * hs];
    for (int i = 0; i < hs; ++i) {
        for (int j = 0; j < hs; ++j) {
            Vec2 p{-l + 2.0 * l * i / (hs - 1), -l + 2.0 * l * j / (hs - 1)};
            sq[i * hs + j] = p;
            res[i * hs + j] = chart_map(p.x, p.y) - lin * p;
        }
    }
    double measured = 0.0;
    for (int a = 0; a < hs * hs; ++a) {
        for (int b = a + 1; b < hs * hs; ++b) {
            double gap = norm(sq[a] - sq[b]);
            measured = std::max(measured, norm(res[a] - res[b]) / gap);
        }
    }

    int n = static_cast<int>(work.s.size());
    std::vector<double> u = patch_grid(work);
    std::vector<double> img_u(n), img_s(n);
    Vec2 prev_res;
    Vec2 prev_z;
    for (int i = 0; i < n; ++i) {
        Vec2 zi{u[i], work.s[i]};
        Vec2 w = chart_map(zi.x, zi.y);
        img_u[i] = w.x;
        img_s[i] = w.y;
        Vec2 r = w - lin * zi;
        if (i > 0)
            measured = std::max(measured,
                                norm(r - prev_res) / norm(zi - prev_z));
        prev_res = r;
        prev_z = zi;
    }
    if (measured >= params.region.eps_hat())
        throw HypothesisViolated(
            "linearization residual has Lipschitz constant " +
            std::to_string(measured) + " on the working ball (budget " +
            std::to_string(params.region.eps_hat()) + ", radius " +
            std::to_string(l) + ", steps " + std::to_string(steps) + ")");

    for (int i = 1; i < n; ++i)
        if (!(img_u[i] > img_u[i - 1]))
            throw HypothesisViolated(
                "image projection onto the unstable axis is not strictly "
                "increasing");

    double cover = std::min(-img_u.front(), img_u.back());
    if (!(cover > 0.0))
        throw DomainCollapse("image covers no symmetric ball around 0");
    double l_out = std::min(cover, dst.rho);

    PchipCurve curve(std::move(img_u), std::move(img_s));
    GraphPatch out;
    out.base = dst.base;
    out.radius = l_out;
    out.s.resize(params.grid);
    double center = curve.eval(0.0);
    for (int j = 0; j < params.grid; ++j) {
        double q = l_out * (2.0 * j / (params.grid - 1) - 1.0);
        out.s[j] = curve.eval(q) - center;
    }
    out.s[(params.grid - 1) / 2] = 0.0;
    std::vector<double> ug = patch_grid(out);
    out.lip = chord_lip(ug, out.s);
    if (out.lip > 1.0 + kLipSlack)
        throw HypothesisViolated("transformed graph is not 1-Lipschitz");
    return {std::move(out), cover};
}

struct Excursion {
    int q = 0;
    int p = 0;
    int m = 0;
};

}  // namespace

double GrowthParams::decay() const {
    return nine * region.lambda / (2.0 * region.K);
}

double GrowthParams::excursion_radius(long m) const {
    return region.C_graph * std::exp(-decay() * static_cast<double>(m));
}

double GrowthParams::multi_radius(long n, double r) const {
    return region.C_graph * r * std::exp(-decay() * static_cast<double>(n));
}

void GrowthParams::validate() const {
    region.validate();
    if (!(rho1 > 0.0)) throw std::invalid_argument("rho1 must be positive");
    if (!(nine > 0.0))
        throw std::invalid_argument("decay numerator must be positive");
    if (grid < 3 || grid % 2 == 0)
        throw std::invalid_argument("grid must be odd and >= 3");
}

Chart make_chart(const MapModel& model, const TorusPoint& p, double rho1,
                 const RegionParams& region) {
    region.validate();
    if (!(rho1 > 0.0)) throw std::invalid_argument("rho1 must be positive");
    SplittingSample spl = estimate_splitting(model, p, kSplitDepth);
    double d = distance_to_S(model, p);
    Chart chart;
    chart.base = p;
    chart.e_u = spl.e_u;
    chart.e_s = spl.e_s;
    chart.rho = rho1 * std::min(1.0, d / region.eps1);
    auto sv = singular_values(Mat2::from_columns(spl.e_u, spl.e_s));
    chart.K1 = sv[1];
    chart.K2 = sv[0];
    return chart;
}

TorusPoint chart_point(const Chart& chart, double u, double s) {
    return translate(chart.base, u * chart.e_u + s * chart.e_s);
}

Vec2 chart_coords(const Chart& chart, const TorusPoint& q) {
    Vec2 w = torus_displacement(chart.base, q);
    return Mat2::from_columns(chart.e_u, chart.e_s).inverse() * w;
}

double GraphPatch::u_at(int i) const {
    int n = static_cast<int>(s.size());
    return radius * (2.0 * i / (n - 1) - 1.0);
}

void GraphPatch::validate() const {
    if (!(radius > 0.0) || !std::isfinite(radius))
        throw std::invalid_argument("graph patch needs a positive radius");
    if (s.size() < 2)
        throw std::invalid_argument("graph patch needs >= 2 samples");
    for (double v : s)
        if (!std::isfinite(v))
            throw std::invalid_argument("graph patch has a non-finite sample");
}

GraphPatch zero_graph(const TorusPoint& base, double radius, int grid) {
    if (!(radius > 0.0))
        throw std::invalid_argument("graph patch needs a positive radius");
    if (grid < 3 || grid % 2 == 0)
        throw std::invalid_argument("grid must be odd and >= 3");
    GraphPatch g;
    g.base = base;
    g.radius = radius;
    g.s.assign(grid, 0.0);
    g.lip = 0.0;
    return g;
}

double eval_graph(const GraphPatch& patch, double u) {
    patch.validate();
    if (std::fabs(u) > patch.radius * (1.0 + 1e-12))
        throw std::invalid_argument("evaluation point outside the patch");
    std::vector<double> x = patch_grid(patch);
    if (patch.s.size() == 2) {
        double slope = (patch.s[1] - patch.s[0]) / (x[1] - x[0]);
        return patch.s[0] + slope * (u - x[0]);
    }
    return PchipCurve(std::move(x), patch.s).eval(u);
}

double graph_slope(const GraphPatch& patch, double u) {
    patch.validate();
    if (std::fabs(u) > patch.radius * (1.0 + 1e-12))
        throw std::invalid_argument("evaluation point outside the patch");
    std::vector<double> x = patch_grid(patch);
    if (patch.s.size() == 2)
        return (patch.s[1] - patch.s[0]) / (x[1] - x[0]);
    return PchipCurve(std::move(x), patch.s).slope(u);
}

GraphPatch resample_graph(const GraphPatch& patch, double new_radius,
                          int grid) {
    patch.validate();
    if (grid < 3 || grid % 2 == 0)
        throw std::invalid_argument("grid must be odd and >= 3");
    if (!(new_radius > 0.0))
        throw std::invalid_argument("graph patch needs a positive radius");
    if (new_radius > patch.radius * (1.0 + 1e-12))
        throw std::invalid_argument("resampling cannot extrapolate the patch");
    new_radius = std::min(new_radius, patch.radius);
    PchipCurve curve(patch_grid(patch), patch.s);
    GraphPatch out;
    out.base = patch.base;
    out.radius = new_radius;
    out.s.resize(grid);
    for (int j = 0; j < grid; ++j)
        out.s[j] = curve.eval(new_radius * (2.0 * j / (grid - 1) - 1.0));
    std::vector<double> u = patch_grid(out);
    out.lip = chord_lip(u, out.s);
    return out;
}

GraphPatch one_step_transform(const MapModel& model, const Chart& chart_src,
                              const Chart& chart_dst, const GraphPatch& g,
                              const GrowthParams& params) {
    params.validate();
    return transform_core(model, chart_src, chart_dst, g, 1, params).patch;
}

GraphPatch multi_step_transform(const MapModel& model, const TorusPoint& p,
                                int n, const GraphPatch& g, double r,
                                const GrowthParams& params) {
    params.validate();
    if (n < 1) throw std::invalid_argument("transform needs steps >= 1");
    if (!(r > 0.0 && r <= 1.0))
        throw std::invalid_argument("radius ratio must lie in (0, 1]");
    const double eps1 = params.region.eps1;
    std::vector<TorusPoint> orbit(n + 1);
    orbit[0] = p;
    for (int k = 1; k <= n; ++k) orbit[k] = apply(model, orbit[k - 1], 1);
    if (distance_to_S(model, orbit[0]) < eps1 ||
        distance_to_S(model, orbit[n]) < eps1)
        throw BadItinerary("segment endpoints must keep distance eps1 from "
                           "the exceptional set");
    for (int k = 1; k < n; ++k)
        if (distance_to_S(model, orbit[k]) >= eps1)
            throw BadItinerary(
                "intermediate iterate " + std::to_string(k) +
                " leaves the eps1-ball around the exceptional set");
    Chart src = make_chart(model, p, params.rho1, params.region);
    Chart dst = make_chart(model, orbit[n], params.rho1, params.region);
    double ball = std::min({g.radius, params.multi_radius(n, r), src.rho});
    if (!(ball > 0.0)) throw DomainCollapse("transform ball has radius 0");
    GraphPatch restricted = resample_graph(g, ball, params.grid);
    return transform_core(model, src, dst, restricted, n, params).patch;
}

std::pair<GraphPatch, TruncationLog> grow_unstable_manifold(
    const MapModel& model, const TorusPoint& p, int depth,
    const GrowthParams& params) {
    params.validate();
    if (depth < 0) throw std::invalid_argument("depth must be >= 0");
    const double eps1 = params.region.eps1;
    if (distance_to_S(model, p) < eps1)
        throw NotInOmega0("manifold growth needs a base point at distance "
                          ">= eps1 from the exceptional set");

    std::vector<TorusPoint> x(depth + 1);
    std::vector<char> inball(depth + 1, 0);
    x[0] = p;
    for (int k = 1; k <= depth; ++k) {
        x[k] = apply(model, x[k - 1], -1);
        inball[k] = distance_to_S(model, x[k]) < eps1;
    }

    int start = 0;
    for (int k = depth; k >= 0; --k) {
        if (!inball[k]) { start = k; break; }
    }
    if (depth >= 1 && start == 0 && inball[depth])
        throw ManifoldCollapse(
            "backward orbit is trapped inside the eps1-ball");

    // Closed ball excursions, shallowest first: the orbit leaves the good
    // region at index q, stays inside for indices q+1 .. p-1 and re-enters
    // at p. Runs still open at the deepest index are above `start` and are
    // never marched through.
    std::vector<Excursion> excs;
    {
        int k = 1;
        while (k <= depth) {
            if (!inball[k]) { ++k; continue; }
            int run_start = k;
            while (k <= depth && inball[k]) ++k;
            if (k <= depth)
                excs.push_back({run_start - 1, k, k - (run_start - 1)});
        }
    }

    std::vector<std::optional<Chart>> charts(depth + 1);
    auto chart_at = [&](int k) -> const Chart& {
        if (!charts[k])
            charts[k] = make_chart(model, x[k], params.rho1, params.region);
        return *charts[k];
    };

    int exc_count = static_cast<int>(excs.size());
    std::vector<double> exc_growth(exc_count, 1.0);
    std::vector<double> step_growth(depth + 1, 1.0);

    int exc_ptr = exc_count - 1;
    while (exc_ptr >= 0 && excs[exc_ptr].p > start) --exc_ptr;

    GraphPatch cur = zero_graph(x[start], chart_at(start).rho, params.grid);
    int k = start;
    while (k > 0) {
        if (exc_ptr >= 0 && excs[exc_ptr].p == k) {
            const Excursion& e = excs[exc_ptr];
            double lf = params.excursion_radius(e.m);
            double used = std::min({cur.radius, lf, chart_at(k).rho});
            if (used < kCollapseRadius)
                throw ManifoldCollapse("patch radius fell below 1e-12");
            cur = resample_graph(cur, used, params.grid);
            TransformResult res =
                transform_core(model, chart_at(k), chart_at(e.q), cur, e.m,
                               params);
            exc_growth[exc_ptr] = res.pre_clamp_radius / used;
            cur = std::move(res.patch);
            k = e.q;
            --exc_ptr;
        } else {
            double used = std::min(cur.radius, chart_at(k).rho);
            if (used < kCollapseRadius)
                throw ManifoldCollapse("patch radius fell below 1e-12");
            if (used < cur.radius)
                cur = resample_graph(cur, used, params.grid);
            TransformResult res =
                transform_core(model, chart_at(k), chart_at(k - 1), cur, 1,
                               params);
            step_growth[k] = res.pre_clamp_radius / used;
            cur = std::move(res.patch);
            --k;
        }
    }

    TruncationLog log;
    for (const Excursion& e : excs) {
        log.q.push_back(e.q);
        log.p.push_back(e.p);
        log.m.push_back(e.m);
        // The forward and backward stay lengths of the excursion endpoints
        // are both m, so the two ball radii coincide.
        log.lf.push_back(params.excursion_radius(e.m));
        log.lb.push_back(params.excursion_radius(e.m));
    }

    if (exc_count > 0) {
        // Replays of the radius bookkeeping seeded at each excursion exit,
        // reusing the growth factors recorded during the real march. The
        // chart radius is exactly rho1 at every point outside the ball, so
        // any march seeded in the stretch [p_j, next exit above] reaches
        // p_j with radius exactly rho1.
        std::vector<int> shallowest_trunc(exc_count, -1);
        for (int j = 0; j < exc_count; ++j) {
            double r = params.rho1;
            int trunc = -1;
            for (int i = j; i >= 0; --i) {
                const Excursion& e = excs[i];
                if (r > log.lf[i] * (1.0 + 1e-12)) trunc = i;
                r = std::min({r, log.lf[i], params.rho1});
                r = std::min(r * exc_growth[i], params.rho1);
                int lo = (i == 0) ? 1 : excs[i - 1].p + 1;
                for (int kk = e.q; kk >= lo; --kk)
                    r = std::min(r * step_growth[kk], params.rho1);
            }
            shallowest_trunc[j] = trunc;
        }

        std::vector<int> exit_below(depth + 1, 0);
        for (int n = 1; n <= depth; ++n)
            exit_below[n] = inball[n] ? exit_below[n - 1] : n;
        log.i_of_n.resize(depth + 1, -1);
        int j = -1;
        for (int n = 0; n <= depth; ++n) {
            while (j + 1 < exc_count && excs[j + 1].p <= exit_below[n]) ++j;
            log.i_of_n[n] = (j >= 0) ? shallowest_trunc[j] : -1;
        }
    }

    return {std::move(cur), std::move(log)};
}

double verify_tangency(const MapModel& model, const GraphPatch& patch,
                       int samples) {
    patch.validate();
    if (samples < 1) throw std::invalid_argument("samples must be >= 1");
    SplittingSample at_base = estimate_splitting(model, patch.base, kSplitDepth);
    Mat2 frame = Mat2::from_columns(at_base.e_u, at_base.e_s);
    Chart chart;
    chart.base = patch.base;
    chart.e_u = at_base.e_u;
    chart.e_s = at_base.e_s;

    if (patch.s.size() == 2) {
        double slope = (patch.s[1] - patch.s[0]) / (2.0 * patch.radius);
        Vec2 dir = frame * Vec2{1.0, slope};
        return line_angle(dir, at_base.e_u);
    }

    double worst = 0.0;
    for (int j = 0; j < samples; ++j) {
        double u = (samples == 1)
                       ? 0.0
                       : patch.radius * (2.0 * j / (samples - 1) - 1.0);
        double g = eval_graph(patch, u);
        Vec2 dir = frame * Vec2{1.0, graph_slope(patch, u)};
        TorusPoint w = chart_point(chart, u, g);
        SplittingSample at_w = estimate_splitting(model, w, kSplitDepth);
        worst = std::max(worst, line_angle(dir, at_w.e_u));
    }
    return worst;
}

ContractionCertificate contraction_certificate(const MapModel& model,
                                               const TorusPoint& p,
                                               const GraphPatch& g1,
                                               const GraphPatch& g2, int steps,
                                               const GrowthParams& params) {
    params.validate();
    if (steps < 1) throw std::invalid_argument("steps must be >= 1");
    std::vector<TorusPoint> orbit(steps + 1);
    orbit[0] = p;
    for (int k = 1; k <= steps; ++k) orbit[k] = apply(model, orbit[k - 1], 1);
    for (int k = 0; k <= steps; ++k)
        if (distance_to_S(model, orbit[k]) < params.region.eps1)
            throw BadItinerary(
                "orbit point " + std::to_string(k) +
                " is inside the eps1-ball around the exceptional set");

    std::vector<Chart> charts(steps + 1);
    for (int k = 0; k <= steps; ++k)
        charts[k] = make_chart(model, orbit[k], params.rho1, params.region);

    double common = std::min(g1.radius, g2.radius);
    GraphPatch a = resample_graph(g1, common, params.grid);
    GraphPatch b = resample_graph(g2, common, params.grid);

    auto diff_norms = [&](const GraphPatch& u, const GraphPatch& v) {
        double sup = 0.0, lip = 0.0;
        int n = static_cast<int>(u.s.size());
        double h = 2.0 * u.radius / (n - 1);
        for (int i = 0; i < n; ++i) {
            double d = u.s[i] - v.s[i];
            sup = std::max(sup, std::fabs(d));
            if (i > 0)
                lip = std::max(
                    lip, std::fabs(d - (u.s[i - 1] - v.s[i - 1])) / h);
        }
        return std::pair<double, double>{sup, lip};
    };

    auto [sup_prev, lip_prev] = diff_norms(a, b);
    if (sup_prev == 0.0 && lip_prev == 0.0)
        throw std::invalid_argument(
            "graphs coincide; contraction ratios are undefined");

    ContractionCertificate cert;
    for (int k = 0; k < steps; ++k) {
        a = transform_core(model, charts[k], charts[k + 1], a, 1, params)
                .patch;
        b = transform_core(model, charts[k], charts[k + 1], b, 1, params)
                .patch;
        double shared = std::min(a.radius, b.radius);
        a = resample_graph(a, shared, params.grid);
        b = resample_graph(b, shared, params.grid);
        auto [sup_now, lip_now] = diff_norms(a, b);
        cert.sup_ratios.push_back(sup_prev > 0.0 ? sup_now / sup_prev : 0.0);
        cert.lip_ratios.push_back(lip_prev > 0.0 ? lip_now / lip_prev : 0.0);
        sup_prev = sup_now;
        lip_prev = lip_now;
    }
    return cert;
}

TruncationVerdict truncation_bounded(const MapModel& model,
                                     const TruncationLog& log, int depth,
                                     const GrowthParams& params) {
    params.validate();
    if (depth < 2) throw std::invalid_argument("depth must be >= 2");
    TruncationVerdict out;
    double expansion = kappa_bound(model);
    double lam = params.region.lambda;
    out.gamma_hat =
        (std::log(expansion) - lam / 2.0) / (lam / 2.0 - lam / params.region.K);
    if (log.i_of_n.empty()) {
        out.verdict = true;
        return out;
    }
    if (static_cast<int>(log.i_of_n.size()) < depth + 1)
        throw std::invalid_argument(
            "truncation log is shorter than the requested depth");
    int full = -1, half = -1;
    for (int n = 0; n <= depth; ++n) {
        full = std::max(full, log.i_of_n[n]);
        if (n <= depth / 2) half = std::max(half, log.i_of_n[n]);
    }
    out.verdict = (full == half);
    return out;
}

}  // namespace srblab
