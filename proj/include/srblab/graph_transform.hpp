#pragma once

#include <utility>
#include <vector>

#include "srblab/dynamics.hpp"
#include "srblab/geometry.hpp"
#include "srblab/hyperbolicity.hpp"

namespace srblab {

// Tunables of the manifold growth. rho1 is the chart radius away from the
// exceptional set; nine is the numerator of the excursion decay exponent
// nine*lambda/(2K), kept overridable; region.C_graph scales every excursion
// ball. grid is the sample count of every graph patch (odd, so the center
// sample sits at u = 0).
struct GrowthParams {
    RegionParams region;
    double rho1 = 0.02;
    double nine = 9.0;
    int grid = 257;

    double decay() const;                    // nine * lambda / (2K)
    double excursion_radius(long m) const;   // C_graph * exp(-decay * m)
    double multi_radius(long n, double r) const;  // C_graph * r * e^{-decay n}
    void validate() const;  // throws std::invalid_argument when out of range
};

// Affine coordinate patch through base with axes (e_u, e_s). K1 and K2 are
// the extreme singular values of the axis matrix, so for nearby z, z'
// K1 |z - z'| <= d(phi(z), phi(z')) <= K2 |z - z'|.
struct Chart {
    TorusPoint base;
    Vec2 e_u{1.0, 0.0};
    Vec2 e_s{0.0, 1.0};
    double rho = 0.0;
    double K1 = 1.0;
    double K2 = 1.0;
};

// Chart at p with axes from the splitting estimate. rho = rho1 when p keeps
// distance eps1 from the exceptional set, shrunk proportionally to the
// distance inside. Propagates NonConvergence from the splitting estimate.
Chart make_chart(const MapModel& model, const TorusPoint& p, double rho1,
                 const RegionParams& region);

TorusPoint chart_point(const Chart& chart, double u, double s);
Vec2 chart_coords(const Chart& chart, const TorusPoint& q);

// Graph of a map g: [-radius, radius] -> R in chart coordinates, sampled on
// an equispaced grid with odd sample count; s[i] = g(u_at(i)), g(0) = 0.
// lip is the maximal chord slope.
struct GraphPatch {
    TorusPoint base;
    double radius = 0.0;
    std::vector<double> s;
    double lip = 0.0;

    double u_at(int i) const;
    void validate() const;  // throws std::invalid_argument on broken invariants
};

GraphPatch zero_graph(const TorusPoint& base, double radius, int grid = 257);

// Monotone cubic interpolation through the stored samples (flat spots and
// extrema never overshoot the data). slope is its derivative.
double eval_graph(const GraphPatch& patch, double u);
double graph_slope(const GraphPatch& patch, double u);

// Restriction of the patch to a smaller radius on a fresh equispaced grid.
GraphPatch resample_graph(const GraphPatch& patch, double new_radius,
                          int grid = 257);

// Image of the graph under one map step, read in the destination chart
// (based at the image of the source base). The result is restricted to the
// largest symmetric radius fully covered by the image and clamped to
// chart_dst.rho. Throws HypothesisViolated when the sampled Lipschitz
// distance between the chart map and its linearization at 0 reaches
// region.eps_hat(), when the image projection fails to be strictly
// increasing, or when the image leaves the 1-Lipschitz class;
// DomainCollapse when the image covers no symmetric neighborhood of 0.
GraphPatch one_step_transform(const MapModel& model, const Chart& chart_src,
                              const Chart& chart_dst, const GraphPatch& g,
                              const GrowthParams& params);

// n-fold map applied as a single transform on the ball of radius
// multi_radius(n, r) at p. Requires p and f^n(p) at distance >= eps1 from
// the exceptional set with all intermediate iterates inside the eps1-ball
// (BadItinerary otherwise) and 0 < r <= 1. Errors as one_step_transform.
GraphPatch multi_step_transform(const MapModel& model, const TorusPoint& p,
                                int n, const GraphPatch& g, double r,
                                const GrowthParams& params);

// Bookkeeping of the ball excursions met while composing transforms along
// a backward orbit. Excursion i (shallowest first) leaves the good region
// at backward index q[i] and re-enters it at p[i]; m[i] = p[i] - q[i].
// lf[i] and lb[i] are the excursion ball radii exp-decaying in m[i].
// i_of_n[n] is the index of the shallowest truncation met when the growth
// starts at backward depth n, or -1 when none is met; empty when the orbit
// met no excursion at all.
struct TruncationLog {
    std::vector<int> q;
    std::vector<int> p;
    std::vector<int> m;
    std::vector<double> lf;
    std::vector<double> lb;
    std::vector<int> i_of_n;
};

// Grows the local unstable manifold at p by composing transforms along the
// backward orbit f^{-depth}(p) -> p, seeding the zero graph at the deepest
// backward iterate outside the eps1-ball. Excursions are crossed with the
// m-step transform after truncating the patch to
// min(current radius, lf, chart rho). Throws NotInOmega0 when p is inside
// the ball, ManifoldCollapse when the whole backward orbit is trapped
// inside the ball or the radius falls below 1e-12, and propagates
// transform errors.
std::pair<GraphPatch, TruncationLog> grow_unstable_manifold(
    const MapModel& model, const TorusPoint& p, int depth,
    const GrowthParams& params);

// Max angle (radians) over sampled graph points between the interpolant
// tangent direction mapped to the surface and the unstable direction
// estimated at that point. A 2-sample patch compares its single chord.
double verify_tangency(const MapModel& model, const GraphPatch& patch,
                       int samples);

// Per-step contraction ratios between two transformed graphs carried along
// the forward orbit of p: sup-norm ratios and Lipschitz-seminorm ratios of
// their difference, measured on the common radius. Requires the orbit
// points to stay at distance >= eps1 from the exceptional set
// (BadItinerary otherwise) and both graphs 1-Lipschitz on a common radius.
struct ContractionCertificate {
    std::vector<double> sup_ratios;
    std::vector<double> lip_ratios;
};

ContractionCertificate contraction_certificate(const MapModel& model,
                                               const TorusPoint& p,
                                               const GraphPatch& g1,
                                               const GraphPatch& g2, int steps,
                                               const GrowthParams& params);

// Empirical boundedness of the truncation indices: true iff the max of
// i_of_n over n <= depth equals the max over n <= depth/2 (an empty log is
// bounded). gamma_hat reports (log A - lambda/2) / (lambda/2 - lambda/K)
// for the measured expansion bound A = max ||df||.
struct TruncationVerdict {
    bool verdict = false;
    double gamma_hat = 0.0;
};

TruncationVerdict truncation_bounded(const MapModel& model,
                                     const TruncationLog& log, int depth,
                                     const GrowthParams& params);

}  // namespace srblab
