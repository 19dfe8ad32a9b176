#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "srblab/dynamics.hpp"
#include "srblab/errors.hpp"
#include "srblab/geometry.hpp"
#include "srblab/graph_transform.hpp"
#include "srblab/hyperbolicity.hpp"

namespace srblab {

// Inducing scheme over hyperbolic return times. The induced map is
// g(x) = f^tau(x) with tau the first r0-hyperbolic time of x whose image
// is certified good (rate certificate and outside B(S, eps1)). Pushing
// arclength measure on an unstable patch through g and averaging the
// generations estimates the induced measure; spreading each particle along
// its return block turns that into the candidate physical measure for f.

// One certified return of the induced map.
struct InducedReturn {
    TorusPoint start;
    int tau = 0;
    TorusPoint end;
    // True when tau is the very first r0-hyperbolic time of start, i.e. no
    // earlier hyperbolic time was skipped because its image missed the
    // good-region certificate.
    bool is_hyperbolic_time = false;
};

enum class MeasureKind { induced_mu, spread_srb };

struct MeasureMeta {
    int generation = 0;
    MeasureKind kind = MeasureKind::induced_mu;
    std::uint64_t seed = 0;
};

struct WeightedPoint {
    TorusPoint point;
    double weight = 0.0;
};

// Atomic measure sum_i w_i * delta(p_i). total caches the mass of the
// particle list; leakage records mass dropped because particles never
// produced a certified return within the cap.
struct EmpiricalMeasure {
    std::vector<WeightedPoint> particles;
    double total = 0.0;
    double leakage = 0.0;
    MeasureMeta meta;

    // Checks weight positivity, that weights sum to total within 1e-9, and
    // for the induced kind that no particle sits inside B(S, eps1).
    void validate(const MapModel& model, const RegionParams& region) const;

    // Same particle set rescaled to unit mass. Throws std::invalid_argument
    // on an empty or massless measure.
    EmpiricalMeasure normalized() const;
};

// Distortion measurement along n-step unstable blocks. Pairs are sampled on
// the patch at the return time and pulled back together, so the reported sum
// runs over a collapsing pair and saturates once the pair has merged.
struct DistortionReport {
    int n = 0;
    // Max over pairs of |sum_{j<n} log Ju(f^j y0) - log Ju(f^j z0)| where
    // y0, z0 are the n-step pullbacks of a sampled pair.
    double max_log_ratio = 0.0;
    // Geometric mean per-step contraction rate of the pair separation under
    // pullback, fitted from the endpoint separations.
    double omega0_hat = 0.0;
    // Max over pairs of the accumulated |log Ju| discrepancy divided by the
    // return-time separation.
    double chi1_hat = 0.0;
    // Set when pairs == 0 was requested; all other fields are zero.
    bool empty = false;
};

// Return-time sample statistics.
struct TauStatistics {
    double mean = 0.0;
    double median = 0.0;
    // Survival-function log-log slope magnitude over the top decade of the
    // sample, 0 when that range holds fewer than three distinct values.
    double tail_fit = 0.0;
    // True iff the full-sample mean and a random half-sample mean agree
    // within 5%.
    bool integrable_verdict = false;
};

struct InducingParams {
    RegionParams region;
    long cap = 100000;              // scan horizon before NoReturn
    std::uint64_t seed = 20240816;  // recorded in measure metadata
    // Generations averaged are burn_in..n_generations-1. The seed segment
    // needs a few inductions before it equidistributes, and the averaged
    // tail is the operational stand-in for an accumulation point of the
    // generation averages. 0 averages every generation.
    int burn_in = 0;
    void validate() const;
};

// First certified return. Scans the r0-hyperbolic times of p in increasing
// order and accepts the first whose image carries the good-region rate
// certificate. Throws NotInOmega0 when p starts inside B(S, eps1) and
// NoReturn when no time <= cap is accepted.
InducedReturn induce(const MapModel& model, const TorusPoint& p,
                     const RegionParams& params, long cap = 100000);

// Pushes arclength-uniform particles seeded on seed_patch through
// n_generations rounds of the induced map and returns the average of the
// generation snapshots burn_in..n_generations-1 with equal weights.
// Particles whose induce call fails are dropped and the mass of their
// missing snapshots accumulates in leakage. Throws DegenerateSeed when the
// particle count is below 1000 or the patch resolution leaves fewer than
// 10 grid spacings per radius.
EmpiricalMeasure push_measure(const MapModel& model, const GraphPatch& seed_patch,
                              int n_particles, int n_generations,
                              const InducingParams& params);

// Samples `pairs` random pairs on the patch, pulls each pair back n steps,
// and measures the accumulated unstable log-Jacobian discrepancy along the
// matched forward itineraries.
DistortionReport distortion_check(const MapModel& model, const GraphPatch& patch,
                                  int n, int pairs);

// Mean, median, survival tail exponent, and the split-half integrability
// verdict. Requires at least 1000 returns, else TooFewSamples.
TauStatistics tau_statistics(const std::vector<InducedReturn>& returns);

// Spreads each induced particle along its return block: mass w with return
// time tau becomes tau copies of mass w at f^j(start), j = 0..tau-1, and the
// result is normalized to a probability. returns[i] must describe
// mu.particles[i]. Throws NotIntegrable when the return-time sample fails
// the integrability verdict (samples below the statistics floor normalize
// directly).
EmpiricalMeasure spread_to_srb(const MapModel& model, const EmpiricalMeasure& mu,
                               const std::vector<InducedReturn>& returns,
                               const InducingParams& params);

using Observable = std::function<double(const TorusPoint&)>;

// cos(2 pi x), cos(2 pi y), cos(2 pi (x+y)), and two smoothed cell bumps.
std::vector<Observable> default_observables();

// Max over observables of |space average under srb - mean Birkhoff average
// over n_orbits uniformly seeded orbits of length orbit_len|. Requires a
// normalized srb.
double birkhoff_validate(const MapModel& model, const EmpiricalMeasure& srb,
                         const std::vector<Observable>& observables,
                         int n_orbits, long orbit_len);

// Row-major bins x bins occupancy histogram, normalized to unit mass.
std::vector<double> measure_histogram(const EmpiricalMeasure& mu, int bins = 32);

// L1 distance between two equally sized histograms.
double histogram_l1(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace srblab
