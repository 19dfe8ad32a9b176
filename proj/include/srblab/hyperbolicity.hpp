#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "srblab/dynamics.hpp"
#include "srblab/geometry.hpp"

namespace srblab {

// Tunables of the region decomposition around the exceptional set and of
// the downstream manifold growth. r0_time is the per-step contraction rate
// that defines qualifying times; it equals e^{-zeta/3} for the estimated
// orbit-average contraction margin zeta. eps_hat() is the
// Lipschitz-proximity budget used by the graph transform.
struct RegionParams {
    double eps1 = 0.05;     // radius of the excluded neighborhood B(S, eps1)
    double eps2 = 0.2;      // fraction of lambda required of one-step rates
    double lambda = 0.3;    // target asymptotic hyperbolicity exponent
    double r0_time = 0.9801986733067553;  // e^{-0.06/3}
    double K = 64.0;        // decay denominator for multi-step patch radii
    double C_graph = 3e-4;  // excursion working-ball prefactor

    double zeta() const;     // -3 log r0_time
    double eps_hat() const;  // zeta()/20
    void validate() const;   // throws std::invalid_argument when out of range
};

enum class RegionTag { Omega1, Omega2, BSeps1, Omega3 };

// Partition cell of a point plus the good-one-step-rates flag. The flag is
// granted only outside B(S, eps1), so it never co-occurs with BSeps1.
struct RegionClass {
    RegionTag primary = RegionTag::Omega1;
    bool omega3 = false;
    std::vector<RegionTag> tags() const;
};

// BSeps1 when d(p, S) < eps1. Otherwise Omega1 when both neighbors f(p)
// and f^{-1}(p) also avoid the ball, Omega2 when one of them enters it.
// The omega3 flag additionally requires all four one-step rates (forward
// and backward, unstable and stable, at p and at f^{-1}(p)) to clear
// eps2 * lambda. Propagates NonConvergence from the splitting estimate.
RegionClass classify(const MapModel& model, const TorusPoint& p,
                     const RegionParams& params);

// Length of a consecutive run of orbit points inside B(S, eps1).
struct StayLength {
    long value = 0;
    bool capped = false;
};

struct StayLengths {
    std::optional<StayLength> n_plus;
    std::optional<StayLength> n_minus;
};

// n_plus engages when f(p) lies inside B(S, eps1); its value is the first
// n >= 1 with f^n(p) outside the ball (hence always >= 2 when present).
// n_minus mirrors it backward. Scans stop at cap steps and mark the result
// capped. Throws NotInOmega0 when p itself is inside the ball.
StayLengths stay_lengths(const MapModel& model, const TorusPoint& p,
                         const RegionParams& params, long cap = 1000000);

struct HyperbolicityVerdict {
    bool verdict = false;
    double liminf_u = 0.0;
    double liminf_s = 0.0;
};

// Finite-horizon proxy for the asymptotic contraction rates: the minimum
// over n in [window, horizon] of the n-step Birkhoff average of the
// cocycle logs along the forward orbit (backward norms on E^u, forward
// norms on E^s). Verdict: both minima <= -lambda. Requires
// horizon >= window >= 10.
HyperbolicityVerdict lambda_hyperbolic(const MapModel& model,
                                       const TorusPoint& p,
                                       const RegionParams& params,
                                       int horizon = 100000, int window = 32,
                                       int depth = 24);

struct BoundedTypeReport {
    bool verdict = false;
    std::vector<int> s_k;    // backward qualifying times on E^u
    std::vector<int> t_k;    // forward qualifying times on E^s
    double ratio_sup = 1.0;  // tail max of consecutive ratios, both lists
};

// Qualifying times up to horizon: s with log ||df^{-s}|E^u(p)|| <= -lambda s
// (product along the backward orbit) and t with
// log ||df^{t}|E^s(p)|| <= -lambda t (product along the forward orbit).
// ratio_sup is the maximum consecutive ratio over the later half of each
// observed ratio list: a finite-horizon stand-in for the limiting sup that
// discards the transient. Verdict: ratio_sup <= L. Throws EmptySequence
// when either list is empty.
BoundedTypeReport bounded_type(const MapModel& model, const TorusPoint& p,
                               const RegionParams& params, int horizon,
                               double L, int depth = 24);

// Pure kernel of bounded_type: times s (1-based) with
// sum_{j<s} step_logs[j] <= -lambda * s.
std::vector<int> qualifying_times(const std::vector<double>& step_logs,
                                  double lambda);

// Max consecutive ratio over the later half of the ratio list of an
// increasing sequence; 1.0 when fewer than two entries.
double tail_ratio_sup(const std::vector<int>& times);

// Times n (1-based) such that every suffix window [n-k+1, n] of logs sums
// to at most k log r. When fed an orbit cocycle, logs[i] is the backward
// norm log ||df^{-1}|E^u(f^{i+1} x)||. Boundary ties are accepted with
// 1e-12 slack so algebraically exact ties do not flip on summation order.
std::vector<int> pliss_times(const std::vector<double>& logs, double r);

// #{j <= n : j in pliss} / n for an increasing list of times.
double theta_density(const std::vector<int>& pliss, int n);

// Fraction of `samples` tube-shadowing perturbations of p for which n_time
// still qualifies at the relaxed rate sqrt(r0_time). Candidates are drawn
// with stable-direction spread up to 0.9 tube_radius and unstable spread
// shrunk by the n_time-step growth factor; each candidate's orbit is
// checked to stay within tube_radius of p's orbit and escapees are
// redrawn (TooFewSamples when the rejection rate explodes). Throws
// std::invalid_argument when n_time does not qualify for p itself.
double sqrt_r0_robustness(const MapModel& model, const TorusPoint& p,
                          int n_time, double tube_radius, int samples,
                          const RegionParams& params,
                          std::uint64_t seed = 20240801);

struct ZetaBound {
    double zeta_hat = 0.0;
    double delta_eps2_hat = 0.0;
};

// delta_eps2_hat: worst over samples of the empirical liminf frequency of
// Omega3 visits along the forward orbit (min over n in [window, horizon]
// of the running visit fraction); zeta_hat = delta_eps2_hat * eps2 *
// lambda. Samples failing the rate check of lambda_hyperbolic at the same
// horizon are skipped; EmptySequence when none survive.
ZetaBound zeta_bound(const MapModel& model,
                     const std::vector<TorusPoint>& samples,
                     const RegionParams& params, int horizon = 20000,
                     int window = 32, int depth = 24);

// Aggregated per-point diagnosis at a fixed horizon: classification of the
// base point, stay lengths (cap = horizon, capped scans report the cap,
// absent for bases inside the ball), rate minima, qualifying times at rate
// r0_time with their density, and the bounded-type sequences with the tail
// ratio (empty sequences are reported empty with ratio_sup = 1).
struct HyperbolicityReport {
    TorusPoint base;
    int horizon = 0;
    std::vector<RegionTag> region_tags;
    std::optional<long> n_plus;
    std::optional<long> n_minus;
    double liminf_u = 0.0;
    double liminf_s = 0.0;
    std::vector<int> pliss_times;
    double theta_hat = 0.0;
    std::vector<int> s_k;
    std::vector<int> t_k;
    double ratio_sup = 1.0;
};

HyperbolicityReport analyze_point(const MapModel& model, const TorusPoint& p,
                                  const RegionParams& params, int horizon,
                                  int window = 32, int depth = 24);

}  // namespace srblab
