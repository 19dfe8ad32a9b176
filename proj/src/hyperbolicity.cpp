#include "srblab/hyperbolicity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "srblab/errors.hpp"
#include "srblab/rng.hpp"
#include "srblab/splitting.hpp"

namespace srblab {

namespace {

const Vec2 kSweepSeed{1.0, 0.37};
constexpr int kClassifyDepth = 24;
constexpr double kPlissTieSlack = 1e-12;

// Forward-orbit expansion/contraction rates over an index window.
// pts[i] = f^{lo+i}(p); log_ju[i] = log ||df e_u|| and log_js[i] =
// log ||df e_s|| at pts[i]. Directions come from a forward sweep (e_u) and
// a backward sweep (e_s) with `depth` lead-in steps beyond each end of the
// window, which is the stable propagation order for each bundle.
struct RatesWindow {
    std::vector<TorusPoint> pts;
    std::vector<double> log_ju;
    std::vector<double> log_js;
};

RatesWindow rates_window(const MapModel& model, const TorusPoint& p, long lo,
                         long hi, int depth) {
    if (depth < 1 || hi < lo) throw std::invalid_argument("bad rates window");
    const long m = hi - lo;              // window covers m + 1 orbit points
    const long total = m + 2L * depth + 1;
    std::vector<TorusPoint> orbit(static_cast<std::size_t>(total));
    orbit[0] = apply(model, p, static_cast<int>(lo - depth));
    for (long j = 1; j < total; ++j)
        orbit[static_cast<std::size_t>(j)] =
            apply(model, orbit[static_cast<std::size_t>(j - 1)], 1);
    std::vector<Mat2> T(static_cast<std::size_t>(total - 1));
    for (long j = 0; j + 1 < total; ++j)
        T[static_cast<std::size_t>(j)] =
            tangent(model, orbit[static_cast<std::size_t>(j)]);

    RatesWindow rw;
    rw.pts.assign(orbit.begin() + depth, orbit.begin() + depth + m + 1);
    rw.log_ju.resize(static_cast<std::size_t>(m + 1));
    rw.log_js.resize(static_cast<std::size_t>(m + 1));

    Vec2 v = normalized(kSweepSeed);
    for (long j = 0; j <= depth + m; ++j) {
        const Vec2 w = T[static_cast<std::size_t>(j)] * v;
        const double nw = norm(w);
        if (j >= depth) rw.log_ju[static_cast<std::size_t>(j - depth)] = std::log(nw);
        v = w * (1.0 / nw);
    }

    Vec2 s = normalized(kSweepSeed);
    for (long j = total - 1; j >= depth; --j) {
        if (j <= depth + m)
            rw.log_js[static_cast<std::size_t>(j - depth)] =
                std::log(norm(T[static_cast<std::size_t>(j)] * s));
        s = normalized(T[static_cast<std::size_t>(j - 1)].inverse() * s);
    }
    return rw;
}

// Minimum Birkhoff average of (-log_ju) and (log_js) over prefix lengths
// n in [window, horizon], reading rates at rw indices offset..offset+n-1.
HyperbolicityVerdict liminf_from_rates(const RatesWindow& rw, long offset,
                                       int horizon, int window,
                                       double lambda) {
    KahanSum su, ss;
    double mu = std::numeric_limits<double>::infinity();
    double ms = mu;
    for (int n = 1; n <= horizon; ++n) {
        const std::size_t i = static_cast<std::size_t>(offset + n - 1);
        su.add(-rw.log_ju[i]);
        ss.add(rw.log_js[i]);
        if (n >= window) {
            mu = std::min(mu, su.value() / n);
            ms = std::min(ms, ss.value() / n);
        }
    }
    return {mu <= -lambda && ms <= -lambda, mu, ms};
}

void check_horizon(int horizon, int window) {
    if (window < 10 || horizon < window)
        throw std::invalid_argument("need horizon >= window >= 10");
}

}  // namespace

double RegionParams::zeta() const { return -3.0 * std::log(r0_time); }

double RegionParams::eps_hat() const { return zeta() / 20.0; }

void RegionParams::validate() const {
    const bool ok = eps1 > 0.0 && eps2 > 0.0 && eps2 < 1.0 && lambda > 0.0 &&
                    r0_time > 0.0 && r0_time < 1.0 && K > 2.0 && C_graph > 0.0;
    if (!ok) throw std::invalid_argument("region parameters out of range");
}

std::vector<RegionTag> RegionClass::tags() const {
    std::vector<RegionTag> t{primary};
    if (omega3) t.push_back(RegionTag::Omega3);
    return t;
}

RegionClass classify(const MapModel& model, const TorusPoint& p,
                     const RegionParams& params) {
    params.validate();
    RegionClass rc;
    if (distance_to_S(model, p) < params.eps1) {
        rc.primary = RegionTag::BSeps1;
        return rc;
    }
    const TorusPoint fp = apply(model, p, 1);
    const TorusPoint bp = apply(model, p, -1);
    const bool fwd_in = distance_to_S(model, fp) < params.eps1;
    const bool bwd_in = distance_to_S(model, bp) < params.eps1;
    rc.primary = (!fwd_in && !bwd_in) ? RegionTag::Omega1 : RegionTag::Omega2;

    const SplittingSample sp = estimate_splitting(model, p, kClassifyDepth);
    const SplittingSample sb = estimate_splitting(model, bp, kClassifyDepth);
    const Mat2 tp = tangent(model, p);
    const Mat2 tb = tangent(model, bp);
    const double ju0 = std::log(norm(tp * sp.e_u));
    const double js0 = std::log(norm(tp * sp.e_s));
    const double jub = std::log(norm(tb * sb.e_u));
    const double jsb = std::log(norm(tb * sb.e_s));
    const double bar = params.eps2 * params.lambda;
    rc.omega3 = ju0 >= bar && jub >= bar && -js0 >= bar && -jsb >= bar;
    return rc;
}

StayLengths stay_lengths(const MapModel& model, const TorusPoint& p,
                         const RegionParams& params, long cap) {
    params.validate();
    if (cap < 2) throw std::invalid_argument("cap >= 2 required");
    if (distance_to_S(model, p) < params.eps1)
        throw NotInOmega0("stay_lengths: base point inside B(S, eps1)");
    StayLengths out;
    for (const int dir : {1, -1}) {
        TorusPoint q = apply(model, p, dir);
        if (!(distance_to_S(model, q) < params.eps1)) continue;
        long n = 1;
        bool capped = true;
        while (n < cap) {
            q = apply(model, q, dir);
            ++n;
            if (!(distance_to_S(model, q) < params.eps1)) {
                capped = false;
                break;
            }
        }
        const StayLength sl{n, capped};
        if (dir > 0)
            out.n_plus = sl;
        else
            out.n_minus = sl;
    }
    return out;
}

HyperbolicityVerdict lambda_hyperbolic(const MapModel& model,
                                       const TorusPoint& p,
                                       const RegionParams& params, int horizon,
                                       int window, int depth) {
    params.validate();
    check_horizon(horizon, window);
    const RatesWindow rw = rates_window(model, p, 0, horizon - 1, depth);
    return liminf_from_rates(rw, 0, horizon, window, params.lambda);
}

std::vector<int> qualifying_times(const std::vector<double>& step_logs,
                                  double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda > 0 required");
    std::vector<int> out;
    KahanSum acc;
    for (std::size_t j = 0; j < step_logs.size(); ++j) {
        acc.add(step_logs[j]);
        const double s = static_cast<double>(j + 1);
        if (acc.value() <= -lambda * s) out.push_back(static_cast<int>(j + 1));
    }
    return out;
}

double tail_ratio_sup(const std::vector<int>& times) {
    if (times.size() < 2) return 1.0;
    const std::size_t nratios = times.size() - 1;
    const std::size_t start = nratios / 2;
    double sup = 1.0;
    for (std::size_t i = start; i < nratios; ++i)
        sup = std::max(sup, static_cast<double>(times[i + 1]) /
                                static_cast<double>(times[i]));
    return sup;
}

BoundedTypeReport bounded_type(const MapModel& model, const TorusPoint& p,
                               const RegionParams& params, int horizon,
                               double L, int depth) {
    params.validate();
    if (horizon < 1) throw std::invalid_argument("horizon >= 1 required");
    if (!(L >= 1.0)) throw std::invalid_argument("L >= 1 required");
    const RatesWindow back = rates_window(model, p, -horizon, 0, depth);
    const RatesWindow fwd = rates_window(model, p, 0, horizon - 1, depth);

    // log ||df^{-s}|E^u(p)|| accumulates -log_ju along the backward orbit.
    std::vector<double> back_logs(static_cast<std::size_t>(horizon));
    for (int j = 1; j <= horizon; ++j)
        back_logs[static_cast<std::size_t>(j - 1)] =
            -back.log_ju[static_cast<std::size_t>(horizon - j)];
    // log ||df^{t}|E^s(p)|| accumulates log_js along the forward orbit.
    BoundedTypeReport rep;
    rep.s_k = qualifying_times(back_logs, params.lambda);
    rep.t_k = qualifying_times(fwd.log_js, params.lambda);
    if (rep.s_k.empty() || rep.t_k.empty())
        throw EmptySequence("bounded_type: no qualifying time below horizon");
    rep.ratio_sup = std::max(tail_ratio_sup(rep.s_k), tail_ratio_sup(rep.t_k));
    rep.verdict = rep.ratio_sup <= L;
    return rep;
}

std::vector<int> pliss_times(const std::vector<double>& logs, double r) {
    if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("need 0 < r < 1");
    const double lr = std::log(r);
    std::vector<int> out;
    double m = 0.0;  // max over k of the suffix sums of (logs - log r)
    for (std::size_t i = 0; i < logs.size(); ++i) {
        const double a = logs[i] - lr;
        m = (i == 0) ? a : a + std::max(0.0, m);
        if (m <= kPlissTieSlack) out.push_back(static_cast<int>(i + 1));
    }
    return out;
}

double theta_density(const std::vector<int>& pliss, int n) {
    if (n < 1) throw std::invalid_argument("n >= 1 required");
    const auto it = std::upper_bound(pliss.begin(), pliss.end(), n);
    return static_cast<double>(it - pliss.begin()) / static_cast<double>(n);
}

double sqrt_r0_robustness(const MapModel& model, const TorusPoint& p,
                          int n_time, double tube_radius, int samples,
                          const RegionParams& params, std::uint64_t seed) {
    params.validate();
    if (n_time < 1 || samples < 1 || !(tube_radius > 0.0))
        throw std::invalid_argument("bad robustness arguments");
    const CocycleTrace base =
        cocycle_trace(model, p, CocycleDirection::unstable, n_time);
    const std::vector<int> base_times = pliss_times(base.logs, params.r0_time);
    if (!std::binary_search(base_times.begin(), base_times.end(), n_time))
        throw std::invalid_argument(
            "n_time does not qualify for the base point");

    std::vector<TorusPoint> orbit(static_cast<std::size_t>(n_time) + 1);
    orbit[0] = p;
    for (int k = 1; k <= n_time; ++k)
        orbit[static_cast<std::size_t>(k)] =
            apply(model, orbit[static_cast<std::size_t>(k - 1)], 1);

    const SplittingSample sp = estimate_splitting(model, p, kClassifyDepth);
    const double sqrt_rate = std::sqrt(params.r0_time);
    const double u_span =
        0.45 * tube_radius *
        std::pow(cat::lambda1, -static_cast<double>(n_time));
    const double s_span = 0.9 * tube_radius;

    RngStream rng(seed, 0);
    int pass = 0;
    long accepted = 0;
    long attempts = 0;
    const long attempt_cap = 200L * samples;
    while (accepted < samples) {
        if (++attempts > attempt_cap)
            throw TooFewSamples("tube sampling rejection rate too high");
        const double a = (2.0 * rng.next_double() - 1.0) * u_span;
        const double b = (2.0 * rng.next_double() - 1.0) * s_span;
        const TorusPoint q = translate(p, sp.e_u * a + sp.e_s * b);
        bool in_tube = true;
        TorusPoint x = q;
        for (int k = 0; in_tube && k <= n_time; ++k) {
            if (k > 0) x = apply(model, x, 1);
            in_tube = torus_distance(x, orbit[static_cast<std::size_t>(k)]) <=
                      tube_radius;
        }
        if (!in_tube) continue;
        ++accepted;
        const CocycleTrace tq =
            cocycle_trace(model, q, CocycleDirection::unstable, n_time);
        const std::vector<int> times = pliss_times(tq.logs, sqrt_rate);
        if (std::binary_search(times.begin(), times.end(), n_time)) ++pass;
    }
    return static_cast<double>(pass) / static_cast<double>(samples);
}

ZetaBound zeta_bound(const MapModel& model,
                     const std::vector<TorusPoint>& samples,
                     const RegionParams& params, int horizon, int window,
                     int depth) {
    params.validate();
    check_horizon(horizon, window);
    const double bar = params.eps2 * params.lambda;
    double worst_delta = std::numeric_limits<double>::infinity();
    bool any = false;
    for (const TorusPoint& p : samples) {
        const RatesWindow rw = rates_window(model, p, -1, horizon - 1, depth);
        const HyperbolicityVerdict hv =
            liminf_from_rates(rw, 1, horizon, window, params.lambda);
        if (!hv.verdict) continue;
        long count = 0;
        double dmin = std::numeric_limits<double>::infinity();
        for (int k = 0; k < horizon; ++k) {
            const std::size_t i = static_cast<std::size_t>(k + 1);
            const bool visit =
                distance_to_S(model, rw.pts[i]) >= params.eps1 &&
                std::min(std::min(rw.log_ju[i], rw.log_ju[i - 1]),
                         std::min(-rw.log_js[i], -rw.log_js[i - 1])) >= bar;
            if (visit) ++count;
            if (k + 1 >= window)
                dmin = std::min(dmin, static_cast<double>(count) / (k + 1));
        }
        any = true;
        worst_delta = std::min(worst_delta, dmin);
    }
    if (!any) throw EmptySequence("zeta_bound: no sample passed the rate check");
    return {worst_delta * bar, worst_delta};
}

HyperbolicityReport analyze_point(const MapModel& model, const TorusPoint& p,
                                  const RegionParams& params, int horizon,
                                  int window, int depth) {
    params.validate();
    check_horizon(horizon, window);
    HyperbolicityReport rep;
    rep.base = p;
    rep.horizon = horizon;
    const RegionClass rc = classify(model, p, params);
    rep.region_tags = rc.tags();
    if (rc.primary != RegionTag::BSeps1) {
        const StayLengths sl = stay_lengths(model, p, params, horizon);
        if (sl.n_plus) rep.n_plus = sl.n_plus->value;
        if (sl.n_minus) rep.n_minus = sl.n_minus->value;
    }

    const RatesWindow fwd = rates_window(model, p, 0, horizon - 1, depth);
    const HyperbolicityVerdict hv =
        liminf_from_rates(fwd, 0, horizon, window, params.lambda);
    rep.liminf_u = hv.liminf_u;
    rep.liminf_s = hv.liminf_s;

    std::vector<double> cocycle_logs(static_cast<std::size_t>(horizon));
    for (int k = 0; k < horizon; ++k)
        cocycle_logs[static_cast<std::size_t>(k)] =
            -fwd.log_ju[static_cast<std::size_t>(k)];
    rep.pliss_times = pliss_times(cocycle_logs, params.r0_time);
    rep.theta_hat = theta_density(rep.pliss_times, horizon);

    const RatesWindow back = rates_window(model, p, -horizon, 0, depth);
    std::vector<double> back_logs(static_cast<std::size_t>(horizon));
    for (int j = 1; j <= horizon; ++j)
        back_logs[static_cast<std::size_t>(j - 1)] =
            -back.log_ju[static_cast<std::size_t>(horizon - j)];
    rep.s_k = qualifying_times(back_logs, params.lambda);
    rep.t_k = qualifying_times(fwd.log_js, params.lambda);
    rep.ratio_sup = std::max(tail_ratio_sup(rep.s_k), tail_ratio_sup(rep.t_k));
    return rep;
}

}  // namespace srblab
