#include "srblab/inducing.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>

#include "srblab/rng.hpp"
#include "srblab/splitting.hpp"

namespace srblab {

namespace {

constexpr int kFrameDepth = 24;

TorusPoint frame_point(const TorusPoint& base, const SplittingSample& frame,
                       double u, double s) {
    return translate(base, u * frame.e_u + s * frame.e_s);
}

Observable cell_bump(double cx, double cy) {
    return [cx, cy](const TorusPoint& p) {
        const double sigma = 1.0 / 32.0;
        const double dx = std::sin(M_PI * (p.x - cx));
        const double dy = std::sin(M_PI * (p.y - cy));
        return std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
    };
}

}  // namespace

void InducingParams::validate() const {
    region.validate();
    if (cap < 1) throw std::invalid_argument("InducingParams: cap >= 1 required");
    if (burn_in < 0) throw std::invalid_argument("InducingParams: burn_in >= 0 required");
}

void EmpiricalMeasure::validate(const MapModel& model,
                                const RegionParams& region) const {
    region.validate();
    KahanSum mass;
    for (const WeightedPoint& wp : particles) {
        if (!std::isfinite(wp.weight) || wp.weight < 0.0)
            throw std::invalid_argument(
                "EmpiricalMeasure: weights must be finite and nonnegative");
        mass.add(wp.weight);
    }
    if (!(std::fabs(mass.value() - total) <= 1e-9))
        throw std::invalid_argument("EmpiricalMeasure: weights do not sum to total");
    if (meta.kind == MeasureKind::induced_mu) {
        for (const WeightedPoint& wp : particles)
            if (distance_to_S(model, wp.point) < region.eps1)
                throw std::invalid_argument(
                    "EmpiricalMeasure: induced particle inside B(S, eps1)");
    }
}

EmpiricalMeasure EmpiricalMeasure::normalized() const {
    if (particles.empty() || !(total > 0.0))
        throw std::invalid_argument("normalized: empty or massless measure");
    EmpiricalMeasure out = *this;
    for (WeightedPoint& wp : out.particles) wp.weight /= total;
    out.total = 1.0;
    return out;
}

InducedReturn induce(const MapModel& model, const TorusPoint& p,
                     const RegionParams& params, long cap) {
    params.validate();
    if (cap < 1) throw std::invalid_argument("induce: cap >= 1 required");
    if (distance_to_S(model, p) < params.eps1)
        throw NotInOmega0("induce: start inside B(S, eps1)");

    std::size_t examined = 0;
    long horizon = 0;
    while (horizon < cap) {
        horizon = horizon == 0 ? std::min<long>(cap, 8) : std::min<long>(cap, 4 * horizon);
        const CocycleTrace trace =
            cocycle_trace(model, p, CocycleDirection::unstable, static_cast<int>(horizon));
        const std::vector<int> times = pliss_times(trace.logs, params.r0_time);
        for (; examined < times.size(); ++examined) {
            const int n = times[examined];
            const TorusPoint end = apply(model, p, n);
            bool certified = false;
            try {
                certified = classify(model, end, params).omega3;
            } catch (const NonConvergence&) {
            }
            if (certified) {
                InducedReturn ret;
                ret.start = p;
                ret.tau = n;
                ret.end = end;
                ret.is_hyperbolic_time = examined == 0;
                return ret;
            }
        }
    }
    throw NoReturn("induce: no certified return within cap");
}

EmpiricalMeasure push_measure(const MapModel& model, const GraphPatch& seed_patch,
                              int n_particles, int n_generations,
                              const InducingParams& params) {
    params.validate();
    seed_patch.validate();
    if (n_generations < 1)
        throw std::invalid_argument("push_measure: n_generations >= 1 required");
    if (params.burn_in >= n_generations)
        throw std::invalid_argument("push_measure: burn_in must leave generations to average");
    if (n_particles < 1000)
        throw DegenerateSeed("push_measure: particle count below the 1000 floor");
    // spacing = 2 radius / (grid - 1), so radius >= 10 spacings means grid >= 21
    if (seed_patch.s.size() < 21)
        throw DegenerateSeed("push_measure: patch resolution below 10 spacings per radius");

    const Chart chart = make_chart(model, seed_patch.base, seed_patch.radius, params.region);
    const int grid = static_cast<int>(seed_patch.s.size());
    std::vector<double> arc(grid, 0.0);
    for (int i = 1; i < grid; ++i) {
        const double du = seed_patch.u_at(i) - seed_patch.u_at(i - 1);
        const double ds = seed_patch.s[i] - seed_patch.s[i - 1];
        arc[i] = arc[i - 1] + std::hypot(du, ds);
    }
    const double length = arc.back();

    struct Live {
        TorusPoint pt;
        double w;
    };
    std::vector<Live> alive;
    alive.reserve(static_cast<std::size_t>(n_particles));
    const double w_each = 1.0 / n_particles;
    const int window = n_generations - params.burn_in;
    const double snap_w = 1.0 / window;
    double leak = 0.0;
    // Jittered stratification: midpoint seeding puts the particles on an
    // arithmetic progression along the leaf, which the map transports into a
    // resonant lattice whose histogram deviation never averages out. One
    // uniform draw per stratum restores the iid noise floor.
    RngStream jitter(params.seed, 11u);
    for (int j = 0; j < n_particles; ++j) {
        const double t = length * (j + jitter.next_double()) / n_particles;
        int seg = static_cast<int>(std::upper_bound(arc.begin(), arc.end(), t) -
                                   arc.begin()) - 1;
        seg = std::min(std::max(seg, 0), grid - 2);
        const double local = (t - arc[seg]) / (arc[seg + 1] - arc[seg]);
        const double u = seed_patch.u_at(seg) +
                         local * (seed_patch.u_at(seg + 1) - seed_patch.u_at(seg));
        const double s = seed_patch.s[seg] + local * (seed_patch.s[seg + 1] - seed_patch.s[seg]);
        const TorusPoint pt = chart_point(chart, u, s);
        if (distance_to_S(model, pt) < params.region.eps1)
            leak += w_each;
        else
            alive.push_back({pt, w_each});
    }

    EmpiricalMeasure out;
    out.meta.generation = n_generations;
    out.meta.kind = MeasureKind::induced_mu;
    out.meta.seed = params.seed;
    out.particles.reserve(alive.size() * static_cast<std::size_t>(window));
    for (int g = 0; g < n_generations; ++g) {
        if (g > 0) {
            std::vector<Live> next;
            next.reserve(alive.size());
            for (const Live& lv : alive) {
                bool ok = false;
                TorusPoint end;
                try {
                    end = induce(model, lv.pt, params.region, params.cap).end;
                    ok = true;
                } catch (const NoReturn&) {
                } catch (const NonConvergence&) {
                }
                if (ok) {
                    next.push_back({end, lv.w});
                } else {
                    const int missed = n_generations - std::max(g, params.burn_in);
                    leak += lv.w * static_cast<double>(missed) * snap_w;
                }
            }
            alive.swap(next);
        }
        if (g >= params.burn_in)
            for (const Live& lv : alive) out.particles.push_back({lv.pt, lv.w * snap_w});
    }

    KahanSum mass;
    for (const WeightedPoint& wp : out.particles) mass.add(wp.weight);
    out.total = mass.value();
    out.leakage = leak;
    return out;
}

DistortionReport distortion_check(const MapModel& model, const GraphPatch& patch,
                                  int n, int pairs) {
    patch.validate();
    if (n < 1) throw std::invalid_argument("distortion_check: n >= 1 required");
    if (pairs < 0) throw std::invalid_argument("distortion_check: pairs >= 0 required");
    DistortionReport rep;
    rep.n = n;
    if (pairs == 0) {
        rep.empty = true;
        return rep;
    }

    const SplittingSample frame = estimate_splitting(model, patch.base, kFrameDepth);
    RngStream gen(20240816u, 7u);
    double max_ratio = 0.0;
    double chi_max = 0.0;
    KahanSum log_rate;
    long rate_count = 0;
    long used = 0;
    for (int q = 0; q < pairs; ++q) {
        const double u1 = (2.0 * gen.next_double() - 1.0) * patch.radius;
        const double u2 = (2.0 * gen.next_double() - 1.0) * patch.radius;
        const TorusPoint y = frame_point(patch.base, frame, u1, eval_graph(patch, u1));
        const TorusPoint z = frame_point(patch.base, frame, u2, eval_graph(patch, u2));
        const double d_ret = torus_distance(y, z);
        if (!(d_ret > 0.0)) continue;
        const TorusPoint y0 = apply(model, y, -n);
        const TorusPoint z0 = apply(model, z, -n);
        CocycleTrace ty, tz;
        try {
            ty = cocycle_trace(model, y0, CocycleDirection::unstable, n);
            tz = cocycle_trace(model, z0, CocycleDirection::unstable, n);
        } catch (const NonConvergence&) {
            continue;
        }
        KahanSum signed_sum, abs_sum;
        for (int j = 0; j < n; ++j) {
            const double dj = tz.logs[j] - ty.logs[j];  // log Ju(f^j y0) - log Ju(f^j z0)
            signed_sum.add(dj);
            abs_sum.add(std::fabs(dj));
        }
        max_ratio = std::max(max_ratio, std::fabs(signed_sum.value()));
        chi_max = std::max(chi_max, abs_sum.value() / d_ret);
        const double d0 = torus_distance(y0, z0);
        if (d0 > 0.0) {
            log_rate.add(std::log(d0 / d_ret) / n);
            ++rate_count;
        }
        ++used;
    }
    rep.max_log_ratio = max_ratio;
    rep.chi1_hat = chi_max;
    rep.omega0_hat = rate_count > 0 ? std::exp(log_rate.value() / rate_count) : 0.0;
    rep.empty = used == 0;
    return rep;
}

TauStatistics tau_statistics(const std::vector<InducedReturn>& returns) {
    if (returns.size() < 1000)
        throw TooFewSamples("tau_statistics: at least 1000 returns required");
    const std::size_t n = returns.size();
    std::vector<double> taus(n);
    KahanSum sum;
    for (std::size_t i = 0; i < n; ++i) {
        taus[i] = static_cast<double>(returns[i].tau);
        sum.add(taus[i]);
    }
    TauStatistics st;
    st.mean = sum.value() / static_cast<double>(n);

    std::vector<double> sorted = taus;
    std::sort(sorted.begin(), sorted.end());
    st.median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);

    // Hill estimate of the tail exponent over the top percentile; a window
    // anchored at the sample maximum is too sparse when the tail is heavy.
    const std::size_t k = std::max<std::size_t>(10, n / 100);
    const double x0 = sorted[n - k - 1];
    if (x0 > 0.0) {
        KahanSum logs;
        for (std::size_t i = n - k; i < n; ++i) logs.add(std::log(sorted[i] / x0));
        st.tail_fit = logs.value() > 0.0
                          ? static_cast<double>(k) / logs.value()
                          : 0.0;
    }

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    RngStream gen(987654321u, 0u);
    const std::size_t half = n / 2;
    for (std::size_t i = 0; i < half; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(gen.next_below(n - i));
        std::swap(idx[i], idx[j]);
    }
    KahanSum half_sum;
    for (std::size_t i = 0; i < half; ++i) half_sum.add(taus[idx[i]]);
    const double half_mean = half_sum.value() / static_cast<double>(half);
    st.integrable_verdict = std::fabs(st.mean - half_mean) < 0.05 * st.mean;
    return st;
}

EmpiricalMeasure spread_to_srb(const MapModel& model, const EmpiricalMeasure& mu,
                               const std::vector<InducedReturn>& returns,
                               const InducingParams& params) {
    params.validate();
    if (mu.particles.size() != returns.size())
        throw std::invalid_argument("spread_to_srb: one return per particle required");
    if (mu.particles.empty())
        throw std::invalid_argument("spread_to_srb: empty measure");
    for (std::size_t i = 0; i < returns.size(); ++i) {
        if (returns[i].tau < 1)
            throw std::invalid_argument("spread_to_srb: return times must be >= 1");
        if (torus_distance(mu.particles[i].point, returns[i].start) > 1e-9)
            throw std::invalid_argument("spread_to_srb: returns misaligned with particles");
    }
    if (returns.size() >= 1000 && !tau_statistics(returns).integrable_verdict)
        throw NotIntegrable("spread_to_srb: return times fail the integrability verdict");

    EmpiricalMeasure out;
    out.meta.kind = MeasureKind::spread_srb;
    out.meta.generation = mu.meta.generation;
    out.meta.seed = mu.meta.seed;
    out.leakage = mu.leakage;
    std::size_t count = 0;
    for (const InducedReturn& r : returns) count += static_cast<std::size_t>(r.tau);
    out.particles.reserve(count);
    KahanSum mass;
    for (std::size_t i = 0; i < returns.size(); ++i) {
        const double w = mu.particles[i].weight;
        TorusPoint q = returns[i].start;
        for (int j = 0; j < returns[i].tau; ++j) {
            out.particles.push_back({q, w});
            mass.add(w);
            if (j + 1 < returns[i].tau) q = apply(model, q, 1);
        }
    }
    const double raw = mass.value();
    if (!(raw > 0.0)) throw std::invalid_argument("spread_to_srb: massless measure");
    for (WeightedPoint& wp : out.particles) wp.weight /= raw;
    out.total = 1.0;
    return out;
}

std::vector<Observable> default_observables() {
    const double two_pi = 2.0 * M_PI;
    std::vector<Observable> obs;
    obs.push_back([two_pi](const TorusPoint& p) { return std::cos(two_pi * p.x); });
    obs.push_back([two_pi](const TorusPoint& p) { return std::cos(two_pi * p.y); });
    obs.push_back([two_pi](const TorusPoint& p) { return std::cos(two_pi * (p.x + p.y)); });
    obs.push_back(cell_bump(0.25, 0.50));
    obs.push_back(cell_bump(0.70, 0.20));
    return obs;
}

double birkhoff_validate(const MapModel& model, const EmpiricalMeasure& srb,
                         const std::vector<Observable>& observables,
                         int n_orbits, long orbit_len) {
    if (observables.empty())
        throw std::invalid_argument("birkhoff_validate: at least one observable required");
    if (n_orbits < 1 || orbit_len < 1)
        throw std::invalid_argument("birkhoff_validate: positive orbit budget required");
    if (srb.particles.empty() || std::fabs(srb.total - 1.0) > 1e-9)
        throw std::invalid_argument("birkhoff_validate: normalized measure required");

    const std::size_t nobs = observables.size();
    std::vector<double> space(nobs, 0.0);
    for (std::size_t k = 0; k < nobs; ++k) {
        KahanSum acc;
        for (const WeightedPoint& wp : srb.particles)
            acc.add(wp.weight * observables[k](wp.point));
        space[k] = acc.value();
    }

    std::vector<KahanSum> orbit_mean(nobs);
    for (int o = 0; o < n_orbits; ++o) {
        RngStream gen(777000111u, static_cast<std::uint64_t>(o));
        TorusPoint q{gen.next_double(), gen.next_double()};
        std::vector<KahanSum> acc(nobs);
        for (long t = 0; t < orbit_len; ++t) {
            for (std::size_t k = 0; k < nobs; ++k) acc[k].add(observables[k](q));
            q = apply(model, q, 1);
        }
        for (std::size_t k = 0; k < nobs; ++k)
            orbit_mean[k].add(acc[k].value() / static_cast<double>(orbit_len));
    }

    double worst = 0.0;
    for (std::size_t k = 0; k < nobs; ++k) {
        const double along = orbit_mean[k].value() / static_cast<double>(n_orbits);
        worst = std::max(worst, std::fabs(space[k] - along));
    }
    return worst;
}

std::vector<double> measure_histogram(const EmpiricalMeasure& mu, int bins) {
    if (bins < 1) throw std::invalid_argument("measure_histogram: bins >= 1 required");
    if (mu.particles.empty())
        throw std::invalid_argument("measure_histogram: empty measure");
    std::vector<KahanSum> acc(static_cast<std::size_t>(bins) * bins);
    KahanSum mass;
    for (const WeightedPoint& wp : mu.particles) {
        int ix = static_cast<int>(wp.point.x * bins);
        int iy = static_cast<int>(wp.point.y * bins);
        if (ix >= bins) ix = bins - 1;
        if (iy >= bins) iy = bins - 1;
        acc[static_cast<std::size_t>(iy) * bins + ix].add(wp.weight);
        mass.add(wp.weight);
    }
    if (!(mass.value() > 0.0))
        throw std::invalid_argument("measure_histogram: massless measure");
    std::vector<double> hist(acc.size());
    for (std::size_t i = 0; i < acc.size(); ++i) hist[i] = acc[i].value() / mass.value();
    return hist;
}

double histogram_l1(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.empty())
        throw std::invalid_argument("histogram_l1: size mismatch");
    KahanSum acc;
    for (std::size_t i = 0; i < a.size(); ++i) acc.add(std::fabs(a[i] - b[i]));
    return acc.value();
}

}  // namespace srblab
