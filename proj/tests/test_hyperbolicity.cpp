#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "oracles.hpp"
#include "srblab/dynamics.hpp"
#include "srblab/errors.hpp"
#include "srblab/geometry.hpp"
#include "srblab/hyperbolicity.hpp"
#include "srblab/rng.hpp"
#include "srblab/splitting.hpp"

using namespace srblab;

namespace {

bool has_tag(const std::vector<RegionTag>& tags, RegionTag t) {
    return std::find(tags.begin(), tags.end(), t) != tags.end();
}

TorusPoint eigen_point(double u, double s) {
    const Vec2 d = cat::unit_u() * u + cat::unit_s() * s;
    return wrap(d.x, d.y);
}

TorusPoint random_point(RngStream& rng) {
    return {rng.next_double(), rng.next_double()};
}

// Uniform point whose first `steps` forward images all keep at least
// `clearance` distance from the exceptional set.
TorusPoint far_orbit_point(const MapModel& m, RngStream& rng, int steps,
                           double clearance) {
    for (int tries = 0; tries < 4000; ++tries) {
        TorusPoint p = random_point(rng);
        bool ok = true;
        TorusPoint q = p;
        for (int k = 0; ok && k <= steps; ++k) {
            if (k > 0) q = apply(m, q, 1);
            ok = distance_to_S(m, q) >= clearance;
        }
        if (ok) return p;
    }
    REQUIRE(false);
    return {};
}

}  // namespace

TEST_CASE("region parameters: derived quantities and validation") {
    RegionParams params;
    CHECK(params.zeta() == doctest::Approx(0.06).epsilon(1e-12));
    CHECK(params.eps_hat() == doctest::Approx(0.003).epsilon(1e-12));
    CHECK_NOTHROW(params.validate());

    RegionParams bad = params;
    bad.eps2 = 1.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = params;
    bad.r0_time = 1.2;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = params;
    bad.eps1 = -0.01;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = params;
    bad.K = 1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("classify: linear model has no excluded region") {
    const MapModel m = MapModel::linear_cat();
    const RegionParams params;
    const RegionClass rc = classify(m, {0.3, 0.7}, params);
    CHECK(rc.primary == RegionTag::Omega1);
    CHECK(rc.omega3);
    const auto tags = rc.tags();
    CHECK(tags.size() == 2);
    CHECK(has_tag(tags, RegionTag::Omega1));
    CHECK(has_tag(tags, RegionTag::Omega3));
}

TEST_CASE("classify: slowed model partitions around the fixed point") {
    const MapModel m = MapModel::neutral_cat();
    const RegionParams params;

    const RegionClass at_fp = classify(m, {0.0, 0.0}, params);
    CHECK(at_fp.primary == RegionTag::BSeps1);
    CHECK_FALSE(at_fp.omega3);
    CHECK(at_fp.tags().size() == 1);

    const RegionClass near_fp = classify(m, {0.02, 0.02}, params);
    CHECK(near_fp.primary == RegionTag::BSeps1);
    CHECK_FALSE(near_fp.omega3);

    const RegionClass far = classify(m, {0.3, 0.7}, params);
    CHECK(far.primary == RegionTag::Omega1);
    CHECK(far.omega3);

    // Base outside the ball whose image contracts into it. The entry mixes
    // in an expanding component so the orbit sweeps past the fixed point
    // instead of creeping into the frozen zone, keeping the bundle
    // estimates convergent.
    const Vec2 w = normalized(cat::unit_u() * 0.25 + cat::unit_s());
    const TorusPoint edge = apply(m, wrap(0.045 * w.x, 0.045 * w.y), -1);
    REQUIRE(distance_to_S(m, edge) >= params.eps1);
    REQUIRE(distance_to_S(m, apply(m, edge, 1)) < params.eps1);
    const RegionClass two = classify(m, edge, params);
    CHECK(two.primary == RegionTag::Omega2);
    CHECK(two.omega3);
}

TEST_CASE("classify: sampled fractions and tag invariants") {
    const MapModel m = MapModel::neutral_cat();
    const RegionParams params;
    const double ball_area = 3.14159265358979 * params.eps1 * params.eps1;
    for (const std::uint64_t seed : {101u, 202u, 303u}) {
        RngStream rng(seed, 0);
        const int n = 4000;
        int omega3 = 0, ball = 0, skipped = 0;
        for (int i = 0; i < n; ++i) {
            const TorusPoint p = random_point(rng);
            RegionClass rc;
            try {
                rc = classify(m, p, params);
            } catch (const NonConvergence&) {
                ++skipped;
                continue;
            }
            if (rc.omega3) {
                ++omega3;
                CHECK(rc.primary != RegionTag::BSeps1);
                CHECK(distance_to_S(m, p) >= params.eps1);
            }
            if (rc.primary == RegionTag::BSeps1) ++ball;
        }
        const int kept = n - skipped;
        REQUIRE(kept > n / 2);
        const double f3 = static_cast<double>(omega3) / kept;
        const double fb = static_cast<double>(ball) / kept;
        INFO("seed ", seed, ": omega3 ", f3, " ball ", fb, " skipped ",
             skipped);
        // With default parameters the good-rates region is exactly the
        // complement of the ball, so both fractions track its area.
        CHECK(f3 == doctest::Approx(1.0 - ball_area).epsilon(0.01));
        CHECK(fb == doctest::Approx(ball_area).epsilon(0.6));
        CHECK(f3 + fb == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("stay lengths: absent, engaged, mirrored, capped") {
    const RegionParams params;
    const MapModel lin = MapModel::linear_cat();
    const StayLengths none = stay_lengths(lin, {0.3, 0.7}, params);
    CHECK_FALSE(none.n_plus.has_value());
    CHECK_FALSE(none.n_minus.has_value());

    const MapModel m = MapModel::neutral_cat();
    CHECK_THROWS_AS(stay_lengths(m, {0.0, 0.0}, params), NotInOmega0);
    CHECK_THROWS_AS(stay_lengths(m, {0.3, 0.7}, params, 1),
                    std::invalid_argument);

    // Entry direction mixes a small expanding component into a contracting
    // one, so the orbit sweeps past the fixed point and leaves the ball.
    const Vec2 w = normalized(cat::unit_u() * 0.25 + cat::unit_s());
    const TorusPoint q = wrap(0.045 * w.x, 0.045 * w.y);
    const TorusPoint p = apply(m, q, -1);
    REQUIRE(distance_to_S(m, p) >= params.eps1);
    const StayLengths fwd = stay_lengths(m, p, params);
    REQUIRE(fwd.n_plus.has_value());
    CHECK_FALSE(fwd.n_plus->capped);
    CHECK(fwd.n_plus->value == 3);
    CHECK_FALSE(fwd.n_minus.has_value());

    // Direct scan oracle for the same point.
    long n_direct = 0;
    TorusPoint x = p;
    for (long k = 1; k <= 50; ++k) {
        x = apply(m, x, 1);
        if (!(distance_to_S(m, x) < params.eps1)) {
            n_direct = k;
            break;
        }
    }
    CHECK(fwd.n_plus->value == n_direct);

    const Vec2 wb = normalized(cat::unit_u() + cat::unit_s() * 0.25);
    const TorusPoint qb = wrap(0.045 * wb.x, 0.045 * wb.y);
    const TorusPoint pb = apply(m, qb, 1);
    const StayLengths bwd = stay_lengths(m, pb, params);
    REQUIRE(bwd.n_minus.has_value());
    CHECK_FALSE(bwd.n_minus->capped);
    CHECK(bwd.n_minus->value == 3);
    CHECK_FALSE(bwd.n_plus.has_value());

    // A purely contracting entry creeps toward the fixed point and never
    // leaves within any reasonable budget.
    const TorusPoint axis = eigen_point(0.0, 0.1);
    const StayLengths stuck = stay_lengths(m, axis, params, 400);
    REQUIRE(stuck.n_plus.has_value());
    CHECK(stuck.n_plus->capped);
    CHECK(stuck.n_plus->value == 400);
}

TEST_CASE("lambda_hyperbolic: exact rates on the linear model") {
    const MapModel m = MapModel::linear_cat();
    RegionParams params;
    params.lambda = 0.9;
    const HyperbolicityVerdict v =
        lambda_hyperbolic(m, {0.3, 0.7}, params, 2000, 32);
    CHECK(v.verdict);
    CHECK(v.liminf_u == doctest::Approx(-cat::log_lambda1).epsilon(1e-12));
    CHECK(v.liminf_s == doctest::Approx(-cat::log_lambda1).epsilon(1e-12));
}

TEST_CASE("lambda_hyperbolic: rates vanish at the neutral fixed point") {
    const MapModel m = MapModel::neutral_cat();
    RegionParams params;
    params.lambda = 0.1;
    const HyperbolicityVerdict v =
        lambda_hyperbolic(m, {0.0, 0.0}, params, 500, 10);
    CHECK_FALSE(v.verdict);
    CHECK(std::abs(v.liminf_u) < 1e-6);
    CHECK(std::abs(v.liminf_s) < 1e-6);
}

TEST_CASE("lambda_hyperbolic: argument validation") {
    const MapModel m = MapModel::linear_cat();
    const RegionParams params;
    CHECK_THROWS_AS(lambda_hyperbolic(m, {0.1, 0.2}, params, 100, 5),
                    std::invalid_argument);
    CHECK_THROWS_AS(lambda_hyperbolic(m, {0.1, 0.2}, params, 8, 16),
                    std::invalid_argument);
}

TEST_CASE("lambda_hyperbolic: verdict fraction is stable in the horizon") {
    const MapModel m = MapModel::neutral_cat();
    const RegionParams params;
    RngStream rng(77, 0);
    const int n = 40;
    int ok_short = 0, ok_long = 0;
    for (int i = 0; i < n; ++i) {
        const TorusPoint p = random_point(rng);
        try {
            if (lambda_hyperbolic(m, p, params, 5000, 32).verdict) ++ok_short;
            if (lambda_hyperbolic(m, p, params, 10000, 32).verdict) ++ok_long;
        } catch (const NonConvergence&) {
        }
    }
    const double fs = static_cast<double>(ok_short) / n;
    const double fl = static_cast<double>(ok_long) / n;
    INFO("fractions ", fs, " ", fl);
    CHECK(fs >= 0.95);
    CHECK(fl >= 0.95);
    CHECK(std::abs(fs - fl) <= 0.05);
}

TEST_CASE("lambda_hyperbolic agrees with a direct cocycle recomputation") {
    const MapModel m = MapModel::neutral_cat();
    const RegionParams params;
    const TorusPoint p{0.3123, 0.7457};
    const int horizon = 40, window = 10;
    const HyperbolicityVerdict v =
        lambda_hyperbolic(m, p, params, horizon, window);

    const CocycleTrace tu =
        cocycle_trace(m, p, CocycleDirection::unstable, horizon);
    const CocycleTrace ts =
        cocycle_trace(m, p, CocycleDirection::stable, horizon);
    double su = 0.0, ss = 0.0, mu = 1e300, ms = 1e300;
    for (int k = 1; k <= horizon; ++k) {
        su += tu.logs[k - 1];
        ss += ts.logs[k - 1];
        if (k >= window) {
            mu = std::min(mu, su / k);
            ms = std::min(ms, ss / k);
        }
    }
    CHECK(v.liminf_u == doctest::Approx(mu).epsilon(1e-9));
    CHECK(v.liminf_s == doctest::Approx(ms).epsilon(1e-9));
}

TEST_CASE("pliss_times: closed-form cases") {
    const std::vector<double> steady(10, -0.9624);
    const std::vector<int> all = pliss_times(steady, 0.5);
    REQUIRE(all.size() == 10);
    for (int i = 0; i < 10; ++i) CHECK(all[i] == i + 1);

    const std::vector<double> mixed{-1.0, -1.0, 0.5, -1.0};
    const double r = std::exp(-0.25);
    const std::vector<int> got = pliss_times(mixed, r);
    CHECK(got == std::vector<int>{1, 2, 4});
    CHECK(got == ref::pliss_times_quadratic(mixed, std::log(r)));

    const std::vector<double> expanding(8, 0.1);
    CHECK(pliss_times(expanding, r).empty());

    CHECK_THROWS_AS(pliss_times(steady, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(pliss_times(steady, -0.5), std::invalid_argument);
}

TEST_CASE("pliss_times matches the quadratic reference on random data") {
    RngStream rng(4242, 0);
    for (int trial = 0; trial < 500; ++trial) {
        const int len = 1 + static_cast<int>(rng.next_below(200));
        std::vector<double> logs(len);
        for (double& v : logs) v = 2.0 * rng.next_double() - 1.2;
        const double r = 0.2 + 0.75 * rng.next_double();
        CHECK(pliss_times(logs, r) ==
              ref::pliss_times_quadratic(logs, std::log(r)));
    }
}

TEST_CASE("pliss_times: monotonicity and concatenation") {
    RngStream rng(515, 0);
    for (int trial = 0; trial < 200; ++trial) {
        const int len = 2 + static_cast<int>(rng.next_below(50));
        std::vector<double> logs(len);
        for (double& v : logs) v = 2.0 * rng.next_double() - 1.2;
        const double r1 = 0.2 + 0.4 * rng.next_double();
        const double r2 = r1 + (0.99 - r1) * rng.next_double();
        const std::vector<int> strict = pliss_times(logs, r1);
        const std::vector<int> loose = pliss_times(logs, r2);
        // A harder rate only removes qualifying times.
        CHECK(std::includes(loose.begin(), loose.end(), strict.begin(),
                            strict.end()));

        // A qualifying time of the suffix started at a qualifying time of
        // the prefix is itself qualifying for the whole sequence.
        if (!strict.empty()) {
            const int cut = strict[rng.next_below(strict.size())];
            const std::vector<double> tail(logs.begin() + cut, logs.end());
            for (const int t : pliss_times(tail, r1)) {
                CHECK(std::binary_search(strict.begin(), strict.end(),
                                         cut + t));
            }
        }
    }
}

TEST_CASE("theta_density: counting and validation") {
    CHECK(theta_density({1, 2, 3, 4}, 4) == doctest::Approx(1.0));
    CHECK(theta_density({}, 50) == doctest::Approx(0.0));
    CHECK(theta_density({2, 4, 9}, 8) == doctest::Approx(0.25));
    CHECK_THROWS_AS(theta_density({1}, 0), std::invalid_argument);
}

TEST_CASE("qualifying time density is stable in the horizon") {
    const MapModel m = MapModel::neutral_cat();
    const RegionParams params;
    const TorusPoint p{0.3123, 0.7457};
    const HyperbolicityReport a = analyze_point(m, p, params, 10000);
    const HyperbolicityReport b = analyze_point(m, p, params, 100000);
    REQUIRE(a.theta_hat > 0.0);
    REQUIRE(b.theta_hat > 0.0);
    CHECK(std::abs(a.theta_hat - b.theta_hat) <= 0.2 * a.theta_hat);
}

TEST_CASE("qualifying_times and tail_ratio_sup on synthetic sums") {
    // Prefix sums sit 1 below the threshold line at powers of two and 1
    // above it elsewhere.
    const double lambda = 1.0;
    const int len = 256;
    std::vector<double> prefix(len + 1, 0.0);
    for (int s = 1; s <= len; ++s) {
        const bool low = (s & (s - 1)) == 0 && s >= 2;
        prefix[s] = -lambda * s + (low ? -1.0 : 1.0);
    }
    std::vector<double> logs(len);
    for (int s = 1; s <= len; ++s) logs[s - 1] = prefix[s] - prefix[s - 1];
    const std::vector<int> times = qualifying_times(logs, lambda);
    CHECK(times == std::vector<int>{2, 4, 8, 16, 32, 64, 128, 256});
    CHECK(tail_ratio_sup(times) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(tail_ratio_sup({}) == doctest::Approx(1.0));
    CHECK(tail_ratio_sup({7}) == doctest::Approx(1.0));
    CHECK_THROWS_AS(qualifying_times(logs, 0.0), std::invalid_argument);
}

TEST_CASE("bounded_type: dense qualifying times on the linear model") {
    const MapModel m = MapModel::linear_cat();
    const RegionParams params;
    const BoundedTypeReport rep = bounded_type(m, {0.3, 0.7}, params, 600, 2.0);
    CHECK(rep.verdict);
    REQUIRE(rep.s_k.size() == 600);
    REQUIRE(rep.t_k.size() == 600);
    CHECK(rep.s_k.front() == 1);
    CHECK(rep.s_k.back() == 600);
    CHECK(rep.ratio_sup >= 1.0);
    CHECK(rep.ratio_sup <= 1.01);
}

TEST_CASE("bounded_type: slowed model verdicts and degenerate base") {
    const MapModel m = MapModel::neutral_cat();
    const RegionParams params;
    CHECK_THROWS_AS(bounded_type(m, {0.0, 0.0}, params, 300, 4.0),
                    EmptySequence);
    CHECK_THROWS_AS(bounded_type(m, {0.3, 0.7}, params, 0, 4.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(bounded_type(m, {0.3, 0.7}, params, 300, 0.5),
                    std::invalid_argument);

    RngStream rng(88, 0);
    int seen = 0;
    for (int i = 0; i < 12 && seen < 5; ++i) {
        const TorusPoint p = random_point(rng);
        BoundedTypeReport rep;
        try {
            rep = bounded_type(m, p, params, 800, 4.0);
        } catch (const Error&) {
            continue;
        }
        ++seen;
        REQUIRE_FALSE(rep.s_k.empty());
        REQUIRE_FALSE(rep.t_k.empty());
        CHECK(std::is_sorted(rep.s_k.begin(), rep.s_k.end()));
        CHECK(std::is_sorted(rep.t_k.begin(), rep.t_k.end()));
        CHECK(rep.ratio_sup >= 1.0);
        const BoundedTypeReport loose = bounded_type(m, p, params, 800, 6.0);
        CHECK(loose.ratio_sup == doctest::Approx(rep.ratio_sup));
        if (rep.verdict) CHECK(loose.verdict);
    }
    CHECK(seen == 5);
}

TEST_CASE("sqrt_r0_robustness: linear tube keeps every qualifying time") {
    const MapModel m = MapModel::linear_cat();
    const RegionParams params;
    const double frac =
        sqrt_r0_robustness(m, {0.37, 0.61}, 12, 1e-3, 50, params);
    CHECK(frac == doctest::Approx(1.0));

    RegionParams harsh = params;
    harsh.r0_time = std::exp(-2.0);
    CHECK_THROWS_AS(sqrt_r0_robustness(m, {0.37, 0.61}, 12, 1e-3, 10, harsh),
                    std::invalid_argument);
}

TEST_CASE("sqrt_r0_robustness: slowed model at a checked qualifying time") {
    const MapModel m = MapModel::neutral_cat();
    const RegionParams params;
    RngStream rng(909, 0);
    const TorusPoint p = far_orbit_point(m, rng, 42, 0.04);
    const CocycleTrace trace =
        cocycle_trace(m, p, CocycleDirection::unstable, 40);
    const std::vector<int> times = pliss_times(trace.logs, params.r0_time);
    int n_time = 0;
    for (const int t : times)
        if (t >= 15) {
            n_time = t;
            break;
        }
    REQUIRE(n_time >= 15);
    const double frac = sqrt_r0_robustness(m, p, n_time, 1e-4, 100, params);
    CHECK(frac == doctest::Approx(1.0));

    // Very wide tubes stop being informative but stay well defined.
    const double wide =
        sqrt_r0_robustness(MapModel::linear_cat(), {0.37, 0.61}, 8, 0.4, 20,
                           params);
    INFO("wide-tube fraction ", wide);
    CHECK(wide >= 0.0);
    CHECK(wide <= 1.0);
}

TEST_CASE("zeta_bound: linear model saturates the visit frequency") {
    const MapModel m = MapModel::linear_cat();
    const RegionParams params;
    const std::vector<TorusPoint> pts{{0.3, 0.7}, {0.11, 0.52}, {0.87, 0.23}};
    const ZetaBound zb = zeta_bound(m, pts, params, 2000);
    CHECK(zb.delta_eps2_hat == 1.0);
    CHECK(zb.zeta_hat == params.eps2 * params.lambda);
}

TEST_CASE("zeta_bound: slowed model gives a positive stable bound") {
    const MapModel m = MapModel::neutral_cat();
    const RegionParams params;
    CHECK_THROWS_AS(zeta_bound(m, {TorusPoint{0.0, 0.0}}, params, 1000),
                    EmptySequence);

    RngStream rng(313, 0);
    std::vector<TorusPoint> pts;
    while (pts.size() < 30) {
        const TorusPoint p = random_point(rng);
        if (distance_to_S(m, p) >= params.eps1) pts.push_back(p);
    }
    const ZetaBound a = zeta_bound(m, pts, params, 6000);
    const ZetaBound b = zeta_bound(m, pts, params, 12000);
    INFO("delta ", a.delta_eps2_hat, " -> ", b.delta_eps2_hat);
    REQUIRE(a.zeta_hat > 0.0);
    REQUIRE(b.zeta_hat > 0.0);
    // Worst-case early windows dominate the estimate; with these
    // parameters the theoretical frequency floor is about 0.155.
    CHECK(a.delta_eps2_hat > 0.15);
    CHECK(std::abs(a.zeta_hat - b.zeta_hat) <= 0.2 * a.zeta_hat);
    CHECK(b.delta_eps2_hat <= a.delta_eps2_hat + 1e-12);
}

TEST_CASE("analyze_point: aggregated report on a generic point") {
    const MapModel m = MapModel::neutral_cat();
    const RegionParams params;
    const TorusPoint p{0.3123, 0.7457};
    const HyperbolicityReport rep = analyze_point(m, p, params, 2000);
    CHECK(rep.horizon == 2000);
    CHECK(has_tag(rep.region_tags, RegionTag::Omega1));
    CHECK(has_tag(rep.region_tags, RegionTag::Omega3));
    CHECK_FALSE(rep.n_plus.has_value());
    CHECK_FALSE(rep.n_minus.has_value());
    CHECK(rep.liminf_u <= -params.lambda);
    CHECK(rep.liminf_s <= -params.lambda);
    REQUIRE_FALSE(rep.pliss_times.empty());
    CHECK(std::is_sorted(rep.pliss_times.begin(), rep.pliss_times.end()));
    CHECK(rep.pliss_times.back() <= 2000);
    CHECK(rep.theta_hat > 0.0);
    CHECK(rep.theta_hat <= 1.0);
    CHECK_FALSE(rep.s_k.empty());
    CHECK_FALSE(rep.t_k.empty());
    CHECK(rep.ratio_sup >= 1.0);
}

TEST_CASE("analyze_point: fixed point of the slowed model") {
    const MapModel m = MapModel::neutral_cat();
    const RegionParams params;
    const HyperbolicityReport rep = analyze_point(m, {0.0, 0.0}, params, 500);
    REQUIRE(rep.region_tags.size() == 1);
    CHECK(rep.region_tags[0] == RegionTag::BSeps1);
    CHECK_FALSE(rep.n_plus.has_value());
    CHECK_FALSE(rep.n_minus.has_value());
    CHECK(rep.pliss_times.empty());
    CHECK(rep.theta_hat == doctest::Approx(0.0));
    CHECK(rep.s_k.empty());
    CHECK(rep.t_k.empty());
    CHECK(rep.ratio_sup == doctest::Approx(1.0));
}
