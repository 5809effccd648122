#include <doctest.h>

#include <cmath>

#include "cbi/mechanisms.hpp"
#include "cbi/simulate.hpp"
#include "cbi/stats.hpp"
#include "support/oracles.hpp"

using namespace cbi;

namespace {

struct MeanVar {
    double mean;
    double se;
    double var;
    double var_se;
};

MeanVar summarize(const std::vector<double>& xs) {
    const double m = mean_of(xs);
    const double v = variance_of(xs);
    const double n = static_cast<double>(xs.size());
    // standard error of the sample variance from the fourth central moment
    double m4 = 0.0;
    for (double x : xs) m4 += std::pow(x - m, 4);
    m4 /= n;
    const double var_se = std::sqrt(std::max(0.0, m4 - v * v) / n);
    return {m, std::sqrt(v / n), v, var_se};
}

}  // namespace

TEST_CASE("Philox4x32-10 known-answer vectors") {
    using A4 = std::array<std::uint32_t, 4>;
    using A2 = std::array<std::uint32_t, 2>;
    CHECK(rng::philox4x32_10(A2{0, 0}, A4{0, 0, 0, 0}) ==
          A4{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(rng::philox4x32_10(A2{0xffffffffu, 0xffffffffu},
                             A4{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}) ==
          A4{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    CHECK(rng::philox4x32_10(A2{0xa4093822u, 0x299f31d0u},
                             A4{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}) ==
          A4{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("counter streams are reproducible and block-addressable") {
    rng::Stream a(42, rng::Domain::Generic, 7);
    rng::Stream b(42, rng::Domain::Generic, 7);
    for (int i = 0; i < 50; ++i) CHECK(a.next_u64() == b.next_u64());

    a.set_block(3);
    std::vector<double> first;
    for (int i = 0; i < 5; ++i) first.push_back(a.uniform());
    a.set_block(3);
    for (int i = 0; i < 5; ++i) CHECK(a.uniform() == first[i]);

    // the cached Box-Muller spare must not leak across blocks
    rng::Stream d1(9, rng::Domain::Generic, 1);
    d1.set_block(5);
    const double first_of_block = d1.normal();
    rng::Stream d2(9, rng::Domain::Generic, 1);
    d2.normal();  // leaves a spare cached
    d2.set_block(5);
    CHECK(d2.normal() == first_of_block);

    double mean = 0.0;
    long npois = 0;
    std::vector<double> normals(20000);
    rng::Stream c(1, rng::Domain::Generic, 0);
    for (int i = 0; i < 20000; ++i) {
        const double u = c.uniform();
        CHECK(u > 0.0);
        CHECK(u < 1.0);
        mean += u;
        npois += c.poisson(3.7);
        normals[i] = c.normal();
    }
    CHECK(std::fabs(mean / 20000.0 - 0.5) < 0.01);
    CHECK(std::fabs(npois / 20000.0 - 3.7) < 0.05);
    CHECK(ks_statistic_normal(normals, 1.0) < 0.02);
}

TEST_CASE("exact sampler requires a pure immigration model") {
    const ModelParams c_model = test::model_c();
    CHECK_THROWS_WITH_AS(
        simulate_exact_immigration(c_model, build_derived(c_model), 10, 1),
        doctest::Contains("NotPureImmigration"), Error);
}

TEST_CASE("no immigration, zero start: the path stays at zero") {
    ModelParams p;
    p.B = Mat2{{{-1.0, 1.0}, {1.0, -1.0}}};
    const DerivedParams d = build_derived(p);
    const SkeletonPath exact = simulate_exact_immigration(p, d, 30, 5);
    const SkeletonPath euler = simulate_euler(p, d, 30.0, 1.0 / 16.0, 5);
    for (const Vec2& x : exact.states) CHECK((x[0] == 0.0 && x[1] == 0.0));
    for (const Vec2& x : euler.states) CHECK((x[0] == 0.0 && x[1] == 0.0));
}

TEST_CASE("exact sampler: first and second moment of the one-step law") {
    const ModelParams p = test::model_a();
    const DerivedParams d = build_derived(p);
    const long reps = 100000;
    std::vector<double> u1(reps);
    for (long r = 0; r < reps; ++r) {
        const SkeletonPath path = simulate_exact_immigration(p, d, 1, 99, r);
        u1[r] = path.states[1][0] + path.states[1][1];
        CHECK(path.clamp_events == 0);
    }
    const MeanVar s = summarize(u1);
    CHECK(std::fabs(s.mean - 3.0) < 3.0 * s.se);       // <u, obeta> = 3
    CHECK(std::fabs(s.var - 4.0) < 3.0 * s.var_se);    // <V0 u, u> = 4
}

TEST_CASE("exact sampler matches the Laplace-transform oracle") {
    const ModelParams p = test::model_a();
    const DerivedParams d = build_derived(p);
    const MechanismContext ctx = MechanismContext::make(p);
    const Vec2 lambdas[2] = {Vec2{{1.0, 1.0}}, Vec2{{0.5, 0.3}}};
    const long reps = 100000;
    for (const Vec2& lam : lambdas) {
        std::vector<double> vals(reps);
        for (long r = 0; r < reps; ++r) {
            const SkeletonPath path = simulate_exact_immigration(p, d, 1, 17, r);
            vals[r] = std::exp(-dot(lam, path.states[1]));
        }
        const MeanVar s = summarize(vals);
        const double oracle = laplace_from_zero(ctx, 1.0, lam, 2000);
        CHECK(std::fabs(s.mean - oracle) < 3.0 * s.se);
    }
}

TEST_CASE("Euler sampler: step validation") {
    const ModelParams p = test::model_c();
    const DerivedParams d = build_derived(p);
    CHECK_THROWS_WITH_AS(simulate_euler(p, d, 5.0, 0.3, 1), doctest::Contains("InvalidStep"),
                         Error);
    CHECK_THROWS_AS(simulate_euler(p, d, 5.0, 0.0, 1), Error);
    CHECK_THROWS_AS(simulate_euler(p, d, 5.0, 1.5, 1), Error);
}

TEST_CASE("Euler sampler mean against the exact conditional mean") {
    SUBCASE("pure immigration model") {
        const ModelParams p = test::model_a();
        const DerivedParams d = build_derived(p);
        const long reps = 10000;
        std::vector<double> u1(reps);
        for (long r = 0; r < reps; ++r) {
            const SkeletonPath path = simulate_euler(p, d, 1.0, 1.0 / 512.0, 4, r);
            u1[r] = path.states[1][0] + path.states[1][1];
        }
        const MeanVar s = summarize(u1);
        CHECK(std::fabs(s.mean - 3.0) < 0.05 + 3.0 * s.se);
    }
    SUBCASE("diffusive model") {
        const ModelParams p = test::model_c();
        const DerivedParams d = build_derived(p);
        const long reps = 10000;
        std::vector<double> u1(reps);
        for (long r = 0; r < reps; ++r) {
            const SkeletonPath path = simulate_euler(p, d, 1.0, 1.0 / 256.0, 8, r);
            u1[r] = path.states[1][0] + path.states[1][1];
        }
        const MeanVar s = summarize(u1);
        CHECK(std::fabs(s.mean - 4.0) < 0.05 + 3.0 * s.se);  // <u, obeta> = 4
    }
}

TEST_CASE("Euler bias shrinks as the substep is halved") {
    const ModelParams p = test::model_c();
    const DerivedParams d = build_derived(p);
    const long reps = 20000;
    double prev_dev = 0.0, prev_se = 0.0;
    bool first = true;
    for (const double h : {1.0 / 64.0, 1.0 / 128.0, 1.0 / 256.0, 1.0 / 512.0}) {
        std::vector<double> u1(reps);
        for (long r = 0; r < reps; ++r) {
            const SkeletonPath path = simulate_euler(p, d, 1.0, h, 21, r);
            u1[r] = path.states[1][0] + path.states[1][1];
        }
        const MeanVar s = summarize(u1);
        const double dev = std::fabs(s.mean - 4.0);
        if (!first) CHECK(dev <= prev_dev + 3.0 * (s.se + prev_se));
        prev_dev = dev;
        prev_se = s.se;
        first = false;
    }
}

TEST_CASE("sampled states stay in the nonnegative quadrant") {
    const ModelParams p = test::model_c();
    const DerivedParams d = build_derived(p);
    const SkeletonPath path = simulate_euler(p, d, 50.0, 1.0 / 64.0, 2);
    for (const Vec2& x : path.states) {
        CHECK(x[0] >= 0.0);
        CHECK(x[1] >= 0.0);
    }
}

TEST_CASE("paths are reproducible and stream-separated") {
    const ModelParams p = test::model_c();
    const DerivedParams d = build_derived(p);
    const SkeletonPath a = simulate_euler(p, d, 5.0, 1.0 / 64.0, 123, 9);
    const SkeletonPath b = simulate_euler(p, d, 5.0, 1.0 / 64.0, 123, 9);
    REQUIRE(a.states.size() == b.states.size());
    for (size_t k = 0; k < a.states.size(); ++k) {
        CHECK(a.states[k][0] == b.states[k][0]);
        CHECK(a.states[k][1] == b.states[k][1]);
    }
    const SkeletonPath c = simulate_euler(p, d, 5.0, 1.0 / 64.0, 123, 10);
    bool any_diff = false;
    for (size_t k = 1; k < a.states.size(); ++k)
        any_diff = any_diff || a.states[k][0] != c.states[k][0];
    CHECK(any_diff);
}

TEST_CASE("deterministic limit path when the branching noise vanishes") {
    const ModelParams p = test::model_a();
    const DerivedParams d = build_derived(p);
    const MomentKit kit = v_matrices(p, d);
    const LimitPath path = simulate_limit_Y(d, kit, 0.01, 7);
    for (size_t k = 0; k < path.t.size(); ++k)
        CHECK(path.y[k] == doctest::Approx(3.0 * path.t[k]).epsilon(1e-12));
}

TEST_CASE("limit Y moments for the diffusive model") {
    const ModelParams p = test::model_c();
    const DerivedParams d = build_derived(p);
    const MomentKit kit = v_matrices(p, d);
    REQUIRE(dot(kU, d.tbeta) == doctest::Approx(4.0));
    REQUIRE(quad_form(kit.Cbar, kU, kU) == doctest::Approx(1.0));

    const long reps = 10000;
    std::vector<double> y1(reps);
    for (long r = 0; r < reps; ++r) y1[r] = simulate_limit_Y(d, kit, 0.005, 13, r).y.back();
    const MeanVar s = summarize(y1);
    CHECK(std::fabs(s.mean - 4.0) < 3.0 * s.se);
    // Var Y_1 = <u,tbeta> <Cbar u,u> / 2 for the squared-Bessel-type limit
    CHECK(std::fabs(s.var - 2.0) < 3.0 * s.var_se + 0.05);
}

TEST_CASE("joint limit draw in the deterministic-Y case") {
    const ModelParams p = test::model_a();
    const DerivedParams d = build_derived(p);
    const MomentKit kit = v_matrices(p, d);
    const LimitDraw draw = sample_limit_joint(d, kit, 0.001, 3);
    CHECK(draw.I == 0.0);
    CHECK(draw.M1[0] == 0.0);
    // denominator approaches <u,tbeta>^2/12 with an O(h^2) grid correction
    const double denom = draw.intY2 - draw.intY * draw.intY;
    CHECK(std::fabs(denom - 9.0 / 12.0) < 9.0 / 12.0 * 1.1e-6 + 1e-9);
}

TEST_CASE("joint limit draws: numerator mean and Cauchy-Schwarz") {
    const ModelParams p = test::model_c();
    const DerivedParams d = build_derived(p);
    const MomentKit kit = v_matrices(p, d);
    const long reps = 10000;

    // E[int Y d<u,M>] = 0, but E[<u,M_1> int Y dt] = int_0^1 Var<u,M_t> dt
    // = <Ctilde u,u> <u,tbeta>/6, so the numerator is centered at minus that.
    const double target = -kit.ctilde_uu * dot(kU, d.tbeta) / 6.0;

    auto numerator_mean = [&](double h, MeanVar* out) {
        std::vector<double> numer(reps);
        for (long r = 0; r < reps; ++r) {
            const LimitDraw draw = sample_limit_joint(d, kit, h, 29, r);
            numer[r] = draw.intY_dMu - dot(kU, draw.M1) * draw.intY;
            CHECK(draw.intY2 >= draw.intY * draw.intY);
            CHECK(draw.intY >= 0.0);
        }
        *out = summarize(numer);
    };
    MeanVar coarse, fine;
    numerator_mean(0.005, &coarse);
    numerator_mean(0.0025, &fine);
    CHECK(std::fabs(coarse.mean - target) < 3.0 * coarse.se + 10.0 * 0.005);
    CHECK(std::fabs(fine.mean - target) < 3.0 * fine.se + 10.0 * 0.0025);
    // step-halving self-consistency of the discretization
    CHECK(std::fabs(fine.mean - coarse.mean) < 3.0 * (fine.se + coarse.se) + 10.0 * 0.005);
}
