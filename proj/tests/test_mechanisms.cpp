#include <doctest.h>

#include <cmath>

#include "cbi/mechanisms.hpp"
#include "support/oracles.hpp"

using namespace cbi;

namespace {

MechanismContext linear_ctx() {
    // c = 0, mu = 0: the v-ODE is linear, v(t) = e^{t B~'} lambda
    ModelParams p;
    p.B = Mat2{{{-1.0, 1.0}, {1.0, -1.0}}};
    p.beta = Vec2{{0.5, 0.5}};
    p.nu.atoms.push_back({Vec2{{1.0, 1.0}}, 1.0});
    return MechanismContext::make(p);
}

}  // namespace

TEST_CASE("branching mechanism values") {
    MechanismContext ctx = linear_ctx();
    ctx.params.c = Vec2{{0.5, 0.5}};
    CHECK(phi(ctx, 0, Vec2{{0.0, 0.0}}) == 0.0);
    CHECK(phi(ctx, 0, Vec2{{1.0, 1.0}}) == doctest::Approx(0.5).epsilon(1e-14));

    // single-atom example with c = 0 and B = 0; phi only reads params
    MechanismContext atom_ctx = linear_ctx();
    atom_ctx.params = ModelParams{};
    atom_ctx.params.mu1.atoms.push_back({Vec2{{1.0, 0.0}}, 1.0});
    CHECK(phi(atom_ctx, 0, Vec2{{1.0, 1.0}}) ==
          doctest::Approx(std::exp(-1.0) - 1.0 + 1.0).epsilon(1e-10));
}

TEST_CASE("immigration mechanism values") {
    const MechanismContext ctx = linear_ctx();
    CHECK(psi(ctx, Vec2{{0.0, 0.0}}) == 0.0);
    CHECK(psi(ctx, Vec2{{1.0, 1.0}}) ==
          doctest::Approx(1.0 + 1.0 - std::exp(-2.0)).epsilon(1e-14));

    MechanismContext no_nu = ctx;
    no_nu.params.nu.atoms.clear();
    const Vec2 lam{{0.7, 0.2}};
    CHECK(psi(no_nu, lam) == dot(no_nu.params.beta, lam));
}

TEST_CASE("psi is nonnegative and monotone") {
    const MechanismContext ctx = linear_ctx();
    rng::Stream g(3, rng::Domain::Generic, 0);
    for (int i = 0; i < 100; ++i) {
        const Vec2 lam{{3.0 * g.uniform(), 3.0 * g.uniform()}};
        const Vec2 bigger{{lam[0] + g.uniform(), lam[1] + g.uniform()}};
        CHECK(psi(ctx, lam) >= 0.0);
        CHECK(psi(ctx, bigger) >= psi(ctx, lam));
    }
}

TEST_CASE("v-solution: fixed point and linear case") {
    const MechanismContext ctx = linear_ctx();

    const Vec2 zero = solve_v(ctx, 2.0, Vec2{{0.0, 0.0}}, 100);
    CHECK(zero[0] == 0.0);
    CHECK(zero[1] == 0.0);

    const Vec2 on_u = solve_v(ctx, 2.5, Vec2{{1.0, 1.0}}, 500);
    CHECK(on_u[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(on_u[1] == doctest::Approx(1.0).epsilon(1e-9));

    const Vec2 v1 = solve_v(ctx, 1.0, Vec2{{1.0, 0.0}}, 1000);
    CHECK(std::fabs(v1[0] - 0.5676676) < 1e-7);
    CHECK(std::fabs(v1[1] - 0.4323324) < 1e-7);
}

TEST_CASE("v-solution matches the transposed flow when branching is linear") {
    rng::Stream g(9, rng::Domain::Generic, 0);
    for (int i = 0; i < 5; ++i) {
        const ModelParams p = test::random_critical_model(g, true);  // c=0, mu=0
        const MechanismContext ctx = MechanismContext::make(p);
        const Vec2 lam{{2.0 * g.uniform(), 2.0 * g.uniform()}};
        const double t = 0.2 + 2.0 * g.uniform();
        const Vec2 got = solve_v(ctx, t, lam, 1000);
        const Vec2 want = transpose(expm_tb(ctx.derived, t)) * lam;
        CHECK(std::fabs(got[0] - want[0]) < 1e-8);
        CHECK(std::fabs(got[1] - want[1]) < 1e-8);
    }
}

TEST_CASE("Laplace transform from zero") {
    const MechanismContext ctx = linear_ctx();
    CHECK(laplace_from_zero(ctx, 1.0, Vec2{{0.0, 0.0}}, 100) == 1.0);
    CHECK(laplace_from_zero(ctx, 0.0, Vec2{{1.0, 1.0}}, 100) == 1.0);

    // v stays on the u-direction, so the integral is psi((1,1)) * t and the
    // value is exp(-(2 - e^-2)) = 0.15494677...
    const double val = laplace_from_zero(ctx, 1.0, Vec2{{1.0, 1.0}}, 1000);
    CHECK(std::fabs(val - std::exp(-(2.0 - std::exp(-2.0)))) < 1e-9);
}

TEST_CASE("Laplace transform is monotone in t and lambda") {
    const MechanismContext ctx = MechanismContext::make(test::model_c());
    double prev_t = 1.0;
    for (double t = 0.25; t <= 2.0; t += 0.25) {
        const double lt = laplace_from_zero(ctx, t, Vec2{{0.8, 0.4}}, 400);
        CHECK(lt <= prev_t + 1e-12);
        prev_t = lt;
    }
    double prev_l = 1.0;
    for (double scale = 0.2; scale <= 2.0; scale += 0.2) {
        const double lt = laplace_from_zero(ctx, 1.0, Vec2{{scale, 0.5 * scale}}, 400);
        CHECK(lt <= prev_l + 1e-12);
        prev_l = lt;
    }
}

TEST_CASE("fourth-order convergence of the Laplace evaluation") {
    const ModelParams models[3] = {test::model_a(), test::model_b(), test::model_c()};
    for (const ModelParams& p : models) {
        const MechanismContext ctx = MechanismContext::make(p);
        const Vec2 lam{{1.0, 0.4}};
        const double ref = laplace_from_zero(ctx, 1.0, lam, 6400);
        const double e25 = std::fabs(laplace_from_zero(ctx, 1.0, lam, 25) - ref);
        const double e50 = std::fabs(laplace_from_zero(ctx, 1.0, lam, 50) - ref);
        const double e100 = std::fabs(laplace_from_zero(ctx, 1.0, lam, 100) - ref);
        if (e25 > 1e-13) {
            CHECK(e50 < e25 / 6.0);
            if (e50 > 1e-13) CHECK(e100 < e50 / 6.0);
        }
    }
}

TEST_CASE("step validation") {
    const MechanismContext ctx = linear_ctx();
    CHECK_THROWS_AS(solve_v(ctx, 1.0, Vec2{{1.0, 1.0}}, 0), Error);
    CHECK_THROWS_AS(laplace_from_zero(ctx, 1.0, Vec2{{1.0, 1.0}}, -3), Error);
}
