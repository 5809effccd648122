#include <doctest.h>

#include <cmath>

#include "cbi/expint.hpp"
#include "cbi/moments.hpp"
#include "support/oracles.hpp"

using namespace cbi;

TEST_CASE("C matrices") {
    ModelParams p = test::model_a();

    SUBCASE("vanish without diffusion and branching jumps") {
        const CMatrices cm = c_matrices(p, build_derived(p));
        CHECK(max_abs(cm.C1) == 0.0);
        CHECK(max_abs(cm.C2) == 0.0);
        CHECK(max_abs(cm.Cbar) == 0.0);
    }

    SUBCASE("diffusion part") {
        p.c = Vec2{{0.5, 0.5}};
        const CMatrices cm = c_matrices(p, build_derived(p));
        CHECK(cm.C1(0, 0) == 1.0);
        CHECK(cm.C1(1, 1) == 0.0);
        CHECK(cm.C2(1, 1) == 1.0);
        CHECK(cm.Cbar(0, 0) == 0.5);
        CHECK(cm.Cbar(0, 1) == 0.0);
    }

    SUBCASE("atom part") {
        p.mu1.atoms.push_back({Vec2{{1.0, 1.0}}, 2.0});
        p.mu2.atoms.push_back({Vec2{{1.0, 1.0}}, 2.0});  // keeps B~ symmetric
        const CMatrices cm = c_matrices(p, build_derived(p));
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) CHECK(cm.C1(i, j) == 2.0);
    }
}

TEST_CASE("V matrices of the reference immigration model") {
    const ModelParams p = test::model_a();
    const MomentKit kit = v_matrices(p, build_derived(p));
    CHECK(max_abs(kit.V1) == 0.0);
    CHECK(max_abs(kit.V2) == 0.0);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) CHECK(kit.V0(i, j) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(kit.v0_uu == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(kit.v0_uu ==
          doctest::Approx(scalar_functionals(p.nu).s_plus).epsilon(1e-12));
}

TEST_CASE("V0 v-quadratic form with off-diagonal immigration atoms") {
    const ModelParams p = test::model_b();
    const MomentKit kit = v_matrices(p, build_derived(p));
    CHECK(kit.v0_vv == doctest::Approx(1.0 - std::exp(-4.0)).epsilon(1e-10));
    CHECK(kit.v0_vv == doctest::Approx(0.9816844).epsilon(1e-6));
}

TEST_CASE("conditional variance of one step") {
    const ModelParams p = test::model_c();
    const MomentKit kit = v_matrices(p, build_derived(p));

    CHECK(max_abs(cond_var_M(kit, Vec2{{0.0, 0.0}}) - kit.V0) == 0.0);

    const double a = 1.7;
    const Mat2 sym = cond_var_M(kit, Vec2{{a, a}});
    const Mat2 expect = 2.0 * a * kit.Ctilde + kit.V0;
    CHECK(max_abs(sym - expect) < 1e-13);

    const Mat2 e1 = cond_var_M(kit, Vec2{{1.0, 0.0}});
    CHECK(max_abs(e1 - (kit.V1 + kit.V0)) == 0.0);
}

TEST_CASE("conditional mean of the flow") {
    const DerivedParams d = build_derived(test::model_a());

    const Vec2 x{{0.4, 2.2}};
    const Vec2 at0 = mean_Xt(d, x, 0.0);
    CHECK(at0[0] == x[0]);
    CHECK(at0[1] == x[1]);

    const Vec2 from0 = mean_Xt(d, Vec2{}, 1.0);
    CHECK(from0[0] == doctest::Approx(1.5).epsilon(1e-13));
    CHECK(from0[1] == doctest::Approx(1.5).epsilon(1e-13));

    const Vec2 from_e1 = mean_Xt(d, Vec2{{1.0, 0.0}}, 1.0);
    CHECK(from_e1[0] == doctest::Approx(2.0676676).epsilon(1e-7));
    CHECK(from_e1[1] == doctest::Approx(1.9323324).epsilon(1e-7));
}

TEST_CASE("scalar measure functionals") {
    JumpMeasure m;
    ScalarFunctionals f = scalar_functionals(m);
    CHECK(f.s_plus == 0.0);
    CHECK(f.s_minus == 0.0);
    CHECK(f.s_diff == 0.0);
    CHECK(f.first_moment[0] == 0.0);

    m.atoms.push_back({Vec2{{1.0, 1.0}}, 1.0});
    f = scalar_functionals(m);
    CHECK(f.s_plus == 4.0);
    CHECK(f.s_minus == 0.0);
    CHECK(f.s_diff == 0.0);
    CHECK(f.first_moment[0] == 1.0);
    CHECK(f.first_moment[1] == 1.0);

    m.atoms.clear();
    m.atoms.push_back({Vec2{{2.0, 0.0}}, 0.5});
    m.atoms.push_back({Vec2{{0.0, 2.0}}, 0.5});
    f = scalar_functionals(m);
    CHECK(f.s_plus == 4.0);
    CHECK(f.s_minus == 4.0);
    CHECK(f.s_diff == 0.0);
    CHECK(f.first_moment[0] == 1.0);
}

TEST_CASE("scalar exponential integrals against brute-force quadrature") {
    const GaussLegendre gl = gauss_legendre_unit(64);
    auto quad = [&](auto&& f) {
        double s = 0.0;
        for (size_t q = 0; q < gl.nodes.size(); ++q) s += gl.weights[q] * f(gl.nodes[q]);
        return s;
    };
    for (const double w : {-20.0, -8.0, -2.0, -0.3, 0.0, 0.2, 1.0, 6.0, 20.0}) {
        CHECK(std::fabs(unit_exp_integral(w) - quad([&](double u) { return std::exp(w * u); })) <
              1e-13 * std::exp(std::max(0.0, w)));
        for (int m = 1; m <= 6; ++m) {
            const double want = quad([&](double u) { return std::pow(1.0 - u, m) * std::exp(w * u); });
            CHECK(std::fabs(unit_poly_exp_integral(m, w) - want) <
                  1e-13 * (1.0 + std::exp(std::max(0.0, w))));
        }
        for (const double a : {-0.2, -0.05, 0.0, 0.1, 0.24, 0.8, 3.0}) {
            const double want = quad([&](double u) {
                const double ramp = a == 0.0 ? (1.0 - u) : std::expm1(a * (1.0 - u)) / a;
                return ramp * std::exp(w * u);
            });
            CHECK(std::fabs(ramp_exp_integral(a, w) - want) <
                  1e-12 * (1.0 + std::exp(std::max(0.0, w) + std::max(0.0, a))));
        }
    }
}

TEST_CASE("moment kit at a barely irreducible model") {
    // kappa small enough that the series branch of the ramp integral is the
    // live code path; the internal quadrature check guards the result.
    ModelParams p = test::model_a();
    p.B = Mat2{{{-0.05, 0.05}, {0.05, -0.05}}};
    const DerivedParams d = build_derived(p);
    REQUIRE(d.delta == doctest::Approx(std::exp(-0.1)));
    const MomentKit kit = v_matrices(p, d);
    CHECK(kit.v0_uu == doctest::Approx(4.0).epsilon(1e-10));
}

TEST_CASE("closed forms survive the quadrature cross-check on random models") {
    rng::Stream g(31, rng::Domain::Generic, 0);
    for (int i = 0; i < 20; ++i) {
        const ModelParams p = test::random_critical_model(g, i % 3 == 0);
        const DerivedParams d = build_derived(p);
        MomentKit kit;
        CHECK_NOTHROW(kit = v_matrices(p, d));

        for (const Mat2* m : {&kit.V1, &kit.V2, &kit.V0, &kit.C1, &kit.C2}) {
            CHECK(std::fabs((*m)(0, 1) - (*m)(1, 0)) < 1e-12);
            CHECK(sym_eigenvalues(*m)[0] >= -1e-12);
        }
        CHECK(max_abs(kit.Ctilde - 0.5 * (kit.V1 + kit.V2)) == 0.0);
    }
}

TEST_CASE("critical-case quadratic-form identities") {
    rng::Stream g(47, rng::Domain::Generic, 0);
    for (int i = 0; i < 20; ++i) {
        const bool pure = i % 2 == 0;
        const ModelParams p = test::random_critical_model(g, pure);
        const DerivedParams d = build_derived(p);
        const MomentKit kit = v_matrices(p, d);
        const double shrink =
            (1.0 - d.delta * d.delta) / (2.0 * std::log(1.0 / d.delta));

        CHECK(std::fabs(kit.ctilde_uu - quad_form(kit.Cbar, kU, kU)) < 1e-10);
        CHECK(std::fabs(kit.ctilde_vv - shrink * quad_form(kit.Cbar, kV, kV)) < 1e-10);
        if (pure) {
            // both V0 quadratic-form identities need a vanishing branching
            // variance on top of criticality
            CHECK(std::fabs(kit.v0_uu - scalar_functionals(p.nu).s_plus) < 1e-10);
            CHECK(std::fabs(kit.v0_vv - shrink * scalar_functionals(p.nu).s_minus) < 1e-10);
        }
    }
}

TEST_CASE("closed-form V matrices against an independent series-flow quadrature") {
    // Same integrals, but e^{uB~} from the Taylor oracle and a denser rule.
    rng::Stream g(53, rng::Domain::Generic, 0);
    const GaussLegendre gl = gauss_legendre_unit(48);
    for (int trial = 0; trial < 6; ++trial) {
        const ModelParams p = test::random_critical_model(g, false);
        const DerivedParams d = build_derived(p);
        const MomentKit kit = v_matrices(p, d);
        const CMatrices cm = c_matrices(p, d);
        const Mat2 C[2] = {cm.C1, cm.C2};

        for (int i = 0; i < 2; ++i) {
            Mat2 quad;
            for (size_t qn = 0; qn < gl.nodes.size(); ++qn) {
                const double u = gl.nodes[qn];
                const Mat2 eu = test::expm_series(u * d.tB);
                const Mat2 e1u = test::expm_series((1.0 - u) * d.tB);
                Mat2 inner;
                for (int l = 0; l < 2; ++l) inner += e1u(l, i) * (eu * C[l] * transpose(eu));
                quad += gl.weights[qn] * inner;
            }
            CHECK(max_abs(quad - (i == 0 ? kit.V1 : kit.V2)) < 1e-10);
        }
    }
}
