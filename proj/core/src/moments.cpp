#include "cbi/moments.hpp"

#include <cmath>

#include "cbi/expint.hpp"

namespace cbi {

CMatrices c_matrices(const ModelParams& params, const DerivedParams&) {
    CMatrices r;
    r.C1 = second_moment_matrix(params.mu1);
    r.C1(0, 0) += 2.0 * params.c[0];
    r.C2 = second_moment_matrix(params.mu2);
    r.C2(1, 1) += 2.0 * params.c[1];
    r.Cbar = 0.5 * (r.C1 + r.C2);
    return r;
}

Mat2 second_moment_matrix(const JumpMeasure& m) {
    Mat2 s;
    for (const auto& a : m.atoms) s += a.weight * outer(a.z, a.z);
    return s;
}

ScalarFunctionals scalar_functionals(const JumpMeasure& m) {
    ScalarFunctionals f;
    for (const auto& a : m.atoms) {
        const double zu = a.z[0] + a.z[1];
        const double zv = a.z[0] - a.z[1];
        f.s_plus += a.weight * zu * zu;
        f.s_minus += a.weight * zv * zv;
        f.s_diff += a.weight * (a.z[0] * a.z[0] - a.z[1] * a.z[1]);
        f.first_moment += a.weight * a.z;
    }
    return f;
}

Mat2 cond_var_M(const MomentKit& kit, Vec2 x) {
    return x[0] * kit.V1 + x[1] * kit.V2 + kit.V0;
}

Vec2 mean_Xt(const DerivedParams& d, Vec2 x, double t) {
    // int_0^t e^{uB~} du = (t/2) e1(t log rho) uu' + (t/2) e1(t log delta) vv'
    const double fu = t * unit_exp_integral(t * (d.gamma + d.kappa));
    const double fv = t * unit_exp_integral(t * (d.gamma - d.kappa));
    return expm_tb(d, t) * x + (0.5 * fu * dot(kU, d.tbeta)) * kU +
           (0.5 * fv * dot(kV, d.tbeta)) * kV;
}

namespace {

// e^{uB~} C e^{uB~'} expands over the eigenbasis into three fixed matrices
// with scalar coefficients rho^{2u}, rho^u delta^u and delta^{2u}. Given the
// integrals of a weight f(u) against those powers, assemble the matrix
// integral of f(u) e^{uB~} C e^{uB~'}.
Mat2 propagated(const Mat2& C, double int_uu, double int_uv, double int_vv) {
    const Mat2 UU = outer(kU, kU);
    const Mat2 UVsym = outer(kU, kV) + outer(kV, kU);
    const Mat2 VV = outer(kV, kV);
    return 0.25 * (int_uu * quad_form(C, kU, kU) * UU +
                   int_uv * quad_form(C, kU, kV) * UVsym +
                   int_vv * quad_form(C, kV, kV) * VV);
}

struct ClosedFormInputs {
    double rho, delta;
    double lr, ld;        // log rho, log delta
    Mat2 C[2];
    Mat2 N;               // int z z' nu(dz)
    double ub, vb;        // <u, tbeta>, <v, tbeta>
};

Mat2 closed_form_Vi(const ClosedFormInputs& in, int i) {
    // weight f_l(u) = <e^{(1-u)B~} e_i, e_l> = rho^{1-u}/2 + v_i v_l delta^{1-u}/2
    Mat2 out;
    const double y[3] = {in.rho * in.rho, in.rho * in.delta, in.delta * in.delta};
    for (int l = 0; l < 2; ++l) {
        const double vv = kV[i] * kV[l];
        double ints[3];
        for (int k = 0; k < 3; ++k)
            ints[k] = 0.5 * (cross_pow_integral(in.rho, y[k]) +
                             vv * cross_pow_integral(in.delta, y[k]));
        out += propagated(in.C[l], ints[0], ints[1], ints[2]);
    }
    return out;
}

Mat2 closed_form_V0(const ClosedFormInputs& in) {
    const double wy[3] = {2.0 * in.lr, in.lr + in.ld, 2.0 * in.ld};
    Mat2 out = propagated(in.N, unit_exp_integral(wy[0]), unit_exp_integral(wy[1]),
                          unit_exp_integral(wy[2]));
    // weight g_l(u) = int_0^{1-u} <e^{sB~} tbeta, e_l> ds
    //              = <u,tbeta>/2 (rho^{1-u}-1)/log rho
    //              + v_l <v,tbeta>/2 (delta^{1-u}-1)/log delta
    for (int l = 0; l < 2; ++l) {
        double ints[3];
        for (int k = 0; k < 3; ++k)
            ints[k] = 0.5 * (in.ub * ramp_exp_integral(in.lr, wy[k]) +
                             kV[l] * in.vb * ramp_exp_integral(in.ld, wy[k]));
        out += propagated(in.C[l], ints[0], ints[1], ints[2]);
    }
    return out;
}

// Independent route: 32-node Gauss-Legendre on the defining matrix
// integrals, with e^{uB~} evaluated directly.
struct QuadratureRoute {
    const DerivedParams& d;
    const Mat2* C;
    Mat2 N;
    Vec2 tbeta;
    GaussLegendre gl = gauss_legendre_unit(32);

    Mat2 Vi(int i) const {
        Mat2 out;
        for (size_t q = 0; q < gl.nodes.size(); ++q) {
            const double u = gl.nodes[q];
            const Mat2 eu = expm_tb(d, u);
            const Mat2 e1u = expm_tb(d, 1.0 - u);
            Mat2 inner;
            for (int l = 0; l < 2; ++l) inner += e1u(l, i) * (eu * C[l] * transpose(eu));
            out += gl.weights[q] * inner;
        }
        return out;
    }

    Mat2 V0() const {
        Mat2 out;
        for (size_t q = 0; q < gl.nodes.size(); ++q) {
            const double u = gl.nodes[q];
            const Mat2 eu = expm_tb(d, u);
            Mat2 inner = eu * N * transpose(eu);
            for (int l = 0; l < 2; ++l) {
                // inner time integral over [0, 1-u], same rule rescaled
                double g = 0.0;
                for (size_t r = 0; r < gl.nodes.size(); ++r) {
                    const double s = (1.0 - u) * gl.nodes[r];
                    g += gl.weights[r] * (expm_tb(d, s) * tbeta)[l];
                }
                g *= (1.0 - u);
                inner += g * (eu * C[l] * transpose(eu));
            }
            out += gl.weights[q] * inner;
        }
        return out;
    }
};

}  // namespace

Mat2 flow_smeared_matrix(const DerivedParams& d, const Mat2& C) {
    const double lr = d.gamma + d.kappa;
    const double ld = d.gamma - d.kappa;
    return propagated(C, unit_exp_integral(2.0 * lr), unit_exp_integral(lr + ld),
                      unit_exp_integral(2.0 * ld));
}

MomentKit v_matrices(const ModelParams& params, const DerivedParams& derived) {
    MomentKit kit;
    const CMatrices cm = c_matrices(params, derived);
    kit.C1 = cm.C1;
    kit.C2 = cm.C2;
    kit.Cbar = cm.Cbar;

    ClosedFormInputs in;
    in.rho = derived.rho;
    in.delta = derived.delta;
    in.lr = derived.gamma + derived.kappa;
    in.ld = derived.gamma - derived.kappa;
    in.C[0] = cm.C1;
    in.C[1] = cm.C2;
    in.N = second_moment_matrix(params.nu);
    in.ub = dot(kU, derived.tbeta);
    in.vb = dot(kV, derived.tbeta);

    kit.V1 = closed_form_Vi(in, 0);
    kit.V2 = closed_form_Vi(in, 1);
    kit.V0 = closed_form_V0(in);

    QuadratureRoute quad{derived, in.C, in.N, derived.tbeta};
    const Mat2 dV1 = kit.V1 - quad.Vi(0);
    const Mat2 dV2 = kit.V2 - quad.Vi(1);
    const Mat2 dV0 = kit.V0 - quad.V0();
    constexpr double kTol = 1e-9;
    if (max_abs(dV1) > kTol || max_abs(dV2) > kTol || max_abs(dV0) > kTol)
        throw Error(Errc::QuadratureMismatch,
                    "closed-form V matrices disagree with Gauss-Legendre quadrature");

    kit.Ctilde = 0.5 * (kit.V1 + kit.V2);
    kit.ctilde_uu = quad_form(kit.Ctilde, kU, kU);
    kit.ctilde_vv = quad_form(kit.Ctilde, kV, kV);
    kit.v0_uu = quad_form(kit.V0, kU, kU);
    kit.v0_vv = quad_form(kit.V0, kV, kV);
    kit.v0_uv = quad_form(kit.V0, kU, kV);
    return kit;
}

}  // namespace cbi
