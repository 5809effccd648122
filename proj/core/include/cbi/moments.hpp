#pragma once

#include "cbi/model.hpp"

namespace cbi {

/// Second-moment machinery: one-step conditional mean and variance of the
/// skeleton chain, and the quadratic measure functionals entering the limit
/// laws. Var(X_1 | X_0 = x) = x_1 V1 + x_2 V2 + V0.
struct MomentKit {
    Mat2 C1, C2;   // per-type branching variance sources
    Mat2 Cbar;     // <utilde, e_k> weighted sum of the C_k
    Mat2 Ctilde;   // (V1 + V2)/2
    Mat2 V1, V2;   // state-proportional parts of the conditional variance
    Mat2 V0;       // conditional variance from the zero state

    double ctilde_uu = 0.0;  // <Ctilde u, u>
    double ctilde_vv = 0.0;  // <Ctilde v, v>
    double v0_uu = 0.0;      // <V0 u, u>
    double v0_vv = 0.0;      // <V0 v, v>
    double v0_uv = 0.0;      // <V0 u, v>
};

struct CMatrices {
    Mat2 C1, C2, Cbar;
};

/// C_k = 2 c_k e_k e_k' + int z z' mu_k(dz); Cbar = (C1 + C2)/2.
CMatrices c_matrices(const ModelParams& params, const DerivedParams& derived);

/// Closed-form V matrices, cross-checked internally against 32-node
/// Gauss-Legendre quadrature of the defining integrals; a discrepancy above
/// 1e-9 in any entry raises QuadratureMismatch.
MomentKit v_matrices(const ModelParams& params, const DerivedParams& derived);

/// Var(X_1 | X_0 = x) = x_1 V1 + x_2 V2 + V0.
Mat2 cond_var_M(const MomentKit& kit, Vec2 x);

/// E(X_t | X_0 = x) = e^{tB~} x + int_0^t e^{uB~} tbeta du.
Vec2 mean_Xt(const DerivedParams& derived, Vec2 x, double t);

struct ScalarFunctionals {
    double s_plus = 0.0;   // int (z1 + z2)^2
    double s_minus = 0.0;  // int (z1 - z2)^2
    double s_diff = 0.0;   // int (z1^2 - z2^2)
    Vec2 first_moment;     // int z
};

ScalarFunctionals scalar_functionals(const JumpMeasure& m);

/// int z z' m(dz), exact over atoms.
Mat2 second_moment_matrix(const JumpMeasure& m);

/// int_0^1 e^{tB~} C e^{tB~'} dt in closed form.
Mat2 flow_smeared_matrix(const DerivedParams& derived, const Mat2& C);

}  // namespace cbi
