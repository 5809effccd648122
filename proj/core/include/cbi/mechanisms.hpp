#pragma once

#include "cbi/model.hpp"

namespace cbi {

/// Branching/immigration mechanisms and the backward ODE for the Laplace
/// transform of the transition semigroup. Serves as an analytic oracle for
/// the path samplers: both must produce the same law of X_t from zero.
struct MechanismContext {
    ModelParams params;
    DerivedParams derived;

    static MechanismContext make(const ModelParams& p) {
        return MechanismContext{p, build_derived(p)};
    }
};

/// phi_i(lambda) = c_i lambda_i^2 - <B e_i, lambda>
///                 + int (e^{-<lambda,z>} - 1 + lambda_i (1 ^ z_i)) mu_i(dz)
double phi(const MechanismContext& ctx, int i, Vec2 lambda);

/// psi(lambda) = <beta, lambda> + int (1 - e^{-<lambda,z>}) nu(dz) >= 0
double psi(const MechanismContext& ctx, Vec2 lambda);

struct VSolveStats {
    int clamp_events = 0;       // undershoots clipped to zero
    double worst_undershoot = 0.0;  // most negative component seen
};

/// Solves dv/dt = -phi(v), v(0) = lambda, by classical RK4 with nsteps fixed
/// steps on [0, t]. Components are clamped at zero on undershoot; an
/// undershoot beyond 1e-6 raises StepUnderflow.
Vec2 solve_v(const MechanismContext& ctx, double t, Vec2 lambda, int nsteps,
             VSolveStats* stats = nullptr);

/// Laplace transform of X_t started from zero:
/// exp(-int_0^t psi(v(s, lambda)) ds), psi integrated by Simpson's rule over
/// the RK4 grid.
double laplace_from_zero(const MechanismContext& ctx, double t, Vec2 lambda, int nsteps,
                         VSolveStats* stats = nullptr);

}  // namespace cbi
