#include "cbi/mechanisms.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace cbi {

double phi(const MechanismContext& ctx, int i, Vec2 lambda) {
    const ModelParams& p = ctx.params;
    const Vec2 bcol{{p.B(0, i), p.B(1, i)}};  // B e_i
    double r = p.c[i] * lambda[i] * lambda[i] - dot(bcol, lambda);
    for (const auto& a : p.mu(i).atoms) {
        const double cut = std::min(1.0, a.z[i]);
        r += a.weight * (std::exp(-dot(lambda, a.z)) - 1.0 + lambda[i] * cut);
    }
    return r;
}

double psi(const MechanismContext& ctx, Vec2 lambda) {
    const ModelParams& p = ctx.params;
    double r = dot(p.beta, lambda);
    for (const auto& a : p.nu.atoms) r += a.weight * (-std::expm1(-dot(lambda, a.z)));
    return r;
}

namespace {

Vec2 minus_phi(const MechanismContext& ctx, Vec2 v) {
    return Vec2{{-phi(ctx, 0, v), -phi(ctx, 1, v)}};
}

void clamp_state(Vec2& v, VSolveStats& stats) {
    for (int i = 0; i < 2; ++i) {
        if (v[i] < 0.0) {
            stats.worst_undershoot = std::min(stats.worst_undershoot, v[i]);
            if (v[i] < -1e-6)
                throw Error(Errc::StepUnderflow, "v left the nonnegative quadrant");
            if (v[i] < -1e-12) ++stats.clamp_events;
            v[i] = 0.0;
        }
    }
}

// One RK4 step of size h starting at v.
Vec2 rk4_step(const MechanismContext& ctx, Vec2 v, double h) {
    const Vec2 k1 = minus_phi(ctx, v);
    const Vec2 k2 = minus_phi(ctx, v + (0.5 * h) * k1);
    const Vec2 k3 = minus_phi(ctx, v + (0.5 * h) * k2);
    const Vec2 k4 = minus_phi(ctx, v + h * k3);
    return v + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Composite Simpson over equally spaced samples; a 3/8 block absorbs an odd
// interval count, a single interval falls back to the trapezoid.
double simpson(const std::vector<double>& f, double h) {
    const int n = static_cast<int>(f.size()) - 1;
    if (n <= 0) return 0.0;
    if (n == 1) return 0.5 * h * (f[0] + f[1]);
    double total = 0.0;
    int start = 0;
    if (n % 2 == 1) {
        if (n >= 3) {
            total += 3.0 * h / 8.0 * (f[0] + 3.0 * f[1] + 3.0 * f[2] + f[3]);
            start = 3;
        }
    }
    for (int k = start; k + 2 <= n; k += 2)
        total += h / 3.0 * (f[k] + 4.0 * f[k + 1] + f[k + 2]);
    return total;
}

}  // namespace

Vec2 solve_v(const MechanismContext& ctx, double t, Vec2 lambda, int nsteps,
             VSolveStats* stats) {
    if (nsteps < 1) throw Error(Errc::InvalidStep, "nsteps must be >= 1");
    VSolveStats local;
    VSolveStats& st = stats ? *stats : local;
    Vec2 v = lambda;
    const double h = t / nsteps;
    for (int k = 0; k < nsteps; ++k) {
        v = rk4_step(ctx, v, h);
        clamp_state(v, st);
    }
    return v;
}

double laplace_from_zero(const MechanismContext& ctx, double t, Vec2 lambda, int nsteps,
                         VSolveStats* stats) {
    if (nsteps < 1) throw Error(Errc::InvalidStep, "nsteps must be >= 1");
    if (t == 0.0) return 1.0;
    VSolveStats local;
    VSolveStats& st = stats ? *stats : local;
    Vec2 v = lambda;
    const double h = t / nsteps;
    std::vector<double> psival(nsteps + 1);
    psival[0] = psi(ctx, v);
    for (int k = 0; k < nsteps; ++k) {
        v = rk4_step(ctx, v, h);
        clamp_state(v, st);
        psival[k + 1] = psi(ctx, v);
    }
    return std::exp(-simpson(psival, h));
}

}  // namespace cbi
