#pragma once

#include <cstdint>
#include <vector>

#include "cbi/model.hpp"
#include "cbi/moments.hpp"
#include "cbi/rng.hpp"

namespace cbi {

enum class Scheme { ExactImmigration, Euler };

/// Discrete-time observations X_0..X_n of one path.
struct SkeletonPath {
    std::vector<Vec2> states;
    long n = 0;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    Scheme scheme = Scheme::ExactImmigration;
    double euler_h = 0.0;     // substep size; 0 for the exact scheme
    long clamp_events = 0;    // substeps clipped back into the quadrant
};

/// Exact skeleton for the pure-immigration case (c = 0, mu empty): the path
/// is the deterministic linear flow plus Poisson immigration jumps
/// propagated by e^{(k-s)B~}. No discretization error, no clamping.
SkeletonPath simulate_exact_immigration(const ModelParams& params, const DerivedParams& derived,
                                        long n, std::uint64_t seed, std::uint64_t stream = 0);

/// Euler scheme with substep h = 1/m for the general finite-activity model;
/// the skeleton records the state at integer times. Branching jumps are
/// thinned against the state frozen at the substep start, the drift uses the
/// fully compensated form so the one-step conditional mean is exact.
SkeletonPath simulate_euler(const ModelParams& params, const DerivedParams& derived, double T,
                            double h, std::uint64_t seed, std::uint64_t stream = 0,
                            Vec2 x0 = Vec2{});

/// One draw of the scaled limit objects on [0,1].
struct LimitDraw {
    Vec2 M1;              // terminal value of the 2-dim limit martingale
    double intY = 0.0;    // int_0^1 Y dt
    double intY2 = 0.0;   // int_0^1 Y^2 dt
    double intY_dMu = 0.0;  // int_0^1 Y d<u, M>
    double I = 0.0;       // nonnormal limit functional
    double h = 0.0;
};

struct LimitPath {
    std::vector<double> t;
    std::vector<double> y;
    std::vector<Vec2> m;  // empty when only Y was simulated
};

/// Euler path of the one-dimensional squared-Bessel-type limit on [0,1]:
/// dY = <u,tbeta> dt + sqrt(<Cbar u, u> max(Y,0)) dW, Y_0 = 0.
LimitPath simulate_limit_Y(const DerivedParams& derived, const MomentKit& kit, double h,
                           std::uint64_t seed, std::uint64_t stream = 0);

/// Joint Euler simulation of (M, Y) and the Riemann/Ito functionals feeding
/// the limit ratio I. Raises DegenerateDenominator when the time-averaged
/// spread int Y^2 - (int Y)^2 vanishes, which needs a zero immigration mean.
LimitDraw sample_limit_joint(const DerivedParams& derived, const MomentKit& kit, double h,
                             std::uint64_t seed, std::uint64_t stream = 0,
                             LimitPath* path = nullptr);

}  // namespace cbi
