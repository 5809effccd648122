#pragma once

#include <vector>

#include "cbi/model.hpp"
#include "cbi/simulate.hpp"

namespace cbi {

/// CLS estimates of the transformed parameters (rho, delta, obeta) from one
/// observed skeleton. rho_hat is finite only on H, delta_hat only on Htilde,
/// obeta_hat only on both; undefined entries are NaN.
struct CLSResult {
    double rho_hat;
    double delta_hat;
    Vec2 obeta_hat;
    bool H = false;       // nonzero empirical variance of the U predecessors
    bool Htilde = false;  // same for the V predecessors
    long n = 0;
};

struct UVSeries {
    std::vector<double> U;  // U_k = X_{k,1} + X_{k,2}, k = 0..n
    std::vector<double> V;  // V_k = X_{k,1} - X_{k,2}
};

UVSeries decompose_uv(const SkeletonPath& path);

struct ExistenceFlags {
    bool H;
    bool Htilde;
};

/// Degeneracy guards for the least-squares denominators, with a relative
/// tolerance so that float noise on a constant sequence cannot fake
/// existence: n sum a_{k-1}^2 - (sum a_{k-1})^2 > 1e-12 (1 + sum a_{k-1}^2).
ExistenceFlags existence_flags(const std::vector<double>& U, const std::vector<double>& V);

/// Closed-form CLS estimator. Throws EstimatorUndefined when H fails (no
/// component is estimable); with H but not Htilde, delta_hat and obeta_hat
/// are NaN and the flags record which denominators degenerated.
CLSResult cls_estimate(const SkeletonPath& path);

struct TransformedEstimates {
    double s_hat;
    double gamma_hat;
    double kappa_hat;
    Vec2 tbeta_hat;
};

/// s_hat = log rho_hat and (gamma, kappa, tbeta) via the inverse parameter
/// transform. Requires both flags; requires rho_hat > 0 and delta_hat > 0.
TransformedEstimates transform_estimates(const CLSResult& r);

/// Martingale differences M_k = X_k - e^{B~} X_{k-1} - obeta at the TRUE
/// parameters (diagnostic; not an estimation step).
std::vector<Vec2> residuals_M(const SkeletonPath& path, const DerivedParams& derived);

}  // namespace cbi
