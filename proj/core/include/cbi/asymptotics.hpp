#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "cbi/estimate.hpp"
#include "cbi/model.hpp"
#include "cbi/moments.hpp"
#include "cbi/simulate.hpp"

namespace cbi {

/// Which explicit limit law applies to the CLS estimators in the critical
/// case, following the case split on <Ctilde v, v>, the off-diagonal spread
/// of nu, and whether the branching noise vanishes entirely.
enum class Regime {
    GeneralNonNormal,       // <Ctilde v, v> > 0
    DegenerateVvanishes,    // <Ctilde v, v> = 0 but the V component keeps noise
    PureImmigrationNormal,  // c = 0, mu = 0: normal limits with closed covariances
    FullyDegenerate,        // V identically zero; delta/obeta estimators undefined
};

const char* regime_name(Regime r);

/// Deterministic limits of the normalized path sums (laws of large numbers).
struct LLNLimits {
    double vv_coeff = 0.0;  // <Ctilde v, v>/(1 - delta^2)
    double v_mean = 0.0;    // tdelta <v, tbeta> / (1 - delta)
    double v_square = 0.0;  // M
    double u_mean = 0.0;    // <u, tbeta> / 2
    double u_square = 0.0;  // <u, tbeta>^2 / 3
    double uv_cross = 0.0;  // tdelta <u, tbeta> <v, tbeta> / (2 (1 - delta))
};

struct LimitLaw {
    Regime regime = Regime::GeneralNonNormal;
    std::optional<double> sigma2_s;  // variance of the n^{3/2} s_hat limit
    std::optional<Mat4> R;           // covariance of (sqrt n gamma/kappa, sqrt n tbeta)
    std::optional<Mat4> S;           // covariance of (n^{3/2} rho, sqrt n delta, sqrt n obeta)
    std::optional<Mat4> Sigma;       // covariance of the scaled martingale sums
    std::optional<double> Mconst;    // limit of n^{-1} sum V_k^2 when <Ctilde v,v> = 0
    LLNLimits lln;
    std::vector<std::string> warnings;
};

/// All applicable limit-law matrices for a critical model (|s| <= 1e-12,
/// otherwise NotCritical). Quantities smaller than 1e-10 in magnitude are
/// treated as exact zeros for the case split, with a warning recorded.
LimitLaw theoretical_law(const ModelParams& params, const DerivedParams& derived,
                         const MomentKit& kit);

/// One replication of the Monte-Carlo harness: raw estimates (NaN where the
/// existence flags failed) plus the flags themselves.
struct RepRecord {
    bool valid = false;
    bool H = false;
    bool Htilde = false;
    double rho_hat = 0.0, delta_hat = 0.0;
    Vec2 obeta_hat;
    double s_hat = 0.0, gamma_hat = 0.0, kappa_hat = 0.0;
    Vec2 tbeta_hat;
};

struct MCOptions {
    long n = 1000;
    long reps = 1000;
    std::uint64_t seed = 1;
    double euler_h = 1.0 / 256.0;  // substep of the path sampler (non-pure models)
    double limit_h = 5e-4;         // substep of the limit sampler
    int workers = 0;               // 0: CBI_THREADS env var, else hardware
};

struct MCSummary {
    Regime regime = Regime::GeneralNonNormal;
    long reps = 0;
    long n = 0;
    std::vector<std::string> names;  // labels of the scaled-error coordinates
    std::vector<std::vector<double>> empirical_cov;
    std::vector<std::vector<double>> theoretical_cov;  // NaN where no closed form
    std::vector<std::vector<double>> cov_ratio;        // emp/theo on nonzero entries
    std::vector<std::pair<std::string, double>> ks_stats;

    // Non-normal regimes: n(rho_hat - rho) against fresh draws of the limit
    // functional.
    double ks_two_sample = 0.0;
    std::array<double, 9> deciles_empirical{};
    std::array<double, 9> deciles_reference{};
    double iqr_reference = 0.0;

    double h_fraction = 0.0;
    double htilde_fraction = 0.0;
    double invalid_fraction = 0.0;
    std::vector<RepRecord> records;
    std::vector<std::vector<double>> scaled;  // per valid rep, same order as names
};

/// Simulates `reps` independent skeletons (exact sampler for pure-immigration
/// models, Euler otherwise), runs the CLS pipeline on each, and compares the
/// scaled estimation errors against the applicable limit law. Replications
/// are distributed over workers with one RNG stream per replication index;
/// the aggregation is a deterministic fold in index order, so the output is
/// bitwise independent of the worker count.
MCSummary run_monte_carlo(const ModelParams& params, const MCOptions& options);

struct LLNDeviations {
    double main_vv = 0.0;                // always applicable
    std::optional<double> main_vt;       // <Ctilde v,v> = 0 only
    std::optional<double> main_vvt;      // <Ctilde v,v> = 0 only
    std::optional<double> main1_u;       // <Ctilde u,u> = 0 only
    std::optional<double> main1_uu;      // <Ctilde u,u> = 0 only
    std::optional<double> main_uvt;      // <Ctilde u,u> = 0 only
};

/// Deviations of the normalized path sums from their deterministic limits.
LLNDeviations lln_checks(const SkeletonPath& path, const DerivedParams& derived,
                         const MomentKit& kit);

/// Worker count resolution: explicit option, else CBI_THREADS, else hardware.
int resolve_workers(int requested);

}  // namespace cbi
