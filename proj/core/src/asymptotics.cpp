#include "cbi/asymptotics.hpp"

#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <thread>

#include "cbi/expint.hpp"
#include "cbi/stats.hpp"

namespace cbi {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kCriticalTol = 1e-12;
constexpr double kZeroTol = 1e-10;
}  // namespace

const char* regime_name(Regime r) {
    switch (r) {
        case Regime::GeneralNonNormal: return "GeneralNonNormal";
        case Regime::DegenerateVvanishes: return "DegenerateVvanishes";
        case Regime::PureImmigrationNormal: return "PureImmigrationNormal";
        case Regime::FullyDegenerate: return "FullyDegenerate";
    }
    return "?";
}

namespace {

void set_pm_block(Mat4& m, int r0, int c0, double scale) {
    // scale * [[1,-1],[-1,1]] into the 2x2 block at (r0, c0)
    m[r0][c0] += scale;
    m[r0][c0 + 1] -= scale;
    m[r0 + 1][c0] -= scale;
    m[r0 + 1][c0 + 1] += scale;
}

Mat4 r_matrix(const DerivedParams& d, const ScalarFunctionals& fnu) {
    const double kg = d.kappa - d.gamma;
    const double grow = std::expm1(2.0 * kg);  // e^{2(kappa-gamma)} - 1
    const double vb = dot(kV, d.tbeta);
    const double delta = d.delta;

    Mat4 R{};
    set_pm_block(R, 0, 0, grow / 4.0);
    const double cross = -vb * grow / (4.0 * kg);
    set_pm_block(R, 2, 0, cross);
    set_pm_block(R, 0, 2, cross);

    const double a = fnu.s_plus;
    const double b = 0.5 * fnu.s_diff;
    const double c = (1.0 - delta * delta) / 4.0 *
                     (kg / (2.0 * (1.0 - delta) * (1.0 - delta)) * fnu.s_minus +
                      vb * vb / (kg * kg * delta * delta));
    R[2][2] += a + b;
    R[2][3] += a;
    R[3][2] += a;
    R[3][3] += a - b;
    set_pm_block(R, 2, 2, c);
    return R;
}

Mat4 s_matrix(const ModelParams& p, const DerivedParams& d, const ScalarFunctionals& fnu) {
    const double ub = dot(kU, d.tbeta);
    const double vb = dot(kV, d.tbeta);
    const double kg = d.kappa - d.gamma;  // = log(1/delta)

    Mat4 S{};
    const Mat2 T = flow_smeared_matrix(d, second_moment_matrix(p.nu));
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) S[2 + i][2 + j] = T(i, j);

    const double bvec[4] = {4.0 / ub, 0.0, -1.0, -1.0};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) S[i][j] += 0.75 * fnu.s_plus * bvec[i] * bvec[j];

    const double q = vb / (2.0 * kg);
    const double cvec[4] = {0.0, 1.0, -q, q};
    const double onemd2 = 1.0 - d.delta * d.delta;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) S[i][j] += onemd2 * cvec[i] * cvec[j];
    return S;
}

Mat4 sigma_matrix(const DerivedParams& d, const MomentKit& kit) {
    const double ub = dot(kU, d.tbeta);
    const double vb = dot(kV, d.tbeta);
    const Mat2 root = sym_sqrt_psd(kit.V0);
    const Vec2 pu = transpose(root) * kU;  // row u' V0^{1/2}
    const Vec2 pv = transpose(root) * kV;
    const double vscale = d.tdelta * vb / (1.0 - d.delta);

    const Vec2 rows[4] = {pu, (0.5 * ub) * pu, pv, vscale * pv};
    Mat4 S{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) S[i][j] = dot(rows[i], rows[j]);
    S[1][1] += ub * ub * kit.v0_uu / 12.0;
    S[3][3] += kit.v0_vv * kit.v0_vv / (1.0 - d.delta * d.delta);
    return S;
}

}  // namespace

LimitLaw theoretical_law(const ModelParams& params, const DerivedParams& derived,
                         const MomentKit& kit) {
    if (std::fabs(derived.s) > kCriticalTol)
        throw Error(Errc::NotCritical, "limit laws require the critical case s = 0");
    const double ub = dot(kU, derived.tbeta);
    if (!(ub > 0.0))
        throw Error(Errc::TypeError, "limit laws require a nonzero immigration mechanism");

    LimitLaw law;
    auto zeroed = [&law](double x, const char* name) {
        if (x != 0.0 && std::fabs(x) < kZeroTol) {
            law.warnings.push_back(std::string(name) + " below 1e-10 treated as zero");
            return 0.0;
        }
        return x;
    };

    const ScalarFunctionals fnu = scalar_functionals(params.nu);
    const double ctv = zeroed(kit.ctilde_vv, "<Ctilde v,v>");
    const double qnu = zeroed(fnu.s_minus, "int (z1-z2)^2 nu");
    const double vb = dot(kV, derived.tbeta);
    const double qbeta = zeroed(vb * vb, "(tbeta1-tbeta2)^2");
    const bool pure = params.pure_immigration();

    if (ctv > 0.0)
        law.regime = Regime::GeneralNonNormal;
    else if (pure)
        law.regime = Regime::PureImmigrationNormal;
    else if (qnu > 0.0 || qbeta > 0.0)
        law.regime = Regime::DegenerateVvanishes;
    else
        law.regime = Regime::FullyDegenerate;

    const double delta = derived.delta;
    const double onemd2 = 1.0 - delta * delta;

    if (pure) {
        law.sigma2_s = 12.0 * fnu.s_plus / (ub * ub);
        law.Sigma = sigma_matrix(derived, kit);
        if (qnu > 0.0) {
            law.R = r_matrix(derived, fnu);
            law.S = s_matrix(params, derived, fnu);
        }
    }
    if (ctv == 0.0)
        law.Mconst = kit.v0_vv / onemd2 +
                     derived.tdelta * derived.tdelta * vb * vb / ((1.0 - delta) * (1.0 - delta));

    law.lln.vv_coeff = kit.ctilde_vv / onemd2;
    law.lln.v_mean = derived.tdelta * vb / (1.0 - delta);
    law.lln.v_square = law.Mconst.value_or(kNaN);
    law.lln.u_mean = 0.5 * ub;
    law.lln.u_square = ub * ub / 3.0;
    law.lln.uv_cross = derived.tdelta * ub * vb / (2.0 * (1.0 - delta));
    return law;
}

LLNDeviations lln_checks(const SkeletonPath& path, const DerivedParams& derived,
                         const MomentKit& kit) {
    const UVSeries uv = decompose_uv(path);
    const long n = static_cast<long>(uv.U.size()) - 1;
    const double nd = static_cast<double>(n);

    KahanSum sumV, sumV2, sumUlag, sumUlag2, sumUV;
    for (long k = 1; k <= n; ++k) {
        sumV.add(uv.V[k]);
        sumV2.add(uv.V[k] * uv.V[k]);
        sumUlag.add(uv.U[k - 1]);
        sumUlag2.add(uv.U[k - 1] * uv.U[k - 1]);
        sumUV.add(uv.U[k] * uv.V[k]);
    }

    const double ub = dot(kU, derived.tbeta);
    const double vb = dot(kV, derived.tbeta);
    const double onemd = 1.0 - derived.delta;
    const double onemd2 = 1.0 - derived.delta * derived.delta;

    LLNDeviations dev;
    dev.main_vv = std::fabs(sumV2.value() / (nd * nd) -
                            kit.ctilde_vv / onemd2 * sumUlag.value() / (nd * nd));
    const bool v_degenerate = std::fabs(kit.ctilde_vv) < kZeroTol;
    const bool u_degenerate = std::fabs(kit.ctilde_uu) < kZeroTol;
    if (v_degenerate) {
        dev.main_vt = std::fabs(sumV.value() / nd - derived.tdelta * vb / onemd);
        const double m = kit.v0_vv / onemd2 +
                         derived.tdelta * derived.tdelta * vb * vb / (onemd * onemd);
        dev.main_vvt = std::fabs(sumV2.value() / nd - m);
    }
    if (u_degenerate) {
        dev.main1_u = std::fabs(sumUlag.value() / (nd * nd) - 0.5 * ub);
        dev.main1_uu = std::fabs(sumUlag2.value() / (nd * nd * nd) - ub * ub / 3.0);
        dev.main_uvt = std::fabs(sumUV.value() / (nd * nd) -
                                 derived.tdelta * ub * vb / (2.0 * onemd));
    }
    return dev;
}

int resolve_workers(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("CBI_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1)
            throw Error(Errc::TypeError, "CBI_THREADS must be a positive integer");
        return static_cast<int>(std::min(v, 64L));
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(std::min(hw, 16u));
}

namespace {

RepRecord one_replication(const ModelParams& params, const DerivedParams& derived,
                          const MCOptions& opt, long rep, bool pure) {
    RepRecord rec;
    rec.rho_hat = kNaN;
    rec.delta_hat = kNaN;
    rec.obeta_hat = Vec2{{kNaN, kNaN}};
    rec.s_hat = kNaN;
    rec.gamma_hat = kNaN;
    rec.kappa_hat = kNaN;
    rec.tbeta_hat = Vec2{{kNaN, kNaN}};
    try {
        const SkeletonPath path =
            pure ? simulate_exact_immigration(params, derived, opt.n, opt.seed,
                                              static_cast<std::uint64_t>(rep))
                 : simulate_euler(params, derived, static_cast<double>(opt.n), opt.euler_h,
                                  opt.seed, static_cast<std::uint64_t>(rep));
        rec.valid = true;
        try {
            const CLSResult cls = cls_estimate(path);
            rec.H = cls.H;
            rec.Htilde = cls.Htilde;
            rec.rho_hat = cls.rho_hat;
            rec.delta_hat = cls.delta_hat;
            rec.obeta_hat = cls.obeta_hat;
            if (cls.H && cls.rho_hat > 0.0) rec.s_hat = std::log(cls.rho_hat);
            if (cls.H && cls.Htilde && cls.rho_hat > 0.0 && cls.delta_hat > 0.0) {
                const TransformedEstimates t = transform_estimates(cls);
                rec.gamma_hat = t.gamma_hat;
                rec.kappa_hat = t.kappa_hat;
                rec.tbeta_hat = t.tbeta_hat;
            }
        } catch (const Error& e) {
            if (e.code() != Errc::EstimatorUndefined) throw;
            // Flags recorded from the data; the estimates stay NaN.
            const UVSeries uv = decompose_uv(path);
            const ExistenceFlags f = existence_flags(uv.U, uv.V);
            rec.H = f.H;
            rec.Htilde = f.Htilde;
        }
    } catch (const Error&) {
        rec.valid = false;
    }
    return rec;
}

void run_strided(long count, int workers, const std::function<void(long)>& body) {
    if (workers <= 1) {
        for (long i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (long i = w; i < count; i += workers) body(i);
        });
    for (auto& t : pool) t.join();
}

// Pairwise-complete covariance: per-coordinate means over finite entries,
// cross moments over rows where both coordinates are finite.
std::vector<std::vector<double>> pairwise_cov(const std::vector<std::vector<double>>& rows,
                                              size_t dim) {
    std::vector<double> mean(dim, kNaN);
    for (size_t c = 0; c < dim; ++c) {
        double s = 0.0;
        long cnt = 0;
        for (const auto& r : rows)
            if (std::isfinite(r[c])) {
                s += r[c];
                ++cnt;
            }
        if (cnt > 0) mean[c] = s / static_cast<double>(cnt);
    }
    std::vector<std::vector<double>> cov(dim, std::vector<double>(dim, kNaN));
    for (size_t a = 0; a < dim; ++a) {
        for (size_t b = a; b < dim; ++b) {
            double s = 0.0;
            long cnt = 0;
            for (const auto& r : rows)
                if (std::isfinite(r[a]) && std::isfinite(r[b])) {
                    s += (r[a] - mean[a]) * (r[b] - mean[b]);
                    ++cnt;
                }
            if (cnt > 1) cov[a][b] = cov[b][a] = s / static_cast<double>(cnt - 1);
        }
    }
    return cov;
}

// Delta-method image of S on the coordinates
// (n^{3/2} s, n^{1/2} gamma, n^{1/2} kappa, n^{1/2} tbeta, n^{1/2} delta).
std::vector<std::vector<double>> normal_theoretical_cov(const DerivedParams& d,
                                                        const LimitLaw& law) {
    std::vector<std::vector<double>> t(6, std::vector<double>(6, kNaN));
    if (law.sigma2_s) t[0][0] = *law.sigma2_s;
    if (!law.S) return t;

    const double delta = d.delta;
    // d/d delta of log(delta)/(2(delta-1)), the v-eigencoefficient of the
    // inverse unit-time flow average.
    const double gp = ((delta - 1.0) / delta - std::log(delta)) /
                      (2.0 * (delta - 1.0) * (delta - 1.0));
    const double wob = dot(kV, d.obeta);

    double L[6][4] = {};
    L[0][0] = 1.0;
    L[1][1] = 0.5 / delta;
    L[2][1] = -0.5 / delta;
    for (int i = 0; i < 2; ++i) {
        // row of (int_0^1 e^{sB~} ds)^{-1}
        L[3 + i][2] = 0.5 / d.trho + kV[i] * 0.5 / d.tdelta * kV[0];
        L[3 + i][3] = 0.5 / d.trho + kV[i] * 0.5 / d.tdelta * kV[1];
        L[3 + i][1] = gp * wob * kV[i];
    }
    L[5][1] = 1.0;

    const Mat4& S = *law.S;
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) {
            double s = 0.0;
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) s += L[i][a] * S[a][b] * L[j][b];
            t[i][j] = s;
        }
    return t;
}

}  // namespace

MCSummary run_monte_carlo(const ModelParams& params, const MCOptions& opt) {
    if (opt.reps < 100) throw Error(Errc::TypeError, "reps must be >= 100");
    const DerivedParams derived = build_derived(params);
    const MomentKit kit = v_matrices(params, derived);
    const LimitLaw law = theoretical_law(params, derived, kit);  // NotCritical guard
    const bool pure = params.pure_immigration();
    const bool normal_regime = law.regime == Regime::PureImmigrationNormal;
    const int workers = resolve_workers(opt.workers);

    MCSummary sum;
    sum.regime = law.regime;
    sum.reps = opt.reps;
    sum.n = opt.n;
    sum.records.resize(opt.reps);

    run_strided(opt.reps, workers, [&](long r) {
        sum.records[r] = one_replication(params, derived, opt, r, pure);
    });

    long valid = 0, hcount = 0, htcount = 0;
    for (const RepRecord& rec : sum.records) {
        if (!rec.valid) continue;
        ++valid;
        if (rec.H) ++hcount;
        if (rec.Htilde) ++htcount;
    }
    sum.invalid_fraction = 1.0 - static_cast<double>(valid) / static_cast<double>(opt.reps);
    sum.h_fraction = valid ? static_cast<double>(hcount) / static_cast<double>(valid) : 0.0;
    sum.htilde_fraction = valid ? static_cast<double>(htcount) / static_cast<double>(valid) : 0.0;

    const double nd = static_cast<double>(opt.n);
    const double sqn = std::sqrt(nd);
    if (normal_regime) {
        sum.names = {"n32_s", "sqn_gamma", "sqn_kappa", "sqn_tbeta1", "sqn_tbeta2",
                     "sqn_delta"};
        for (const RepRecord& rec : sum.records) {
            sum.scaled.push_back({nd * sqn * rec.s_hat,
                                  sqn * (rec.gamma_hat - derived.gamma),
                                  sqn * (rec.kappa_hat - derived.kappa),
                                  sqn * (rec.tbeta_hat[0] - derived.tbeta[0]),
                                  sqn * (rec.tbeta_hat[1] - derived.tbeta[1]),
                                  sqn * (rec.delta_hat - derived.delta)});
        }
        sum.theoretical_cov = normal_theoretical_cov(derived, law);
    } else {
        sum.names = {"n_rho", "sqn_delta", "obeta1", "obeta2"};
        for (const RepRecord& rec : sum.records) {
            sum.scaled.push_back({nd * (rec.rho_hat - derived.rho),
                                  sqn * (rec.delta_hat - derived.delta),
                                  rec.obeta_hat[0] - derived.obeta[0],
                                  rec.obeta_hat[1] - derived.obeta[1]});
        }
        sum.theoretical_cov.assign(4, std::vector<double>(4, kNaN));
        if (law.regime == Regime::DegenerateVvanishes && kit.v0_vv > 0.0)
            sum.theoretical_cov[1][1] = 1.0 - derived.delta * derived.delta;
    }
    sum.empirical_cov = pairwise_cov(sum.scaled, sum.names.size());

    sum.cov_ratio.assign(sum.names.size(), std::vector<double>(sum.names.size(), kNaN));
    for (size_t i = 0; i < sum.names.size(); ++i)
        for (size_t j = 0; j < sum.names.size(); ++j) {
            const double t = sum.theoretical_cov[i][j];
            if (std::isfinite(t) && t != 0.0 && std::isfinite(sum.empirical_cov[i][j]))
                sum.cov_ratio[i][j] = sum.empirical_cov[i][j] / t;
        }

    // Kolmogorov-Smirnov per coordinate against the theoretical normal.
    for (size_t c = 0; c < sum.names.size(); ++c) {
        const double var = sum.theoretical_cov[c][c];
        if (!std::isfinite(var) || !(var > 0.0)) continue;
        std::vector<double> xs;
        for (const auto& row : sum.scaled)
            if (std::isfinite(row[c])) xs.push_back(row[c]);
        if (xs.size() >= 100)
            sum.ks_stats.emplace_back(sum.names[c], ks_statistic_normal(xs, std::sqrt(var)));
    }

    if (!normal_regime) {
        // Reference sample of the nonnormal limit functional.
        std::vector<double> ref(opt.reps, kNaN);
        run_strided(opt.reps, workers, [&](long r) {
            try {
                ref[r] = sample_limit_joint(derived, kit, opt.limit_h, opt.seed,
                                            static_cast<std::uint64_t>(r))
                             .I;
            } catch (const Error&) {
            }
        });
        std::vector<double> refv, emp;
        for (double x : ref)
            if (std::isfinite(x)) refv.push_back(x);
        for (const auto& row : sum.scaled)
            if (std::isfinite(row[0])) emp.push_back(row[0]);
        if (!refv.empty() && !emp.empty()) {
            sum.ks_two_sample = ks_statistic_two_sample(emp, refv);
            sum.deciles_empirical = deciles_of(emp);
            sum.deciles_reference = deciles_of(refv);
            sum.iqr_reference = quantile_of(refv, 0.75) - quantile_of(refv, 0.25);
        }
    }
    return sum;
}

}  // namespace cbi
