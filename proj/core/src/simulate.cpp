#include "cbi/simulate.hpp"

#include <cmath>

#include "cbi/expint.hpp"

namespace cbi {

namespace {

/// Inverse-CDF sampler over the atoms of a finite measure.
struct AtomSampler {
    std::vector<Vec2> z;
    std::vector<double> cum;
    double total = 0.0;

    explicit AtomSampler(const JumpMeasure& m) {
        z.reserve(m.atoms.size());
        cum.reserve(m.atoms.size());
        for (const auto& a : m.atoms) {
            total += a.weight;
            z.push_back(a.z);
            cum.push_back(total);
        }
    }

    Vec2 draw(rng::Stream& g) const {
        const double x = g.uniform() * total;
        size_t lo = 0, hi = cum.size() - 1;
        while (lo < hi) {
            const size_t mid = (lo + hi) / 2;
            if (cum[mid] < x)
                lo = mid + 1;
            else
                hi = mid;
        }
        return z[lo];
    }
};

long checked_substeps(double h) {
    if (!(h > 0.0) || h > 1.0) throw Error(Errc::InvalidStep, "h must lie in (0, 1]");
    const double m = 1.0 / h;
    const long mi = std::lround(m);
    if (mi < 1 || std::fabs(m - static_cast<double>(mi)) > 1e-9 * m)
        throw Error(Errc::InvalidStep, "1/h must be an integer");
    return mi;
}

}  // namespace

SkeletonPath simulate_exact_immigration(const ModelParams& params, const DerivedParams& derived,
                                        long n, std::uint64_t seed, std::uint64_t stream) {
    if (!params.pure_immigration())
        throw Error(Errc::NotPureImmigration,
                    "exact sampler requires c = 0 and empty branching measures");

    SkeletonPath path;
    path.n = n;
    path.seed = seed;
    path.stream = stream;
    path.scheme = Scheme::ExactImmigration;
    path.states.reserve(n + 1);
    path.states.push_back(Vec2{});

    const Mat2 flow = expm_tb(derived, 1.0);
    // Drift contribution of beta alone over one unit interval; the jump part
    // enters through the sampled arrivals, not through its mean.
    const Vec2 beta_flow = (0.5 * derived.trho * dot(kU, params.beta)) * kU +
                           (0.5 * derived.tdelta * dot(kV, params.beta)) * kV;

    rng::Stream g(seed, rng::Domain::ExactImmigration, stream);
    const bool has_nu = !params.nu.empty();
    AtomSampler nu_atoms(params.nu);

    Vec2 x{};
    for (long k = 1; k <= n; ++k) {
        g.set_block(static_cast<std::uint64_t>(k));
        x = flow * x + beta_flow;
        if (has_nu) {
            const long arrivals = g.poisson(nu_atoms.total);
            for (long j = 0; j < arrivals; ++j) {
                const double s = g.uniform();  // arrival offset in (k-1, k)
                const Vec2 z = nu_atoms.draw(g);
                x += expm_tb(derived, 1.0 - s) * z;
            }
        }
        path.states.push_back(x);
    }
    return path;
}

SkeletonPath simulate_euler(const ModelParams& params, const DerivedParams& derived, double T,
                            double h, std::uint64_t seed, std::uint64_t stream, Vec2 x0) {
    const long m = checked_substeps(h);
    const double hs = 1.0 / static_cast<double>(m);
    const long nsteps = static_cast<long>(std::floor(T + 1e-9));
    const long total_sub = nsteps * m;

    SkeletonPath path;
    path.n = nsteps;
    path.seed = seed;
    path.stream = stream;
    path.scheme = Scheme::Euler;
    path.euler_h = hs;
    path.states.reserve(nsteps + 1);
    path.states.push_back(x0);

    // Fully compensated drift matrix: D e_j = B~ e_j - int z mu_j(dz).
    Mat2 D = derived.tB;
    for (int j = 0; j < 2; ++j) {
        const Vec2 fm = params.mu(j).first_moment();
        D(0, j) -= fm[0];
        D(1, j) -= fm[1];
    }

    rng::Stream g(seed, rng::Domain::Euler, stream);
    AtomSampler nu_atoms(params.nu);
    AtomSampler mu_atoms[2] = {AtomSampler(params.mu1), AtomSampler(params.mu2)};
    const bool has_nu = !params.nu.empty();
    const bool has_mu[2] = {!params.mu1.empty(), !params.mu2.empty()};
    const bool has_c[2] = {params.c[0] > 0.0, params.c[1] > 0.0};
    const double sqh = std::sqrt(hs);

    Vec2 x = x0;
    for (long sub = 0; sub < total_sub; ++sub) {
        g.set_block(static_cast<std::uint64_t>(sub));
        const Vec2 frozen = x;
        x += hs * (params.beta + D * frozen);
        for (int i = 0; i < 2; ++i) {
            if (has_c[i])
                x[i] += std::sqrt(2.0 * params.c[i] * std::max(0.0, frozen[i])) * sqh * g.normal();
        }
        for (int j = 0; j < 2; ++j) {
            if (!has_mu[j]) continue;
            const double rate = hs * std::max(0.0, frozen[j]) * mu_atoms[j].total;
            const long arrivals = g.poisson(rate);
            for (long a = 0; a < arrivals; ++a) x += mu_atoms[j].draw(g);
        }
        if (has_nu) {
            const long arrivals = g.poisson(hs * nu_atoms.total);
            for (long a = 0; a < arrivals; ++a) x += nu_atoms.draw(g);
        }
        for (int i = 0; i < 2; ++i) {
            if (x[i] < 0.0) {
                x[i] = 0.0;
                ++path.clamp_events;
            }
        }
        if ((sub + 1) % m == 0) path.states.push_back(x);
    }
    return path;
}

LimitPath simulate_limit_Y(const DerivedParams& derived, const MomentKit& kit, double h,
                           std::uint64_t seed, std::uint64_t stream) {
    if (!(h > 0.0) || h > 0.01)
        throw Error(Errc::InvalidStep, "limit sampler expects h in (0, 0.01]");
    const long m = checked_substeps(h);
    const double hs = 1.0 / static_cast<double>(m);
    const double drift = dot(kU, derived.tbeta);
    const double cuu = std::max(0.0, quad_form(kit.Cbar, kU, kU));
    const double sqh = std::sqrt(hs);

    rng::Stream g(seed, rng::Domain::LimitY, stream);
    LimitPath path;
    path.t.reserve(m + 1);
    path.y.reserve(m + 1);
    double y = 0.0;
    path.t.push_back(0.0);
    path.y.push_back(y);
    for (long k = 0; k < m; ++k) {
        g.set_block(static_cast<std::uint64_t>(k));
        y += drift * hs + std::sqrt(cuu * std::max(0.0, y)) * sqh * g.normal();
        path.t.push_back((k + 1) * hs);
        path.y.push_back(y);
    }
    return path;
}

LimitDraw sample_limit_joint(const DerivedParams& derived, const MomentKit& kit, double h,
                             std::uint64_t seed, std::uint64_t stream, LimitPath* path) {
    if (!(h > 0.0) || h > 0.01)
        throw Error(Errc::InvalidStep, "limit sampler expects h in (0, 0.01]");
    const long m = checked_substeps(h);
    const double hs = 1.0 / static_cast<double>(m);
    const double drift = dot(kU, derived.tbeta);
    const Mat2 root = sym_sqrt_psd(kit.Ctilde);
    const double sqh = std::sqrt(hs);

    rng::Stream g(seed, rng::Domain::LimitJoint, stream);
    Vec2 M{};
    double intY = 0.0, intY2 = 0.0, intY_dMu = 0.0;
    if (path) {
        path->t.assign(1, 0.0);
        path->y.assign(1, 0.0);
        path->m.assign(1, Vec2{});
    }
    for (long k = 0; k < m; ++k) {
        g.set_block(static_cast<std::uint64_t>(k));
        const double y = dot(kU, M) + drift * (k * hs);
        intY += y * hs;
        intY2 += y * y * hs;
        const double scale = std::sqrt(std::max(0.0, y)) * sqh;
        const Vec2 xi{{g.normal(), g.normal()}};
        const Vec2 dM = scale * (root * xi);
        intY_dMu += y * dot(kU, dM);
        M += dM;
        if (path) {
            path->t.push_back((k + 1) * hs);
            path->y.push_back(dot(kU, M) + drift * ((k + 1) * hs));
            path->m.push_back(M);
        }
    }

    LimitDraw d;
    d.M1 = M;
    d.intY = intY;
    d.intY2 = intY2;
    d.intY_dMu = intY_dMu;
    d.h = hs;
    const double denom = intY2 - intY * intY;
    if (denom < 1e-14)
        throw Error(Errc::DegenerateDenominator, "int Y^2 - (int Y)^2 vanished");
    d.I = (intY_dMu - dot(kU, M) * intY) / denom;
    return d;
}

}  // namespace cbi
