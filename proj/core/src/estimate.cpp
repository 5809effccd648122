#include "cbi/estimate.hpp"

#include <cmath>
#include <limits>

namespace cbi {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kDegeneracyEps = 1e-12;

struct LsqSums {
    // all over k = 1..n: lag = a_{k-1}, cur = a_k
    double lag, cur, lag2, cross;
};

LsqSums accumulate(const std::vector<double>& a) {
    KahanSum lag, cur, lag2, cross;
    const size_t n = a.size() - 1;
    for (size_t k = 1; k <= n; ++k) {
        lag.add(a[k - 1]);
        cur.add(a[k]);
        lag2.add(a[k - 1] * a[k - 1]);
        cross.add(a[k] * a[k - 1]);
    }
    return {lag.value(), cur.value(), lag2.value(), cross.value()};
}

bool nondegenerate(const LsqSums& s, double n) {
    return n * s.lag2 - s.lag * s.lag > kDegeneracyEps * (1.0 + s.lag2);
}

double slope(const LsqSums& s, double n) {
    return (n * s.cross - s.cur * s.lag) / (n * s.lag2 - s.lag * s.lag);
}

}  // namespace

UVSeries decompose_uv(const SkeletonPath& path) {
    UVSeries uv;
    uv.U.reserve(path.states.size());
    uv.V.reserve(path.states.size());
    for (const Vec2& x : path.states) {
        uv.U.push_back(x[0] + x[1]);
        uv.V.push_back(x[0] - x[1]);
    }
    return uv;
}

ExistenceFlags existence_flags(const std::vector<double>& U, const std::vector<double>& V) {
    const double n = static_cast<double>(U.size()) - 1.0;
    return {nondegenerate(accumulate(U), n), nondegenerate(accumulate(V), n)};
}

CLSResult cls_estimate(const SkeletonPath& path) {
    const UVSeries uv = decompose_uv(path);
    const long n = static_cast<long>(path.states.size()) - 1;
    const double nd = static_cast<double>(n);

    CLSResult r;
    r.n = n;
    r.rho_hat = kNaN;
    r.delta_hat = kNaN;
    r.obeta_hat = Vec2{{kNaN, kNaN}};
    if (n < 2) throw Error(Errc::EstimatorUndefined, "need at least two observations");

    const LsqSums su = accumulate(uv.U);
    const LsqSums sv = accumulate(uv.V);
    r.H = nondegenerate(su, nd);
    r.Htilde = nondegenerate(sv, nd);
    if (!r.H)
        throw Error(Errc::EstimatorUndefined,
                    r.Htilde ? "H failed" : "H and Htilde failed");

    r.rho_hat = slope(su, nd);
    if (!r.Htilde) return r;
    r.delta_hat = slope(sv, nd);

    // obeta = mean(X_k) - (1/2n) sum [[U,V],[U,-V]] (rho, delta)'
    KahanSum sx0, sx1;
    for (long k = 1; k <= n; ++k) {
        sx0.add(path.states[k][0]);
        sx1.add(path.states[k][1]);
    }
    const double pu = su.lag * r.rho_hat / (2.0 * nd);
    const double pv = sv.lag * r.delta_hat / (2.0 * nd);
    r.obeta_hat = Vec2{{sx0.value() / nd - pu - pv, sx1.value() / nd - pu + pv}};
    return r;
}

TransformedEstimates transform_estimates(const CLSResult& r) {
    if (!r.H || !r.Htilde)
        throw Error(Errc::EstimatorUndefined,
                    !r.H ? (!r.Htilde ? "H and Htilde failed" : "H failed") : "Htilde failed");
    if (!(r.rho_hat > 0.0) || !(r.delta_hat > 0.0))
        throw Error(Errc::NonPositiveEstimate,
                    "transform needs rho_hat > 0 and delta_hat > 0");
    const NaturalParams nat = h_inverse(r.rho_hat, r.delta_hat, r.obeta_hat);
    return {std::log(r.rho_hat), nat.gamma, nat.kappa, nat.tbeta};
}

std::vector<Vec2> residuals_M(const SkeletonPath& path, const DerivedParams& derived) {
    const Mat2 flow = expm_tb(derived, 1.0);
    std::vector<Vec2> m;
    m.reserve(path.states.size() - 1);
    for (size_t k = 1; k < path.states.size(); ++k)
        m.push_back(path.states[k] - flow * path.states[k - 1] - derived.obeta);
    return m;
}

}  // namespace cbi
