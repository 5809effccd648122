#include "cbi/model.hpp"

#include <cmath>

#include "cbi/expint.hpp"

namespace cbi {

double JumpMeasure::total_mass() const {
    double m = 0.0;
    for (const auto& a : atoms) m += a.weight;
    return m;
}

Vec2 JumpMeasure::first_moment() const {
    Vec2 s;
    for (const auto& a : atoms) s += a.weight * a.z;
    return s;
}

void JumpMeasure::validate() const {
    for (const auto& a : atoms) {
        if (!(a.weight > 0.0))
            throw Error(Errc::InvalidMeasureAtom, "atom weight must be positive");
        if (a.z[0] < 0.0 || a.z[1] < 0.0)
            throw Error(Errc::InvalidMeasureAtom, "atom must lie in the nonnegative quadrant");
        if (a.z[0] == 0.0 && a.z[1] == 0.0)
            throw Error(Errc::InvalidMeasureAtom, "atom at the origin is not allowed");
    }
}

void ModelParams::validate() const {
    if (c[0] < 0.0 || c[1] < 0.0)
        throw Error(Errc::TypeError, "diffusion coefficients must be nonnegative");
    if (beta[0] < 0.0 || beta[1] < 0.0)
        throw Error(Errc::TypeError, "immigration drift must be nonnegative");
    if (B(0, 1) < 0.0 || B(1, 0) < 0.0)
        throw Error(Errc::TypeError, "B must have nonnegative off-diagonal entries");
    nu.validate();
    mu1.validate();
    mu2.validate();
}

const char* criticality_name(Criticality c) {
    switch (c) {
        case Criticality::Subcritical: return "subcritical";
        case Criticality::Critical: return "critical";
        case Criticality::Supercritical: return "supercritical";
    }
    return "?";
}

namespace {

// b~_{ij} = b_{ij} + int (z_i - 1{i==j})^+ mu_j(dz), exact over atoms.
Mat2 mean_matrix(const ModelParams& p) {
    Mat2 tB = p.B;
    for (int j = 0; j < 2; ++j) {
        for (const auto& a : p.mu(j).atoms) {
            for (int i = 0; i < 2; ++i) {
                const double excess = a.z[i] - (i == j ? 1.0 : 0.0);
                if (excess > 0.0) tB(i, j) += a.weight * excess;
            }
        }
    }
    return tB;
}

}  // namespace

DerivedParams build_derived(const ModelParams& params) {
    params.validate();

    DerivedParams d;
    d.tB = mean_matrix(params);

    constexpr double kSymTol = 1e-12;
    if (std::fabs(d.tB(0, 0) - d.tB(1, 1)) > kSymTol ||
        std::fabs(d.tB(0, 1) - d.tB(1, 0)) > kSymTol)
        throw Error(Errc::NotDoublySymmetric,
                    "mean matrix must have equal diagonal and equal off-diagonal entries");

    d.gamma = 0.5 * (d.tB(0, 0) + d.tB(1, 1));
    d.kappa = 0.5 * (d.tB(0, 1) + d.tB(1, 0));
    if (!(d.kappa > 0.0))
        throw Error(Errc::NotIrreducible, "off-diagonal rate kappa must be positive");

    d.s = d.gamma + d.kappa;
    d.rho = std::exp(d.gamma + d.kappa);
    d.delta = std::exp(d.gamma - d.kappa);
    d.trho = unit_exp_integral(d.gamma + d.kappa);
    d.tdelta = unit_exp_integral(d.gamma - d.kappa);
    d.tbeta = params.beta + params.nu.first_moment();

    // obeta = (trho/2) u u' tbeta + (tdelta/2) v v' tbeta
    d.obeta = (0.5 * d.trho * dot(kU, d.tbeta)) * kU +
              (0.5 * d.tdelta * dot(kV, d.tbeta)) * kV;
    return d;
}

Mat2 expm_tb(const DerivedParams& d, double t) {
    const double a = 0.5 * std::exp(t * (d.gamma + d.kappa));
    const double b = 0.5 * std::exp(t * (d.gamma - d.kappa));
    return Mat2{{{a + b, a - b}, {a - b, a + b}}};
}

Criticality classify(const DerivedParams& d) {
    bool ignored;
    return classify_with_warning(d, &ignored);
}

Criticality classify_with_warning(const DerivedParams& d, bool* near_boundary) {
    if (!(d.kappa > 0.0))
        throw Error(Errc::NotIrreducible, "classification requires kappa > 0");
    constexpr double kTol = 1e-12;
    *near_boundary = std::fabs(d.s) > kTol && std::fabs(d.s) < 1e-6;
    if (d.s < -kTol) return Criticality::Subcritical;
    if (d.s > kTol) return Criticality::Supercritical;
    return Criticality::Critical;
}

TransformedParams h_forward(double gamma, double kappa, Vec2 tbeta) {
    TransformedParams t;
    t.rho = std::exp(gamma + kappa);
    t.delta = std::exp(gamma - kappa);
    const double trho = unit_exp_integral(gamma + kappa);
    const double tdelta = unit_exp_integral(gamma - kappa);
    t.obeta = (0.5 * trho * dot(kU, tbeta)) * kU + (0.5 * tdelta * dot(kV, tbeta)) * kV;
    return t;
}

NaturalParams h_inverse(double rho, double delta, Vec2 obeta) {
    if (!(rho > 0.0) || !(delta > 0.0))
        throw Error(Errc::NonPositiveEigenvalue, "h_inverse needs rho > 0 and delta > 0");
    NaturalParams n;
    n.gamma = 0.5 * std::log(rho * delta);
    n.kappa = 0.5 * std::log(rho / delta);
    const double trho = unit_pow_integral(rho);
    const double tdelta = unit_pow_integral(delta);
    n.tbeta = (0.5 / trho * dot(kU, obeta)) * kU + (0.5 / tdelta * dot(kV, obeta)) * kV;
    return n;
}

}  // namespace cbi
