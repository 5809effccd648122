#pragma once

#include <vector>

#include "cbi/errors.hpp"
#include "cbi/linalg.hpp"

namespace cbi {

/// Left/right eigenvectors of the doubly symmetric mean matrix: u and v are
/// left eigenvectors for the eigenvalues exp(gamma+kappa) and
/// exp(gamma-kappa) of exp(B~), utilde the normalized right Perron vector.
inline constexpr Vec2 kU{{1.0, 1.0}};
inline constexpr Vec2 kV{{1.0, -1.0}};
inline constexpr Vec2 kUtilde{{0.5, 0.5}};

/// Finite discrete measure on R_+^2 \ {0}: a list of weighted atoms.
/// All measure integrals in the library are exact sums over the atoms.
struct JumpMeasure {
    struct Atom {
        Vec2 z;
        double weight;
    };

    std::vector<Atom> atoms;

    bool empty() const { return atoms.empty(); }
    double total_mass() const;
    Vec2 first_moment() const;  // int z m(dz)

    /// Throws InvalidMeasureAtom on a zero atom, a negative coordinate, or a
    /// nonpositive weight.
    void validate() const;
};

struct ModelParams {
    Vec2 c;      // diffusion coefficients, componentwise >= 0
    Vec2 beta;   // immigration drift, componentwise >= 0
    Mat2 B;      // branching drift matrix, nonnegative off-diagonal entries
    JumpMeasure nu;   // immigration jump measure
    JumpMeasure mu1;  // branching jump measure of type 1
    JumpMeasure mu2;  // branching jump measure of type 2

    const JumpMeasure& mu(int j) const { return j == 0 ? mu1 : mu2; }
    bool pure_immigration() const {
        return c[0] == 0.0 && c[1] == 0.0 && mu1.empty() && mu2.empty();
    }

    void validate() const;
};

enum class Criticality { Subcritical, Critical, Supercritical };

const char* criticality_name(Criticality c);

/// Quantities derived from a doubly symmetric admissible parameter set.
struct DerivedParams {
    Mat2 tB;             // mean matrix B~ = [[gamma, kappa], [kappa, gamma]]
    double gamma = 0.0;  // diagonal of B~
    double kappa = 0.0;  // off-diagonal of B~, > 0 (irreducible)
    double s = 0.0;      // criticality parameter gamma + kappa
    double rho = 1.0;    // exp(gamma + kappa)
    double delta = 1.0;  // exp(gamma - kappa)
    double trho = 1.0;   // int_0^1 rho^t dt
    double tdelta = 1.0;  // int_0^1 delta^t dt
    Vec2 tbeta;          // immigration mean vector beta + int z nu(dz)
    Vec2 obeta;          // one-step mean from zero, (int_0^1 e^{tB~} dt) tbeta
};

/// Assembles DerivedParams, enforcing double symmetry of B~ (within 1e-12
/// entrywise) and irreducibility (kappa > 0).
DerivedParams build_derived(const ModelParams& params);

/// e^{tB~} by the Putzer spectral formula:
/// (rho^t/2) [[1,1],[1,1]] + (delta^t/2) [[1,-1],[-1,1]].
Mat2 expm_tb(const DerivedParams& d, double t);

/// Sign of the criticality parameter at tolerance 1e-12. Values with
/// 1e-12 < |s| < 1e-6 classify normally but sit close to the boundary;
/// classify_with_warning reports that case.
Criticality classify(const DerivedParams& d);
Criticality classify_with_warning(const DerivedParams& d, bool* near_boundary);

struct TransformedParams {
    double rho;
    double delta;
    Vec2 obeta;
};

struct NaturalParams {
    double gamma;
    double kappa;
    Vec2 tbeta;
};

/// (gamma, kappa, tbeta) -> (rho, delta, obeta); bijective.
TransformedParams h_forward(double gamma, double kappa, Vec2 tbeta);

/// Inverse of h_forward; requires rho > 0 and delta > 0.
NaturalParams h_inverse(double rho, double delta, Vec2 obeta);

}  // namespace cbi
