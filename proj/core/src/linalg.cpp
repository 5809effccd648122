#include "cbi/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace cbi {

double max_abs(Mat2 a) {
    double m = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) m = std::max(m, std::fabs(a(i, j)));
    return m;
}

std::array<double, 2> sym_eigenvalues(Mat2 a) {
    const double tr = a(0, 0) + a(1, 1);
    const double diff = a(0, 0) - a(1, 1);
    const double disc = std::sqrt(diff * diff + 4.0 * a(0, 1) * a(1, 0));
    return {0.5 * (tr - disc), 0.5 * (tr + disc)};
}

Mat2 sym_sqrt_psd(Mat2 a) {
    // Diagonal shortcut keeps exact zeros exact.
    if (a(0, 1) == 0.0 && a(1, 0) == 0.0) {
        Mat2 r;
        r(0, 0) = std::sqrt(std::max(0.0, a(0, 0)));
        r(1, 1) = std::sqrt(std::max(0.0, a(1, 1)));
        return r;
    }
    const auto ev = sym_eigenvalues(a);
    const double l0 = std::max(0.0, ev[0]);
    const double l1 = std::max(0.0, ev[1]);
    // Eigenvector for ev[1]; the off-diagonal is nonzero here.
    const double b = 0.5 * (a(0, 1) + a(1, 0));
    Vec2 e1{{b, ev[1] - a(0, 0)}};
    const double n1 = std::sqrt(dot(e1, e1));
    e1 = (1.0 / n1) * e1;
    const Vec2 e0{{-e1[1], e1[0]}};
    return std::sqrt(l1) * outer(e1, e1) + std::sqrt(l0) * outer(e0, e0);
}

GaussLegendre gauss_legendre_unit(int n) {
    // Nodes from Newton iteration on P_n, standard three-term recurrence.
    GaussLegendre g;
    g.nodes.resize(n);
    g.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / pp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        g.nodes[i] = 0.5 * (1.0 - x);
        g.nodes[n - 1 - i] = 0.5 * (1.0 + x);
        g.weights[i] = 0.5 * w;
        g.weights[n - 1 - i] = 0.5 * w;
    }
    return g;
}

}  // namespace cbi
