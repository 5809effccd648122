#include "cbi/expint.hpp"

#include <cmath>

namespace cbi {

double unit_exp_integral(double w) {
    if (std::fabs(w) < 1e-8) return 1.0 + 0.5 * w;
    return std::expm1(w) / w;
}

double unit_pow_integral(double x) { return unit_exp_integral(std::log(x)); }

double cross_pow_integral(double x, double y) {
    return x * unit_exp_integral(std::log(y) - std::log(x));
}

double unit_poly_exp_integral(int m, double w) {
    if (m == 0) return unit_exp_integral(w);
    // Two one-signed series; which one depends on the sign of w, so that no
    // cancellation occurs for large |w|.
    if (w >= 0.0) {
        // m! sum_k w^k / (k+m+1)!, leading term m!/(m+1)! = 1/(m+1)
        double term = 1.0 / (m + 1.0);
        double sum = term;
        for (int k = 1; k < 400; ++k) {
            term *= w / (k + m + 1.0);
            sum += term;
            if (term < 1e-18 * sum) break;
        }
        return sum;
    }
    // int_0^1 t^m exp(w(1-t)) dt = e^w sum_k (-w)^k / (k! (m+k+1))
    const double x = -w;
    double term = 1.0;  // x^k / k!
    double sum = 1.0 / (m + 1.0);
    for (int k = 1; k < 400; ++k) {
        term *= x / k;
        const double add = term / (m + k + 1.0);
        sum += add;
        if (add < 1e-18 * sum) break;
    }
    return std::exp(w) * sum;
}

double ramp_exp_integral(double a, double w) {
    if (std::fabs(a) >= 0.25) {
        return (std::exp(a) * unit_exp_integral(w - a) - unit_exp_integral(w)) / a;
    }
    // sum_{m>=1} a^(m-1)/m! int_0^1 (1-u)^m e^(wu) du
    double coef = 1.0;  // a^(m-1)/m! at m = 1
    double sum = 0.0;
    for (int m = 1; m <= 18; ++m) {
        const double add = coef * unit_poly_exp_integral(m, w);
        sum += add;
        coef *= a / (m + 1.0);
        if (std::fabs(coef) < 1e-18) break;
    }
    return sum;
}

}  // namespace cbi
