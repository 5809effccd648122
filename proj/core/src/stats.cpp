#include "cbi/stats.hpp"

#include <algorithm>
#include <cmath>

namespace cbi {

double mean_of(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

double variance_of(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    const double m = mean_of(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return s / (static_cast<double>(xs.size()) - 1.0);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double ks_statistic_normal(std::vector<double> xs, double sigma) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        const double f = normal_cdf(xs[i] / sigma);
        d = std::max(d, std::max(f - i / n, (i + 1.0) / n - f));
    }
    return d;
}

double ks_statistic_two_sample(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::fabs(i / na - j / nb));
    }
    return d;
}

double quantile_of(std::vector<double> xs, double p) {
    std::sort(xs.begin(), xs.end());
    if (xs.empty()) return 0.0;
    const double pos = p * (static_cast<double>(xs.size()) - 1.0);
    const size_t lo = static_cast<size_t>(pos);
    if (lo + 1 >= xs.size()) return xs.back();
    const double frac = pos - static_cast<double>(lo);
    return xs[lo] * (1.0 - frac) + xs[lo + 1] * frac;
}

std::array<double, 9> deciles_of(const std::vector<double>& xs) {
    std::array<double, 9> d{};
    for (int i = 1; i <= 9; ++i) d[i - 1] = quantile_of(xs, 0.1 * i);
    return d;
}

}  // namespace cbi
