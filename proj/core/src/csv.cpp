#include "cbi/csv.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace cbi {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_path_csv(std::ostream& os, const SkeletonPath& path) {
    os << "k,x1,x2\n";
    for (size_t k = 0; k < path.states.size(); ++k)
        os << k << ',' << format_double(path.states[k][0]) << ','
           << format_double(path.states[k][1]) << '\n';
}

SkeletonPath read_path_csv(std::istream& is) {
    SkeletonPath path;
    std::string line;
    if (!std::getline(is, line) || line.rfind("k,x1,x2", 0) != 0)
        throw Error(Errc::IoError, "path CSV must start with header k,x1,x2");
    long expected = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        long k = 0;
        double x1 = 0.0, x2 = 0.0;
        if (std::sscanf(line.c_str(), "%ld,%lf,%lf", &k, &x1, &x2) != 3)
            throw Error(Errc::IoError, "bad path CSV row: " + line);
        if (k != expected)
            throw Error(Errc::IoError, "path CSV rows must be consecutive from k = 0");
        ++expected;
        path.states.push_back(Vec2{{x1, x2}});
    }
    if (path.states.size() < 2) throw Error(Errc::IoError, "path CSV holds fewer than 2 states");
    path.n = static_cast<long>(path.states.size()) - 1;
    return path;
}

void write_limit_path_csv(std::ostream& os, const LimitPath& path) {
    os << "t,y,m1,m2\n";
    for (size_t k = 0; k < path.t.size(); ++k) {
        const Vec2 m = k < path.m.size() ? path.m[k] : Vec2{};
        os << format_double(path.t[k]) << ',' << format_double(path.y[k]) << ','
           << format_double(m[0]) << ',' << format_double(m[1]) << '\n';
    }
}

void write_estimate_csv(std::ostream& os, const CLSResult& cls, std::uint64_t seed) {
    constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
    double s_hat = kNaN, gamma_hat = kNaN, kappa_hat = kNaN;
    Vec2 tbeta_hat{{kNaN, kNaN}};
    if (cls.H && cls.rho_hat > 0.0) s_hat = std::log(cls.rho_hat);
    if (cls.H && cls.Htilde && cls.rho_hat > 0.0 && cls.delta_hat > 0.0) {
        const TransformedEstimates t = transform_estimates(cls);
        gamma_hat = t.gamma_hat;
        kappa_hat = t.kappa_hat;
        tbeta_hat = t.tbeta_hat;
    }
    os << "n,seed,H,Htilde,rho_hat,delta_hat,obeta1,obeta2,s_hat,gamma_hat,kappa_hat,"
          "tbeta1,tbeta2\n";
    os << cls.n << ',' << seed << ',' << (cls.H ? 1 : 0) << ',' << (cls.Htilde ? 1 : 0) << ','
       << format_double(cls.rho_hat) << ',' << format_double(cls.delta_hat) << ','
       << format_double(cls.obeta_hat[0]) << ',' << format_double(cls.obeta_hat[1]) << ','
       << format_double(s_hat) << ',' << format_double(gamma_hat) << ','
       << format_double(kappa_hat) << ',' << format_double(tbeta_hat[0]) << ','
       << format_double(tbeta_hat[1]) << '\n';
}

void write_mc_replications_csv(std::ostream& os, const MCSummary& s) {
    os << "rep,valid,H,Htilde";
    for (const auto& name : s.names) os << ',' << name;
    os << '\n';
    for (size_t r = 0; r < s.records.size(); ++r) {
        const RepRecord& rec = s.records[r];
        os << r << ',' << (rec.valid ? 1 : 0) << ',' << (rec.H ? 1 : 0) << ','
           << (rec.Htilde ? 1 : 0);
        for (double x : s.scaled[r]) os << ',' << format_double(x);
        os << '\n';
    }
}

namespace {

void write_labeled_matrix(std::ostream& os, const std::string& name,
                          const std::vector<std::string>& labels,
                          const std::vector<std::vector<double>>& m) {
    os << "matrix," << name << '\n';
    for (const auto& l : labels) os << ',' << l;
    os << '\n';
    for (size_t i = 0; i < m.size(); ++i) {
        os << labels[i];
        for (double x : m[i]) os << ',' << format_double(x);
        os << '\n';
    }
}

std::vector<std::vector<double>> to_rows(const Mat4& m) {
    std::vector<std::vector<double>> rows(4, std::vector<double>(4));
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) rows[i][j] = m[i][j];
    return rows;
}

}  // namespace

void write_mc_summary(std::ostream& os, const MCSummary& s) {
    os << "regime: " << regime_name(s.regime) << '\n';
    os << "n: " << s.n << "  reps: " << s.reps << '\n';
    os << "h_fraction: " << format_double(s.h_fraction)
       << "  htilde_fraction: " << format_double(s.htilde_fraction)
       << "  invalid_fraction: " << format_double(s.invalid_fraction) << '\n';
    os << "coordinates:";
    for (const auto& n : s.names) os << ' ' << n;
    os << '\n';
    write_labeled_matrix(os, "empirical_cov", s.names, s.empirical_cov);
    write_labeled_matrix(os, "theoretical_cov", s.names, s.theoretical_cov);
    write_labeled_matrix(os, "cov_ratio", s.names, s.cov_ratio);
    for (const auto& [name, d] : s.ks_stats)
        os << "ks," << name << ',' << format_double(d) << '\n';
    if (s.regime != Regime::PureImmigrationNormal) {
        os << "ks_two_sample," << format_double(s.ks_two_sample) << '\n';
        os << "deciles_empirical";
        for (double d : s.deciles_empirical) os << ',' << format_double(d);
        os << "\ndeciles_reference";
        for (double d : s.deciles_reference) os << ',' << format_double(d);
        os << "\niqr_reference," << format_double(s.iqr_reference) << '\n';
    }
}

void write_limit_law_csv(std::ostream& os, const LimitLaw& law) {
    os << "regime," << regime_name(law.regime) << '\n';
    os << "sigma2_s," << (law.sigma2_s ? format_double(*law.sigma2_s) : "absent") << '\n';
    os << "Mconst," << (law.Mconst ? format_double(*law.Mconst) : "absent") << '\n';
    os << "lln_vv_coeff," << format_double(law.lln.vv_coeff) << '\n';
    os << "lln_v_mean," << format_double(law.lln.v_mean) << '\n';
    os << "lln_v_square," << format_double(law.lln.v_square) << '\n';
    os << "lln_u_mean," << format_double(law.lln.u_mean) << '\n';
    os << "lln_u_square," << format_double(law.lln.u_square) << '\n';
    os << "lln_uv_cross," << format_double(law.lln.uv_cross) << '\n';
    const std::vector<std::string> rdb = {"n32_rho", "sqn_delta", "sqn_obeta1", "sqn_obeta2"};
    const std::vector<std::string> gk = {"sqn_gamma", "sqn_kappa", "sqn_tbeta1", "sqn_tbeta2"};
    const std::vector<std::string> mart = {"sum_uM", "sum_uM_U", "sum_vM", "sum_vM_V"};
    if (law.R) write_labeled_matrix(os, "R", gk, to_rows(*law.R));
    if (law.S) write_labeled_matrix(os, "S", rdb, to_rows(*law.S));
    if (law.Sigma) write_labeled_matrix(os, "Sigma", mart, to_rows(*law.Sigma));
    for (const auto& w : law.warnings) os << "warning," << w << '\n';
}

}  // namespace cbi
