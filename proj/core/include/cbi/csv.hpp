#pragma once

#include <iosfwd>
#include <string>

#include "cbi/asymptotics.hpp"
#include "cbi/estimate.hpp"
#include "cbi/simulate.hpp"

namespace cbi {

/// Shortest decimal form that round-trips a double exactly (%.17g).
std::string format_double(double x);

/// Skeleton paths: header `k,x1,x2`, LF line endings, one row per state.
void write_path_csv(std::ostream& os, const SkeletonPath& path);
SkeletonPath read_path_csv(std::istream& is);

/// Limit paths: header `t,y,m1,m2` (m columns written as 0 when absent).
void write_limit_path_csv(std::ostream& os, const LimitPath& path);

/// One estimate row: n, seed, H, Htilde, rho_hat, delta_hat, obeta1, obeta2,
/// s_hat, gamma_hat, kappa_hat, tbeta1, tbeta2 (nan where undefined).
void write_estimate_csv(std::ostream& os, const CLSResult& cls, std::uint64_t seed);

/// Per-replication scaled errors with flags.
void write_mc_replications_csv(std::ostream& os, const MCSummary& summary);

/// Human-readable summary block.
void write_mc_summary(std::ostream& os, const MCSummary& summary);

/// Labeled dump of every matrix and scalar in the limit law.
void write_limit_law_csv(std::ostream& os, const LimitLaw& law);

}  // namespace cbi
