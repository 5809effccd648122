#include "commands.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>

#include "cbi/asymptotics.hpp"
#include "cbi/csv.hpp"
#include "cbi/estimate.hpp"
#include "cbi/mechanisms.hpp"
#include "cbi/moments.hpp"
#include "cbi/simulate.hpp"
#include "cbi/stats.hpp"
#include "config.hpp"

namespace cbi::cli {

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_path;
    std::optional<long> n;
    std::optional<long> reps;
    std::optional<long> seed;
    std::optional<double> h;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool config_required = true) {
    cmd->set_help_flag("--help", "print help");  // frees -h/--h for the step override
    auto* c = cmd->add_option("--config", o.config_path, "experiment config file");
    if (config_required) c->required();
    cmd->add_option("--out", o.out_path, "output file (default: config 'output' key)");
    cmd->add_option("--n", o.n, "override sample size n");
    cmd->add_option("--reps", o.reps, "override replication count");
    cmd->add_option("--seed", o.seed, "override RNG seed");
    cmd->add_option("--h", o.h, "override Euler substep");
}

ExperimentConfig resolve(const CommonOpts& o) {
    ExperimentConfig cfg = load_config(o.config_path);
    if (o.n) cfg.n = *o.n;
    if (o.reps) cfg.reps = *o.reps;
    if (o.seed) cfg.seed = static_cast<std::uint64_t>(*o.seed);
    if (o.h) cfg.euler_h = *o.h;
    if (!o.out_path.empty()) cfg.output = o.out_path;
    return cfg;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream f(path, std::ios::binary);  // LF endings regardless of platform
    if (!f) throw Error(Errc::IoError, "cannot open output file '" + path + "'");
    return f;
}

DerivedParams derive_checked(const ModelParams& model) {
    const DerivedParams d = build_derived(model);
    bool near = false;
    classify_with_warning(d, &near);
    if (near)
        std::cerr << "warning: |s| = " << std::fabs(d.s)
                  << " is between 1e-12 and 1e-6; classification may be unstable\n";
    return d;
}

void require_output(const ExperimentConfig& cfg) {
    if (cfg.output.empty())
        throw Error(Errc::MissingKey, "this command needs --out or an 'output' config key");
}

void cmd_simulate(const CommonOpts& o) {
    const ExperimentConfig cfg = resolve(o);
    require_output(cfg);
    const DerivedParams derived = derive_checked(cfg.model);
    const SkeletonPath path =
        cfg.model.pure_immigration()
            ? simulate_exact_immigration(cfg.model, derived, cfg.n, cfg.seed)
            : simulate_euler(cfg.model, derived, static_cast<double>(cfg.n), cfg.euler_h,
                             cfg.seed);
    auto out = open_output(cfg.output);
    write_path_csv(out, path);
    std::cout << "simulate: n=" << path.n << " scheme="
              << (path.scheme == Scheme::ExactImmigration ? "exact-immigration" : "euler")
              << " seed=" << cfg.seed << " clamped_substeps=" << path.clamp_events << '\n'
              << "wrote " << cfg.output << '\n';
}

void cmd_estimate(const std::string& in_path, const CommonOpts& o) {
    std::ifstream in(in_path);
    if (!in) throw Error(Errc::IoError, "cannot open path CSV '" + in_path + "'");
    const SkeletonPath path = read_path_csv(in);
    const CLSResult cls = cls_estimate(path);
    if (!o.out_path.empty()) {
        auto out = open_output(o.out_path);
        write_estimate_csv(out, cls, path.seed);
        std::cout << "wrote " << o.out_path << '\n';
    } else {
        write_estimate_csv(std::cout, cls, path.seed);
    }
}

void print_mat2(std::ostream& os, const char* name, const Mat2& m) {
    os << name << ": [[" << format_double(m(0, 0)) << ", " << format_double(m(0, 1)) << "], ["
       << format_double(m(1, 0)) << ", " << format_double(m(1, 1)) << "]]\n";
}

void cmd_moments(const CommonOpts& o) {
    const ExperimentConfig cfg = resolve(o);
    const DerivedParams derived = derive_checked(cfg.model);
    const MomentKit kit = v_matrices(cfg.model, derived);
    std::ostream& os = std::cout;
    os << "gamma=" << format_double(derived.gamma) << " kappa=" << format_double(derived.kappa)
       << " s=" << format_double(derived.s) << " rho=" << format_double(derived.rho)
       << " delta=" << format_double(derived.delta) << '\n';
    print_mat2(os, "C1", kit.C1);
    print_mat2(os, "C2", kit.C2);
    print_mat2(os, "Cbar", kit.Cbar);
    print_mat2(os, "Ctilde", kit.Ctilde);
    print_mat2(os, "V1", kit.V1);
    print_mat2(os, "V2", kit.V2);
    print_mat2(os, "V0", kit.V0);
    os << "ctilde_uu=" << format_double(kit.ctilde_uu)
       << " ctilde_vv=" << format_double(kit.ctilde_vv) << '\n';
    os << "v0_uu=" << format_double(kit.v0_uu) << " v0_vv=" << format_double(kit.v0_vv)
       << " v0_uv=" << format_double(kit.v0_uv) << '\n';
    if (classify(derived) == Criticality::Critical) {
        const ScalarFunctionals fnu = scalar_functionals(cfg.model.nu);
        const double d2 = derived.delta * derived.delta;
        const double shrink = (1.0 - d2) / (2.0 * std::log(1.0 / derived.delta));
        os << "identity |<Ctilde u,u> - <Cbar u,u>| = "
           << format_double(std::fabs(kit.ctilde_uu - quad_form(kit.Cbar, kU, kU))) << '\n';
        os << "identity |<Ctilde v,v> - shrink*<Cbar v,v>| = "
           << format_double(std::fabs(kit.ctilde_vv - shrink * quad_form(kit.Cbar, kV, kV)))
           << '\n';
        if (cfg.model.pure_immigration()) {
            os << "identity |<V0 u,u> - int(z1+z2)^2 nu| = "
               << format_double(std::fabs(kit.v0_uu - fnu.s_plus)) << '\n';
            os << "identity |<V0 v,v> - shrink*int(z1-z2)^2 nu| = "
               << format_double(std::fabs(kit.v0_vv - shrink * fnu.s_minus)) << '\n';
        }
    } else {
        os << "identities: skipped (model is not critical)\n";
    }
}

void cmd_mechanisms(const CommonOpts& o) {
    const ExperimentConfig cfg = resolve(o);
    const MechanismContext ctx = MechanismContext::make(cfg.model);
    constexpr double grid[] = {0.0, 0.25, 0.5, 1.0, 2.0};
    std::cout << "lambda1,lambda2,psi,laplace_t1\n";
    int clamped = 0;
    for (double l1 : grid)
        for (double l2 : grid) {
            const Vec2 lam{{l1, l2}};
            VSolveStats stats;
            std::cout << format_double(l1) << ',' << format_double(l2) << ','
                      << format_double(psi(ctx, lam)) << ','
                      << format_double(laplace_from_zero(ctx, 1.0, lam, 1000, &stats)) << '\n';
            clamped += stats.clamp_events;
        }
    if (clamped > 0)
        std::cerr << "warning: " << clamped
                  << " ODE steps undershot zero and were clamped\n";
}

void cmd_limits(const CommonOpts& o) {
    const ExperimentConfig cfg = resolve(o);
    const DerivedParams derived = derive_checked(cfg.model);
    const MomentKit kit = v_matrices(cfg.model, derived);
    const LimitLaw law = theoretical_law(cfg.model, derived, kit);
    for (const auto& w : law.warnings) std::cerr << "warning: " << w << '\n';
    write_limit_law_csv(std::cout, law);
}

void cmd_montecarlo(const CommonOpts& o) {
    const ExperimentConfig cfg = resolve(o);
    require_output(cfg);
    MCOptions mo;
    mo.n = cfg.n;
    mo.reps = cfg.reps;
    mo.seed = cfg.seed;
    mo.euler_h = cfg.euler_h;
    mo.limit_h = cfg.limit_h;
    const MCSummary summary = run_monte_carlo(cfg.model, mo);
    auto out = open_output(cfg.output);
    write_mc_replications_csv(out, summary);
    write_mc_summary(std::cout, summary);
}

void cmd_lln(const CommonOpts& o) {
    const ExperimentConfig cfg = resolve(o);
    const DerivedParams derived = derive_checked(cfg.model);
    const MomentKit kit = v_matrices(cfg.model, derived);
    const SkeletonPath path =
        cfg.model.pure_immigration()
            ? simulate_exact_immigration(cfg.model, derived, cfg.n, cfg.seed)
            : simulate_euler(cfg.model, derived, static_cast<double>(cfg.n), cfg.euler_h,
                             cfg.seed);
    const LLNDeviations dev = lln_checks(path, derived, kit);
    auto show = [](const char* name, const std::optional<double>& v) {
        std::cout << name << ','
                  << (v ? format_double(*v) : std::string("not-applicable")) << '\n';
    };
    std::cout << "deviation,value\n";
    std::cout << "main_vv," << format_double(dev.main_vv) << '\n';
    show("main_vt", dev.main_vt);
    show("main_vvt", dev.main_vvt);
    show("main1_u", dev.main1_u);
    show("main1_uu", dev.main1_uu);
    show("main_uvt", dev.main_uvt);
}

}  // namespace

int run_command(int argc, const char* const* argv) {
    CLI::App app{"2-type critical branching-with-immigration: simulation, CLS estimation, "
                 "limit-law checks"};
    app.set_help_flag("--help", "print help");
    app.require_subcommand(1);

    CommonOpts o_sim, o_est, o_mom, o_mech, o_lim, o_mc, o_lln;
    std::string estimate_in;

    add_common(app.add_subcommand("simulate", "sample one skeleton path, write CSV"), o_sim);
    auto* est = app.add_subcommand("estimate", "CLS estimates from a path CSV");
    est->add_option("--in", estimate_in, "input path CSV")->required();
    add_common(est, o_est, /*config_required=*/false);
    add_common(app.add_subcommand("moments", "moment matrices and identity residuals"), o_mom);
    add_common(app.add_subcommand("mechanisms", "Laplace transform table on a lambda grid"),
               o_mech);
    add_common(app.add_subcommand("limits", "theoretical limit-law dump"), o_lim);
    add_common(app.add_subcommand("montecarlo", "Monte-Carlo limit-theorem check"), o_mc);
    add_common(app.add_subcommand("lln", "law-of-large-numbers deviations on one path"), o_lln);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand("simulate")) cmd_simulate(o_sim);
        else if (app.got_subcommand("estimate")) cmd_estimate(estimate_in, o_est);
        else if (app.got_subcommand("moments")) cmd_moments(o_mom);
        else if (app.got_subcommand("mechanisms")) cmd_mechanisms(o_mech);
        else if (app.got_subcommand("limits")) cmd_limits(o_lim);
        else if (app.got_subcommand("montecarlo")) cmd_montecarlo(o_mc);
        else if (app.got_subcommand("lln")) cmd_lln(o_lln);
    } catch (const Error& e) {
        std::cerr << e.what() << '\n';
        return errc_is_validation(e.code()) ? 1 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

}  // namespace cbi::cli
