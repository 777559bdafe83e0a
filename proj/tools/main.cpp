// transobs command-line front end: certify / verify / observe /
// trace-export / reconstruct over scenario config files.
//
// Exit codes: 0 all checks pass, 2 certificate infeasible,
// 3 numerical check failure, 4 config error.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "transobs/pipeline.hpp"
#include "transobs/simd.hpp"
#include "transobs/transport.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 2;
constexpr int kExitCheckFailure = 3;
constexpr int kExitConfigError = 4;

struct CommonOpts {
    std::string config;
    std::optional<int> level;
    std::vector<double> s_grid;
    std::optional<std::string> out_dir;
    int workers{1};
    bool force{false};
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_force) {
    cmd->add_option("config", opts.config, "scenario config file")->required();
    cmd->add_option("--level", opts.level, "override quadrature refinement level");
    cmd->add_option("--s-grid", opts.s_grid, "override the Carleman s grid")->delimiter(',');
    cmd->add_option("--out", opts.out_dir, "output directory (default from config)");
    cmd->add_option("--workers", opts.workers, "worker threads (results are worker-count independent)")
        ->check(CLI::PositiveNumber);
    if (with_force) cmd->add_flag("--force", opts.force, "run diagnostics on infeasible certificates");
}

transobs::Scenario load_with_overrides(const CommonOpts& opts) {
    transobs::Scenario sc = transobs::load_scenario(opts.config);
    if (opts.level) {
        if (*opts.level < 0 || *opts.level > 6)
            throw transobs::ConfigError("--level must be in 0..6");
        sc.level = *opts.level;
    }
    if (!opts.s_grid.empty()) {
        for (double s : opts.s_grid)
            if (!(s > 0.0)) throw transobs::ConfigError("--s-grid values must be positive");
        sc.s_grid = opts.s_grid;
    }
    if (opts.out_dir) sc.out_dir = *opts.out_dir;
    return sc;
}

int cmd_certify(const CommonOpts& opts) {
    using namespace transobs;
    Scenario sc = load_with_overrides(opts);
    CertifyOutcome outcome = run_certify(sc);
    std::ostringstream csv;
    write_certify_csv(csv, sc, outcome);
    write_file(sc.out_dir, "certify.csv", csv.str());
    std::string text = certify_summary(sc, outcome);
    write_file(sc.out_dir, "summary.txt", text);
    std::cout << text;
    return outcome.cert.feasible ? kExitOk : kExitInfeasible;
}

int cmd_verify(const CommonOpts& opts) {
    using namespace transobs;
    Scenario sc = load_with_overrides(opts);
    CertifyOutcome outcome = run_certify(sc);
    std::ostringstream ccsv;
    write_certify_csv(ccsv, sc, outcome);
    write_file(sc.out_dir, "certify.csv", ccsv.str());
    std::string text = certify_summary(sc, outcome);
    if (!outcome.cert.feasible && !opts.force) {
        write_file(sc.out_dir, "summary.txt", text);
        std::cout << text;
        std::cout << "certificate infeasible; use --force for a diagnostic run\n";
        return kExitInfeasible;
    }
    VerificationReport report = run_verify(sc, outcome, opts.workers, opts.force);
    std::ostringstream kcsv, ecsv;
    write_carleman_csv(kcsv, sc, report);
    write_energy_csv(ecsv, sc, report);
    write_file(sc.out_dir, "carleman.csv", kcsv.str());
    write_file(sc.out_dir, "energy.csv", ecsv.str());
    text += verify_summary(sc, report);
    write_file(sc.out_dir, "summary.txt", text);
    std::cout << text;
    if (report.diagnostic) return kExitOk;
    return report.all_pass() ? kExitOk : kExitCheckFailure;
}

int cmd_observe(const CommonOpts& opts) {
    using namespace transobs;
    Scenario sc = load_with_overrides(opts);
    CertifyOutcome outcome = run_certify(sc);
    std::ostringstream ccsv;
    write_certify_csv(ccsv, sc, outcome);
    write_file(sc.out_dir, "certify.csv", ccsv.str());
    std::string text = certify_summary(sc, outcome);
    if (!outcome.cert.feasible && !opts.force) {
        write_file(sc.out_dir, "summary.txt", text);
        std::cout << text;
        std::cout << "certificate infeasible; use --force for a diagnostic run\n";
        return kExitInfeasible;
    }
    ObservabilityReport report = run_observe(sc, outcome, opts.workers);
    std::ostringstream ocsv;
    write_observability_csv(ocsv, sc, report);
    write_file(sc.out_dir, "observability.csv", ocsv.str());
    text += observe_summary(sc, report);
    write_file(sc.out_dir, "summary.txt", text);
    std::cout << text;
    return report.anomaly ? kExitCheckFailure : kExitOk;
}

int cmd_trace_export(const CommonOpts& opts) {
    using namespace transobs;
    Scenario sc = load_with_overrides(opts);
    auto profiles = scenario_profiles(sc);
    if (profiles.empty()) throw ConfigError("trace-export: scenario has an empty ensemble");
    int n = nodes_per_axis(sc.level);
    SurfaceGrid surf = surface_grid(sc.domain, n);
    Grid1D time = gauss_grid(0.0, sc.field.horizon(), n);
    BoundaryTrace trace = boundary_trace(profiles.front(), sc.field, sc.domain, surf, time);
    std::ostringstream csv;
    export_trace_csv(csv, trace, sc.domain);
    write_file(sc.out_dir, "trace.csv", csv.str());
    std::cout << "trace for profile " << profiles.front().label() << ": " << trace.values.size()
              << " samples -> " << sc.out_dir << "/trace.csv\n";
    return kExitOk;
}

int cmd_reconstruct(const CommonOpts& opts, const std::string& at) {
    using namespace transobs;
    Scenario sc = load_with_overrides(opts);
    std::vector<double> coords;
    {
        std::istringstream ss(at);
        std::string tok;
        while (std::getline(ss, tok, ','))
            try {
                coords.push_back(std::stod(tok));
            } catch (const std::exception&) {
                throw ConfigError("--at expects comma-separated numbers, got '" + tok + "'");
            }
    }
    int d = sc.domain.dim();
    if (static_cast<int>(coords.size()) != d + 1)
        throw ConfigError("--at expects " + std::to_string(d + 1) + " numbers (x..., t)");
    Vec x = Vec::zero(d);
    for (int i = 0; i < d; ++i) x[i] = coords[i];
    double t = coords[d];

    auto profiles = scenario_profiles(sc);
    if (profiles.empty()) throw ConfigError("reconstruct: scenario has an empty ensemble");
    const SpatialProfile& u0 = profiles.front();
    TraceFunction g = closed_form_trace(u0, sc.field);
    Reconstruction r = reconstruct_from_trace(g, sc.field, sc.domain, x, t);
    double truth = evaluate_solution(u0, sc.field, x, t);
    std::cout << "profile " << u0.label() << " at x=(";
    for (int i = 0; i < d; ++i) std::cout << (i ? "," : "") << x[i];
    std::cout << "), t=" << t << "\n";
    if (!r.covered) {
        std::cout << "  uncovered: characteristic does not meet the boundary in the window\n";
        std::cout << "  direct value " << format17(truth) << "\n";
    } else {
        std::cout << "  reconstructed " << format17(r.value) << " (exit sigma=" << format17(r.sigma)
                  << ")\n";
        std::cout << "  direct value  " << format17(truth) << "\n";
        std::cout << "  abs error     " << format17(std::abs(r.value - truth)) << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"transobs: observability certificates and weighted-inequality verification for "
                 "transport equations du/dt + H(t).grad u = 0"};
    app.require_subcommand(1);

    CommonOpts certify_opts, verify_opts, observe_opts, trace_opts, rec_opts;
    std::string at;

    CLI::App* certify = app.add_subcommand("certify", "build the admissibility certificate");
    add_common(certify, certify_opts, false);
    CLI::App* verify = app.add_subcommand("verify", "verify the weighted inequalities by quadrature");
    add_common(verify, verify_opts, true);
    CLI::App* observe = app.add_subcommand("observe", "estimate the observability constant");
    add_common(observe, observe_opts, true);
    CLI::App* trace = app.add_subcommand("trace-export", "export boundary data for the first profile");
    add_common(trace, trace_opts, false);
    CLI::App* rec = app.add_subcommand("reconstruct", "reconstruct an interior value from boundary data");
    add_common(rec, rec_opts, false);
    rec->add_option("--at", at, "interior point and time: x[,y],t")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (certify->parsed()) return cmd_certify(certify_opts);
        if (verify->parsed()) return cmd_verify(verify_opts);
        if (observe->parsed()) return cmd_observe(observe_opts);
        if (trace->parsed()) return cmd_trace_export(trace_opts);
        if (rec->parsed()) return cmd_reconstruct(rec_opts, at);
    } catch (const transobs::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCheckFailure;
    }
    return kExitOk;
}
