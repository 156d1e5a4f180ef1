// riesz-ep command-line front end.
// Exit codes: 0 success / all checks pass, 1 a check failed, 2 usage or config error.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>

#include "riesz_ep/config.hpp"
#include "riesz_ep/harness.hpp"
#include "riesz_ep/mollify.hpp"
#include "riesz_ep/reporting.hpp"
#include "riesz_ep/riesz.hpp"
#include "riesz_ep/solver.hpp"

namespace fs = std::filesystem;
using namespace riesz_ep;

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;

/// Input problems the user can fix by changing arguments; mapped to exit 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

fs::path run_dir_of(const fs::path& file) {
    const fs::path parent = file.parent_path();
    return parent.empty() ? fs::path(".") : parent;
}

std::string relative_name(const fs::path& file, const fs::path& dir) {
    return fs::relative(fs::absolute(file), fs::absolute(dir)).generic_string();
}

std::string command_line(int argc, char** argv) {
    std::string out;
    for (int i = 0; i < argc; ++i) out += (i ? " " : "") + std::string(argv[i]);
    return out;
}

GridFunction load_input(const fs::path& p) {
    if (!fs::exists(p)) throw UsageError("input grid " + p.string() + " does not exist");
    try {
        return read_grid(p);
    } catch (const std::exception& e) {
        throw UsageError(std::string("cannot load ") + p.string() + ": " + e.what());
    }
}

void print_cases(const InequalityReport& rep, const std::string& prefix, bool verbose) {
    for (const auto& c : rep.cases)
        if (verbose || !c.pass)
            std::printf("  %s %s%s  lhs=%.6g rhs=%.6g\n", c.pass ? "pass" : "FAIL", prefix.c_str(), c.name.c_str(),
                        c.lhs, c.rhs);
}

// --- riesz -------------------------------------------------------------------------------------

struct RieszArgs {
    double alpha = 2.0;
    std::string input, output, method = "fast";
};

int cmd_riesz(const RieszArgs& a, const std::string& cmd) {
    const auto t0 = std::chrono::steady_clock::now();
    const GridFunction f = load_input(a.input);
    GridFunction out;
    try {
        out = a.method == "direct" ? riesz_apply_direct(f, a.alpha) : riesz_apply_fast(f, a.alpha);
    } catch (const std::domain_error& e) {
        throw ConfigError(e.what());
    }
    write_grid(a.output, out);
    const fs::path dir = run_dir_of(a.output);
    RunManifest m;
    m.command = cmd;
    m.config = "alpha = " + std::to_string(a.alpha) + "\nmethod = \"" + a.method + "\"\n";
    m.timings["riesz"] = seconds_since(t0);
    if (fs::absolute(run_dir_of(a.input)) == fs::absolute(dir)) m.hashes[relative_name(a.input, dir)] = sha256_file(a.input);
    write_manifest(dir, m, {relative_name(a.output, dir)});
    std::printf("wrote %s (n=%d, d=%d, max %.6g)\n", a.output.c_str(), out.spec().n, out.spec().d, out.max());
    return kOk;
}

// --- hls-test ----------------------------------------------------------------------------------

struct HlsArgs {
    int d = 3;
    double alpha = 1.0;
    double p = 1.2;
    HlsOptions options;
    std::string report = "hls.json";
};

int cmd_hls(const HlsArgs& a, const std::string& cmd) {
    const auto t0 = std::chrono::steady_clock::now();
    InequalityReport rep = check_hls_family(a.d, a.alpha, a.p, a.options);
    write_json(a.report, report_json(rep));
    const fs::path dir = run_dir_of(a.report);
    RunManifest m;
    m.command = cmd;
    std::ostringstream cfg;
    cfg << "d = " << a.d << "\nalpha = " << a.alpha << "\np = " << a.p << "\ntrials = " << a.options.trials
        << "\nn = " << a.options.n << "\nL = " << a.options.half_width << "\nseed = " << a.options.seed << '\n';
    m.config = cfg.str();
    m.seed = a.options.seed;
    m.timings["hls"] = seconds_since(t0);
    write_manifest(dir, m, {relative_name(a.report, dir)});
    print_cases(rep, "", false);
    std::printf("hls-test alpha=%g p=%g: %zu cases, empirical constant %.6g -> %s\n", a.alpha, a.p, rep.cases.size(),
                rep.empirical_constant, rep.pass ? "pass" : "FAIL");
    return rep.pass ? kOk : kCheckFailed;
}

// --- simulate ----------------------------------------------------------------------------------

struct SimulateArgs {
    std::string config;
    std::string out;
};

void dump_states(const Trajectory& run, const fs::path& dir, const std::string& tag, std::vector<std::string>& files) {
    for (std::size_t k = 0; k < run.states.size(); ++k) {
        char stem[64];
        std::snprintf(stem, sizeof stem, "%sstate_%04zu", tag.c_str(), k);
        const FluidState& s = run.states[k];
        write_grid(dir / (std::string(stem) + "_rho.bin"), s.rho);
        files.push_back(std::string(stem) + "_rho.bin");
        for (int a = 0; a < s.m.dim(); ++a) {
            const std::string name = std::string(stem) + "_m" + std::to_string(a) + ".bin";
            write_grid(dir / name, s.m[a]);
            files.push_back(name);
        }
    }
}

int cmd_simulate(const SimulateArgs& a, const std::string& cmd) {
    const auto t0 = std::chrono::steady_clock::now();
    VerifyConfig vc;
    if (!a.config.empty()) vc.scenario = load_scenario_config(a.config);
    const ScenarioConfig& cfg = vc.scenario;
    for (const auto& w : cfg.validate()) std::fprintf(stderr, "warning: %s\n", w.c_str());
    const fs::path dir = a.out;
    fs::create_directories(dir);
    std::vector<std::string> files;

    Trajectory run;
    std::optional<Trajectory> ref;
    std::optional<double> c_ap;
    if (cfg.role == Role::reference) {
        run = make_reference(cfg);
    } else {
        ScenarioConfig rc = cfg;
        rc.role = Role::reference;
        rc.perturbation = Perturbation::none;
        rc.delta = 0.0;
        rc.validate();
        ref = make_reference(rc);
        if (!ref->completed()) throw std::runtime_error("reference run aborted: " + *ref->abort_reason);
        run = make_weak(cfg, *ref);
        if (run.completed()) {
            const RelativeEnergyReport re = relative_energy_inequality(run, *ref, 0.0);
            for (std::size_t k = 0; k < run.ledger.size(); ++k) {
                run.ledger[k].psi = re.psi[k];
                run.ledger[k].j1 = re.j1[k];
                run.ledger[k].j2 = re.j2[k];
                run.ledger[k].j3 = re.j3[k];
            }
            if (re.psi.front() > 0.0) c_ap = gronwall_check(re, cfg.law).c_ap;
        }
        write_text(dir / "reference_ledger.csv", ledger_csv(ref->ledger));
        files.push_back("reference_ledger.csv");
    }
    write_text(dir / "ledger.csv", ledger_csv(run.ledger));
    files.push_back("ledger.csv");
    dump_states(run, dir, "", files);
    write_json(dir / "summary.json", simulation_summary(run, c_ap));
    files.push_back("summary.json");

    RunManifest m;
    m.command = cmd;
    m.config = render_config(vc);
    m.seed = cfg.seed;
    m.timings["simulate"] = seconds_since(t0);
    write_manifest(dir, m, files);
    const auto& first = run.ledger.front();
    const auto& last = run.ledger.back();
    std::printf("simulate %s n=%d: t=%.4g, %zu steps, energy drift %.3e%s\n", to_string(cfg.role).c_str(), cfg.grid.n,
                last.t, run.dts.size(), (last.total - first.total) / first.total,
                run.completed() ? "" : (" ABORTED: " + *run.abort_reason).c_str());
    return run.completed() ? kOk : kCheckFailed;
}

// --- verify ------------------------------------------------------------------------------------

struct VerifyArgs {
    std::string suite = "all";
    std::string config;
    std::string out = "report.json";
    bool verbose = false;
};

int cmd_verify(const VerifyArgs& a, const std::string& cmd) {
    VerifyConfig vc;
    if (!a.config.empty()) vc = load_verify_config(a.config);
    for (const auto& w : validate(vc)) std::fprintf(stderr, "warning: %s\n", w.c_str());
    std::vector<std::string> suites;
    if (a.suite == "all") {
        suites = suite_names();
    } else {
        const auto& names = suite_names();
        if (std::find(names.begin(), names.end(), a.suite) == names.end())
            throw ConfigError("unknown suite '" + a.suite + "'");
        suites = {a.suite};
    }
    RunManifest m;
    m.command = cmd;
    m.config = render_config(vc);
    m.seed = vc.scenario.seed;
    TrajectoryCache cache;
    std::vector<InequalityReport> reports;
    bool pass = true;
    const auto total = std::chrono::steady_clock::now();
    for (const auto& s : suites) {
        const auto t0 = std::chrono::steady_clock::now();
        reports.push_back(run_suite(s, vc, cache));
        m.timings[s] = seconds_since(t0);
        const auto& rep = reports.back();
        pass = pass && rep.pass;
        std::printf("%-14s %s  (%zu cases, %.1f s)\n", s.c_str(), rep.pass ? "pass" : "FAIL", rep.cases.size(),
                    m.timings[s]);
        print_cases(rep, s + "/", a.verbose);
        std::fflush(stdout);
    }
    m.timings["total"] = seconds_since(total);
    const Json doc = suites.size() == 1 ? report_json(reports.front()) : combined_report_json(a.suite, reports);
    write_json(a.out, doc);
    const fs::path dir = run_dir_of(a.out);
    const RunManifest written = write_manifest(dir, m, {relative_name(a.out, dir)});
    std::printf("verify %s: %s  report %s  sha256 %s\n", a.suite.c_str(), pass ? "pass" : "FAIL", a.out.c_str(),
                written.hashes.at(relative_name(a.out, dir)).c_str());
    return pass ? kOk : kCheckFailed;
}

// --- mollify -----------------------------------------------------------------------------------

struct MollifyArgs {
    std::string input, output, report = "mollify.json";
    double gamma = 2.0;
    double epsilon = 0.05;
};

int cmd_mollify(const MollifyArgs& a, const std::string& cmd) {
    const auto t0 = std::chrono::steady_clock::now();
    const GridFunction f = load_input(a.input);
    if (!(a.gamma > 1.0)) throw ConfigError("gamma must exceed 1");
    if (!(a.epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    const MollifyResult res = mollify_ladder(f, a.gamma, a.epsilon);
    const fs::path dir = run_dir_of(a.report);
    std::vector<std::string> files;
    Json rep = mollify_report(res, a.gamma, a.epsilon, integrate(f));
    if (res.attained) {
        write_grid(a.output, res.phi);
        files.push_back(relative_name(a.output, dir));
    } else {
        rep["error"] = "epsilon unattainable on this grid: it would need delta < 2h = " +
                       std::to_string(2.0 * f.spec().spacing()) + "; refine the grid";
    }
    write_json(a.report, rep);
    files.push_back(relative_name(a.report, dir));
    RunManifest m;
    m.command = cmd;
    m.config = "gamma = " + std::to_string(a.gamma) + "\nepsilon = " + std::to_string(a.epsilon) + "\n";
    m.timings["mollify"] = seconds_since(t0);
    write_manifest(dir, m, files);
    for (const auto& s : res.ladder)
        std::printf("  delta=%.5f  L1=%.5f  Lgamma=%.5f  combined=%.5f\n", s.delta, s.l1, s.lgamma, s.combined());
    if (!res.attained) {
        std::fprintf(stderr,
                     "error: epsilon = %g is unattainable on this grid; best combined error %.5f at delta = %.5f, "
                     "smaller delta would go below 2h = %.5f. Refine the grid.\n",
                     a.epsilon, res.combined(), res.delta, 2.0 * f.spec().spacing());
        return kCheckFailed;
    }
    std::printf("mollify: combined error %.5f < %g at delta = %.5f\n", res.combined(), a.epsilon, res.delta);
    return kOk;
}

// --- report ------------------------------------------------------------------------------------

int cmd_report(const std::string& run_dir) {
    if (!fs::is_directory(run_dir)) throw UsageError("run directory " + run_dir + " does not exist");
    RenderResult r;
    try {
        r = report_render(run_dir);
    } catch (const std::runtime_error& e) {
        throw UsageError(e.what());
    }
    const auto stale = verify_manifest(run_dir);
    for (const auto& s : stale) std::fprintf(stderr, "warning: artifact %s does not match its manifest hash\n", s.c_str());
    std::printf("wrote %s and %s (%zu rows)\n", r.json_path.string().c_str(), r.csv_path.string().c_str(), r.rows);
    return stale.empty() ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"riesz-ep: Euler-Poisson with Riesz-potential electrostatics, relative-energy verification", "riesz-ep"};
    app.require_subcommand(1);
    app.footer("Environment: RIESZ_EP_THREADS caps worker threads (0 or unset = all cores).\n"
               "Exit codes: 0 success, 1 check failure, 2 usage or config error.\n\n"
               "Config keys (flat TOML; [initial] and [verify] sections), with defaults:\n" +
               config_key_help());

    RieszArgs riesz;
    auto* c_riesz = app.add_subcommand("riesz", "apply the Riesz potential I_alpha to a grid file");
    c_riesz->add_option("--alpha", riesz.alpha, "degree alpha in ]0, d[")->required();
    c_riesz->add_option("--input", riesz.input, "input grid file")->required();
    c_riesz->add_option("--output", riesz.output, "output grid file")->required();
    c_riesz->add_option("--method", riesz.method, "direct (n^d <= 16^3) or fast")
        ->check(CLI::IsMember({"direct", "fast"}));

    HlsArgs hls;
    auto* c_hls = app.add_subcommand("hls-test", "check the Riesz-potential bounds on a seeded corpus");
    c_hls->add_option("--d", hls.d, "dimension");
    c_hls->add_option("--alpha", hls.alpha, "degree alpha");
    c_hls->add_option("--p", hls.p, "source exponent p, 1 < p < d/alpha");
    c_hls->add_option("--trials", hls.options.trials, "corpus size");
    c_hls->add_option("--n", hls.options.n, "cells per axis");
    c_hls->add_option("--L", hls.options.half_width, "box half-width");
    c_hls->add_option("--seed", hls.options.seed, "corpus seed");
    c_hls->add_option("--report", hls.report, "report JSON path");

    SimulateArgs sim;
    auto* c_sim = app.add_subcommand("simulate", "evolve a scenario and write ledger, state dumps and summary");
    c_sim->add_option("--config", sim.config, "scenario config (defaults when omitted)");
    c_sim->add_option("--out", sim.out, "run directory")->required();

    VerifyArgs ver;
    auto* c_ver = app.add_subcommand("verify", "run verification suites");
    c_ver->add_option("--suite", ver.suite, "suite name or all")
        ->check(CLI::IsMember({"hls", "ibp", "re-inequality", "gronwall", "weak-strong", "dissipativity", "all"}));
    c_ver->add_option("--config", ver.config, "config file (defaults when omitted)");
    c_ver->add_option("--out", ver.out, "report JSON path");
    c_ver->add_flag("--verbose", ver.verbose, "print passing cases too");

    MollifyArgs mol;
    auto* c_mol = app.add_subcommand("mollify", "smooth compactly supported approximation in L^1 and L^gamma");
    c_mol->add_option("--input", mol.input, "input grid file")->required();
    c_mol->add_option("--gamma", mol.gamma, "exponent gamma > 1");
    c_mol->add_option("--epsilon", mol.epsilon, "target combined error");
    c_mol->add_option("--output", mol.output, "output grid file")->required();
    c_mol->add_option("--report", mol.report, "report JSON path");

    std::string run_dir;
    auto* c_rep = app.add_subcommand("report", "render a run directory into rendered.json and rendered.csv");
    c_rep->add_option("run_dir", run_dir, "run directory")->required();

    if (argc <= 1) {
        std::cerr << app.help();
        return kUsage;
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << "\n" << app.help();
        return kUsage;
    }

    const std::string cmd = command_line(argc, argv);
    try {
        if (c_riesz->parsed()) return cmd_riesz(riesz, cmd);
        if (c_hls->parsed()) return cmd_hls(hls, cmd);
        if (c_sim->parsed()) return cmd_simulate(sim, cmd);
        if (c_ver->parsed()) return cmd_verify(ver, cmd);
        if (c_mol->parsed()) return cmd_mollify(mol, cmd);
        if (c_rep->parsed()) return cmd_report(run_dir);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kUsage;
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "invalid argument: %s\n", e.what());
        return kUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "failed: %s\n", e.what());
        return kCheckFailed;
    }
    std::cerr << app.help();
    return kUsage;
}
