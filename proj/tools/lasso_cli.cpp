// lasso: generate LASSO instances, solve them with ISTA/FISTA/hybrid,
// inspect flag-epoch spectra, run the invariant suites and write reports.
//
// Exit codes: 0 ok, 1 verification failure, 2 bad input or I/O,
// 3 non-convergence, 4 degenerate instance. LS_LOG=quiet|info|debug.

#include "lasso/errors.hpp"
#include "lasso/experiments.hpp"
#include "lasso/problem.hpp"
#include "lasso/problem_io.hpp"
#include "lasso/random.hpp"
#include "lasso/recurrence.hpp"
#include "lasso/report_io.hpp"
#include "lasso/solvers.hpp"
#include "lasso/spectral.hpp"
#include "lasso/verify.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace lasso;

namespace {

enum Exit { kOk = 0, kVerifyFailed = 1, kBadInput = 2, kNotConverged = 3, kDegenerate = 4 };

void setup_logging()
{
    auto logger = spdlog::stderr_color_st("lasso");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    const char* env = std::getenv("LS_LOG");
    const std::string level = env ? env : "info";
    if (level == "quiet") {
        spdlog::set_level(spdlog::level::off);
    } else if (level == "debug") {
        spdlog::set_level(spdlog::level::debug);
    } else {
        if (level != "info") {
            spdlog::warn("unknown LS_LOG value '{}', using info", level);
        }
        spdlog::set_level(spdlog::level::info);
    }
}

fs::path sidecar_path(const fs::path& out)
{
    fs::path p = out;
    p.replace_extension();
    return p.string() + ".x_true.json";
}

FlagVector parse_flags(const std::string& s)
{
    std::vector<std::int8_t> d;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        std::size_t pos = 0;
        const int v = std::stoi(tok, &pos);
        if (pos != tok.size() && tok.find_first_not_of(" ", pos) != std::string::npos) {
            throw std::invalid_argument("bad flag entry '" + tok + "'");
        }
        if (v < -1 || v > 1) {
            throw std::invalid_argument("flag entries must be -1, 0 or 1");
        }
        d.push_back(static_cast<std::int8_t>(v));
    }
    return FlagVector(std::move(d));
}

FlagVector sign_of(const Vector& x)
{
    std::vector<std::int8_t> d(static_cast<std::size_t>(x.size()));
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        d[static_cast<std::size_t>(i)] = static_cast<std::int8_t>((x[i] > 0.0) - (x[i] < 0.0));
    }
    return FlagVector(std::move(d));
}

void emit_json(const json& j, const std::string& out)
{
    if (out.empty() || out == "-") {
        std::cout << j.dump(1) << '\n';
    } else {
        write_json(out, j);
        spdlog::info("wrote {}", out);
    }
}

// gen ------------------------------------------------------------------------

struct GenArgs {
    std::string family;
    long m = 20;
    long n = 40;
    long k = 5;
    double sigma = 1e-3;
    std::optional<double> lambda;
    std::uint64_t seed = 1;
    std::string out;
};

int cmd_gen(const GenArgs& a)
{
    json meta = {{"family", a.family}, {"seed", a.seed}, {"rng", kRngName}};
    if (a.family == "uniform") {
        const double lambda = a.lambda.value_or(1.0);
        const Problem p = gen_uniform(a.m, a.n, a.seed, lambda);
        save_problem(a.out, p, meta);
        std::printf("m=%ld n=%ld lambda=%.17g L=%.17g\n", a.m, a.n, lambda, p.lipschitz());
        return kOk;
    }
    const double lambda = a.lambda.value_or(0.5);
    meta["k"] = a.k;
    meta["sigma"] = a.sigma;
    const CsInstance cs = gen_compressed_sensing(a.m, a.n, a.k, a.sigma, a.seed, lambda);
    const fs::path side = sidecar_path(a.out);
    meta["x_true_file"] = side.filename().string();
    save_problem(a.out, cs.problem, meta);
    write_json(side, json{{"x", vector_to_json(cs.x_true)}});
    std::printf("m=%ld n=%ld lambda=%.17g L=%.17g\nx_true=%s\n", a.m, a.n, lambda, cs.problem.lipschitz(),
                side.string().c_str());
    return kOk;
}

// solve ----------------------------------------------------------------------

struct SolveArgs {
    std::string in;
    std::string method = "fista";
    double tol = 1e-10;
    long max_iter = 1'000'000;
    long trace_every = 1;
    std::string trace;
    std::string ref;
    std::string x0;
    std::string out;
    bool analyze = false;
    int switch_window = 10;
    std::optional<long> force_switch_at;
    bool no_switch = false;
};

int cmd_solve(const SolveArgs& a)
{
    const ProblemFile pf = load_problem(a.in);
    const Problem& p = pf.problem;
    const Method method = *method_from_string(a.method);
    RunOptions o;
    o.step_tol = a.tol;
    o.max_iter = a.max_iter;
    o.trace_every = a.trace_every;
    o.analyze_spectra = a.analyze;
    o.switch_window = a.switch_window;
    o.force_switch_at = a.force_switch_at;
    o.disable_switch = a.no_switch;
    if (pf.meta.contains("seed") && pf.meta["seed"].is_number_unsigned()) {
        o.rng_seed = pf.meta["seed"].get<std::uint64_t>();
    }
    if (!a.x0.empty()) {
        o.x0 = vector_from_json(read_json(a.x0));
    }
    std::optional<Vector> ref;
    if (!a.ref.empty()) {
        ref = vector_from_json(read_json(a.ref));
        if (ref->size() != p.cols()) {
            throw std::invalid_argument("reference has length " + std::to_string(ref->size()) + ", expected " +
                                        std::to_string(p.cols()));
        }
    }
    spdlog::debug("solving {}x{} with {} (tol {}, max_iter {})", p.rows(), p.cols(), a.method, a.tol, a.max_iter);
    const RunResult r = run(p, method, o, ref);

    if (!a.trace.empty()) {
        save_trace_csv(a.trace, r.trace);
        spdlog::info("wrote {} trace records to {}", r.trace.size(), a.trace);
    }
    if (!a.out.empty()) {
        json j = {{"x", vector_to_json(r.solution)},
                  {"method", a.method},
                  {"iterations", r.iterations},
                  {"converged", r.converged},
                  {"objective", objective(p, r.solution)},
                  {"kkt_violation", r.kkt.max_violation},
                  {"complementarity_margin", r.kkt.complementarity_margin},
                  {"flag_changes", r.flag_changes},
                  {"last_flag_change", r.last_flag_change}};
        j["switch_iter"] = r.switch_iter ? json(*r.switch_iter) : json(nullptr);
        write_json(a.out, j);
    }
    std::printf("method=%s\niterations=%ld\nconverged=%s\nobjective=%.17g\nkkt_violation=%.3e\nflag_changes=%ld\n",
                a.method.c_str(), r.iterations, r.converged ? "true" : "false", objective(p, r.solution),
                r.kkt.max_violation, r.flag_changes);
    if (r.switch_iter) {
        std::printf("switch_iter=%ld\n", *r.switch_iter);
    }
    if (!r.converged) {
        spdlog::warn("no convergence within {} iterations", a.max_iter);
        return kNotConverged;
    }
    return kOk;
}

// analyze --------------------------------------------------------------------

struct AnalyzeArgs {
    std::string in;
    std::string at_iterate;
    std::string flags;
    std::string prev_flags;
    std::optional<double> tau;
    std::string dump_operator;
    std::string out;
};

int cmd_analyze(const AnalyzeArgs& a)
{
    const ProblemFile pf = load_problem(a.in);
    const Problem& p = pf.problem;
    FlagVector d;
    if (!a.at_iterate.empty()) {
        const Vector x = vector_from_json(read_json(a.at_iterate));
        if (x.size() != p.cols()) {
            throw std::invalid_argument("iterate has length " + std::to_string(x.size()) + ", expected " +
                                        std::to_string(p.cols()));
        }
        d = sign_of(x);
    } else {
        d = parse_flags(a.flags);
    }
    if (d.size() != p.cols()) {
        throw std::invalid_argument("flags have length " + std::to_string(d.size()) + ", expected " +
                                    std::to_string(p.cols()));
    }
    std::optional<FlagVector> prev;
    if (!a.prev_flags.empty()) {
        prev = parse_flags(a.prev_flags);
        if (prev->size() != p.cols()) {
            throw std::invalid_argument("previous flags have the wrong length");
        }
    }
    const double tau = a.tau.value_or(0.0);
    if (!(tau >= 0.0 && tau < 1.0)) {
        throw std::invalid_argument("--tau must lie in [0, 1)");
    }
    const SpectrumReport rep = analyze_spectrum(p, d, tau, prev);
    spdlog::debug("support size {}, regime {}", d.support_size(), to_string(rep.regime));
    emit_json(spectrum_to_json(rep), a.out);

    if (!a.dump_operator.empty()) {
        json op;
        if (a.tau) {
            op = operator_to_json(build_fista_operator(p, d, prev.value_or(d), tau).augmented(), d, tau);
        } else {
            op = operator_to_json(build_ista_operator(p, d).augmented(), d, std::nullopt);
        }
        write_json(a.dump_operator, op);
        spdlog::info("wrote operator to {}", a.dump_operator);
    }
    return kOk;
}

// verify ---------------------------------------------------------------------

int cmd_verify(const std::string& suite, int seeds)
{
    std::vector<Suite> suites;
    if (suite == "all") {
        suites = all_suites();
    } else {
        suites.push_back(*suite_from_string(suite));
    }
    bool ok = true;
    for (Suite s : suites) {
        spdlog::info("running suite {}", to_string(s));
        for (const CheckResult& c : run_suite(s, seeds)) {
            std::printf("%s %s: %s measured=%.6g threshold=%.6g %s\n", c.pass ? "PASS" : "FAIL", c.suite.c_str(),
                        c.name.c_str(), c.measured, c.threshold, c.detail.c_str());
            ok = ok && c.pass;
        }
    }
    std::printf("%s\n", ok ? "all checks passed" : "verification FAILED");
    return ok ? kOk : kVerifyFailed;
}

// report ---------------------------------------------------------------------

struct ReportArgs {
    int example = 1;
    std::string scale = "desk";
    std::uint64_t seed = 1;
    std::optional<double> lambda;
    std::string out;
};

int cmd_report(const ReportArgs& a)
{
    ExampleOptions o;
    o.seed = a.seed;
    o.lambda = a.lambda;
    const Example which = a.example == 1 ? Example::One : Example::Two;
    const Scale scale = a.scale == "desk" ? Scale::Desk : Scale::Full;
    spdlog::info("running {} at {} scale, seed {}", to_string(which), to_string(scale), a.seed);
    ExampleRun run = run_example(which, scale, o);
    if (run.degenerate) {
        spdlog::error("degenerate instance: {}", run.degenerate_reason);
        std::printf("degenerate instance: %s\n", run.degenerate_reason.c_str());
        return kDegenerate;
    }
    fs::create_directories(a.out);
    json reports = json::array();
    for (ExperimentReport& r : run.reports) {
        r.trace_file = std::string(to_string(r.method)) + ".csv";
        save_trace_csv(fs::path(a.out) / r.trace_file, r.trace);
        reports.push_back(report_to_json(r, a.seed));
    }
    const ExperimentReport& ista = run.reports[0];
    const ExperimentReport& fista = run.reports[1];
    const ExperimentReport& hybrid = run.reports[2];
    json orderings = {
        {"hybrid_fewer_iters_than_fista", hybrid.total_iters < fista.total_iters},
        {"fista_reaches_final_regime_first", fista.iters_to_final_regime < ista.iters_to_final_regime},
        {"beta_max_below_tau_at_arrival", fista.beta_max < fista.tau_at_arrival},
        {"hybrid_saving", 1.0 - static_cast<double>(hybrid.total_iters) / static_cast<double>(fista.total_iters)},
    };
    json doc = {{"example", to_string(which)},
                {"scale", to_string(scale)},
                {"seed", a.seed},
                {"problem_meta", run.problem_meta},
                {"reports", reports},
                {"orderings", orderings}};
    write_json(fs::path(a.out) / "report.json", doc);
    for (const ExperimentReport& r : run.reports) {
        std::printf("%-6s total_iters=%ld final_regime_at=%ld flag_changes=%ld", to_string(r.method), r.total_iters,
                    r.iters_to_final_regime, r.flag_change_count);
        if (r.switch_iter) {
            std::printf(" switch_iter=%ld", *r.switch_iter);
        }
        if (r.recovery_rel_error) {
            std::printf(" recovery_rel_error=%.3e", *r.recovery_rel_error);
        }
        std::printf("\n");
    }
    std::printf("report=%s\n", (fs::path(a.out) / "report.json").string().c_str());
    return kOk;
}

} // namespace

int main(int argc, char** argv)
{
    setup_logging();
    CLI::App app{"LASSO ISTA/FISTA toolkit with spectral regime analysis"};
    app.require_subcommand(1, 1);

    GenArgs ga;
    auto* gen = app.add_subcommand("gen", "Generate a problem file");
    gen->add_option("--family", ga.family, "uniform or cs")->required()->check(CLI::IsMember({"uniform", "cs"}));
    gen->add_option("--m", ga.m, "Rows")->check(CLI::PositiveNumber);
    gen->add_option("--n", ga.n, "Columns")->check(CLI::PositiveNumber);
    gen->add_option("--k", ga.k, "Nonzeros of x_true (cs)")->check(CLI::NonNegativeNumber);
    gen->add_option("--sigma", ga.sigma, "Noise level (cs)")->check(CLI::NonNegativeNumber);
    gen->add_option("--lambda", ga.lambda, "Regularization weight (default 1 uniform, 0.5 cs)");
    gen->add_option("--seed", ga.seed, "Generator seed");
    gen->add_option("--out", ga.out, "Output problem file")->required();

    SolveArgs sa;
    auto* solve = app.add_subcommand("solve", "Run a solver on a problem file");
    solve->add_option("--in", sa.in, "Problem file")->required();
    solve->add_option("--method", sa.method, "ista, fista or hybrid")
        ->check(CLI::IsMember({"ista", "fista", "hybrid"}));
    solve->add_option("--tol", sa.tol, "Relative step tolerance")->check(CLI::PositiveNumber);
    solve->add_option("--max-iter", sa.max_iter, "Iteration limit")->check(CLI::PositiveNumber);
    solve->add_option("--trace-every", sa.trace_every, "Trace stride")->check(CLI::PositiveNumber);
    solve->add_option("--trace", sa.trace, "Trace CSV output");
    solve->add_option("--ref", sa.ref, "Reference solution (vector JSON) for err_to_ref");
    solve->add_option("--x0", sa.x0, "Starting point (vector JSON)");
    solve->add_option("--out", sa.out, "Solution JSON output");
    solve->add_flag("--analyze", sa.analyze, "Label regimes and predicted rates per iteration");
    solve->add_option("--switch-window", sa.switch_window, "Flag-stable iterations before the switch test")
        ->check(CLI::PositiveNumber);
    solve->add_option("--force-switch-at", sa.force_switch_at, "Hybrid: switch to ISTA after this many passes")
        ->check(CLI::NonNegativeNumber);
    solve->add_flag("--no-switch", sa.no_switch, "Hybrid: never switch");

    AnalyzeArgs aa;
    auto* analyze = app.add_subcommand("analyze", "Spectral report for one flag configuration");
    analyze->add_option("--in", aa.in, "Problem file")->required();
    auto* at = analyze->add_option("--at-iterate", aa.at_iterate, "Iterate (vector JSON); flags = sign(x)");
    auto* fl = analyze->add_option("--flags", aa.flags, "Comma-separated flags, e.g. 1,0,-1");
    at->excludes(fl);
    fl->excludes(at);
    analyze->add_option("--prev-flags", aa.prev_flags, "Flags of the previous step");
    analyze->add_option("--tau", aa.tau, "Momentum ratio in [0, 1)");
    analyze->add_option("--dump-operator", aa.dump_operator,
                        "Write R_aug (no --tau) or N_aug (with --tau) as JSON");
    analyze->add_option("--out", aa.out, "Report output (default stdout)");

    std::string suite = "all";
    int seeds = 10;
    auto* verify = app.add_subcommand("verify", "Run invariant suites");
    verify->add_option("--suite", suite, "equivalence|spectral|fixed-point|regimeB|rates|all")
        ->check(CLI::IsMember({"equivalence", "spectral", "fixed-point", "regimeB", "rates", "all"}));
    verify->add_option("--seeds", seeds, "Instances per suite")->check(CLI::PositiveNumber);

    ReportArgs ra;
    auto* report = app.add_subcommand("report", "Run an example end to end and write traces and a report");
    report->add_option("--example", ra.example, "1 or 2")->check(CLI::IsMember({1, 2}));
    report->add_option("--scale", ra.scale, "desk or full")->check(CLI::IsMember({"desk", "full"}));
    report->add_option("--seed", ra.seed, "Generator seed");
    report->add_option("--lambda", ra.lambda, "Override the example's lambda");
    report->add_option("--out", ra.out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kBadInput;
    }

    try {
        if (*gen) {
            return cmd_gen(ga);
        }
        if (*solve) {
            return cmd_solve(sa);
        }
        if (*analyze) {
            if (aa.at_iterate.empty() && aa.flags.empty()) {
                spdlog::error("analyze needs --at-iterate or --flags");
                return kBadInput;
            }
            return cmd_analyze(aa);
        }
        if (*verify) {
            return cmd_verify(suite, seeds);
        }
        if (*report) {
            return cmd_report(ra);
        }
    } catch (const NoReliableReference& e) {
        spdlog::error("degenerate instance: {}", e.what());
        return kDegenerate;
    } catch (const DegenerateInput& e) {
        spdlog::error("degenerate instance: {}", e.what());
        return kDegenerate;
    } catch (const IoError& e) {
        spdlog::error("{}", e.what());
        return kBadInput;
    } catch (const std::invalid_argument& e) {
        spdlog::error("{}", e.what());
        return kBadInput;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return kBadInput;
    }
    return kOk;
}
