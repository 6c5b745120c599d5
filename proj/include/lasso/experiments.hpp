#pragma once

#include "lasso/problem.hpp"
#include "lasso/solvers.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lasso {

/// A and b i.i.d. uniform on [−1, 1].
Problem gen_uniform(Eigen::Index m, Eigen::Index n, std::uint64_t seed, double lambda = 1.0);

struct CsInstance {
    Problem problem;
    Vector x_true;
};

/// A ~ N(0, 1) i.i.d., x_true with k uniformly placed N(0, 2²) entries,
/// b = A·x_true + N(0, σ²) noise. Throws std::invalid_argument for k > n.
CsInstance gen_compressed_sensing(Eigen::Index m, Eigen::Index n, Eigen::Index k, double sigma, std::uint64_t seed,
                                  double lambda = 0.5);

/// Uniform instance whose second column duplicates the first, plus a start
/// point x0 = (G, −G, 0, …) with G large enough for a long constant-step
/// phase. The duplicate pair with opposite signs gives a Jordan chain.
struct DuplicateColumnInstance {
    Problem problem;
    Vector x0;
};

DuplicateColumnInstance gen_duplicate_column(Eigen::Index m, Eigen::Index n, std::uint64_t seed, double lambda = 1.0,
                                             double offset_steps = 1e5);

inline constexpr double kReferenceStepTol = 1e-14;
inline constexpr long kReferenceMaxIter = 10'000'000;
inline constexpr double kReferenceKktTol = 1e-10;

/// High-accuracy x*: a hybrid run to step_tol 1e-14, then one Newton solve
/// of the support-restricted normal equations when that sharpens the KKT
/// residual. Throws NoReliableReference unless the result has max KKT
/// violation ≤ 1e-10 and a positive complementarity margin.
Vector reference_solution(const Problem& p);

/// exp of the least-squares slope of log(err) against the sample index.
/// With `envelope`, only local maxima enter the fit (falls back to every
/// sample when fewer than three exist). Needs at least 50 positive samples.
double empirical_rate(std::span<const double> err, bool envelope = false);

inline constexpr std::size_t kMinRateSamples = 50;

/// err_to_ref values recorded after `last_flag_change` and above `floor`.
std::vector<double> final_regime_errors(std::span<const TraceRecord> trace, long last_flag_change, double floor);

enum class Example { One, Two };
enum class Scale { Desk, Full };

struct ExperimentReport {
    nlohmann::json problem_meta;
    Method method = Method::Ista;
    long total_iters = 0;
    long iters_to_final_regime = 0;
    long flag_change_count = 0;
    std::optional<double> rho_predicted;
    std::optional<double> rho_empirical;
    std::optional<long> switch_iter;
    std::optional<double> recovery_rel_error;
    bool converged = false;
    double kkt_violation = 0.0;
    /// FISTA's τ when the final flags appeared.
    double tau_at_arrival = 0.0;
    /// Largest β < 1 of the final flags.
    double beta_max = 0.0;
    Regime final_regime = Regime::Unknown;
    std::string trace_file;
    std::vector<TraceRecord> trace;
};

struct ExampleOptions {
    std::uint64_t seed = 1;
    double step_tol = 1e-13;
    long max_iter = 1'000'000;
    /// Defaults: 1 for Example 1, 0.5 for Example 2.
    std::optional<double> lambda;
};

struct ExampleRun {
    Example which = Example::One;
    Scale scale = Scale::Desk;
    std::uint64_t seed = 0;
    nlohmann::json problem_meta;
    std::optional<Problem> problem;
    std::optional<Vector> x_true;
    std::optional<Vector> reference;
    bool degenerate = false;
    std::string degenerate_reason;
    std::vector<ExperimentReport> reports;
};

/// Measure one finished run: arrival iteration, final-regime rates and,
/// when x_true is given, the recovery error.
ExperimentReport summarize_run(const Problem& p, Method method, const RunResult& r, const nlohmann::json& meta,
                               const std::optional<Vector>& x_true = std::nullopt);

/// Generate, reference-solve, then run ISTA, FISTA and the hybrid with
/// spectral analysis. A failed reference marks the run degenerate and
/// skips the method runs.
ExampleRun run_example(Example which, Scale scale, const ExampleOptions& opts);

struct RegimeBStudy {
    /// Longest run of consecutive ISTA iterations with |Δstep_norm| ≤ 1e-10.
    long plateau_length = 0;
    long plateau_end = 0;
    double eigvec_residual = 0.0;
    Regime regime = Regime::Unknown;
    std::vector<double> taus;
    std::vector<double> step_ratios;
    std::vector<double> expected_ratios;
};

inline constexpr double kPlateauTol = 1e-10;

/// Run ISTA from inst.x0 for `ista_iters`, locate the constant-step plateau
/// and test Δw against R. From the last ISTA iterate, run frozen-τ FISTA for
/// `fista_iters` and compare its final step to the ISTA step.
RegimeBStudy regime_b_study(const DuplicateColumnInstance& inst, std::span<const double> taus, long ista_iters = 3000,
                            long fista_iters = 500);

const char* to_string(Example e);
const char* to_string(Scale s);

} // namespace lasso
