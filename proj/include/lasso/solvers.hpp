#pragma once

#include "lasso/problem.hpp"
#include "lasso/spectral.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lasso {

enum class Method { Ista, Fista, Hybrid };

const char* to_string(Method m);
std::optional<Method> method_from_string(const std::string& s);

/// Iteration state shared by ISTA and FISTA.
///
/// For FISTA, `t` is t^{[k+1]} and `t_prev` is t^{[k]} after k passes, so
/// `tau` = (t_prev − 1)/t is the momentum the next pass will apply. ISTA
/// leaves t = t_prev = 1 and tau = 0. `w` and `flags` are the auxiliary
/// iterate and sign pattern of the last pass; flags always equal sign(x).
struct SolverState {
    Vector x;
    Vector x_prev;
    double t = 1.0;
    double t_prev = 1.0;
    double tau = 0.0;
    Vector w;
    FlagVector flags;
    long iter = 0;

    /// x = x_prev = x0, t⁰ = t¹ = 1, flags = sign(x0).
    static SolverState start(const Vector& x0);
};

struct TraceRecord {
    long iter = 0;
    double objective = 0.0;
    double step_norm = 0.0;
    std::optional<double> err_to_ref;
    bool flag_change = false;
    long cum_flag_changes = 0;
    Regime regime = Regime::Unknown;
    double tau = 0.0;
    std::optional<double> rho_pred;
};

struct RunOptions {
    long max_iter = 1'000'000;
    /// Stop when ‖x^{[k]} − x^{[k−1]}‖ / max(1, ‖x^{[k]}‖) < step_tol.
    double step_tol = 1e-10;
    long trace_every = 1;
    /// Classify every iteration into A/B/C/D and attach predicted rates.
    bool analyze_spectra = false;
    /// Consecutive flag-stable iterations required before the hybrid switch test.
    int switch_window = 10;
    std::uint64_t rng_seed = 0;
    /// Starting point; zero when absent.
    std::optional<Vector> x0;
    /// Hybrid only: switch to ISTA unconditionally after this many FISTA passes.
    std::optional<long> force_switch_at;
    /// Hybrid only: never switch (the run is then plain FISTA).
    bool disable_switch = false;

    void validate() const;
};

struct IstaStep {
    Vector x_next;
    Vector w;
    FlagVector flags;
};

/// One ISTA pass: w = (I − AᵀA/L)x + Aᵀb/L, x_next = shrink(w, λ/L).
IstaStep ista_step(const Problem& p, const Vector& x);

/// Proximal step from y = x + tau·(x − x_prev).
IstaStep momentum_step(const Problem& p, const Vector& x, const Vector& x_prev, double tau);

/// (1 + √(1 + 4t²))/2. Throws std::invalid_argument for t < 1.
double t_next(double t);

/// One FISTA pass.
SolverState fista_step(const Problem& p, const SolverState& s);

struct RunResult {
    Vector solution;
    std::vector<TraceRecord> trace;
    bool converged = false;
    long iterations = 0;
    KktReport kkt;
    long flag_changes = 0;
    /// Last iteration whose flags differed from the previous ones (0 if never).
    long last_flag_change = 0;
    std::optional<long> switch_iter;
    std::optional<double> tau_at_switch;
};

/// Solve with ISTA, FISTA or the hybrid. `reference`, when given, fills err_to_ref.
RunResult run(const Problem& p, Method method, const RunOptions& opts,
              const std::optional<Vector>& reference = std::nullopt);

/// FISTA that hands over to ISTA once switch_criterion fires.
RunResult hybrid_run(const Problem& p, const RunOptions& opts, const std::optional<Vector>& reference = std::nullopt);

/// True iff the last `switch_window` records show no flag change, the flag
/// epoch has no unit eigenvalue, and tau exceeds the largest β below 1.
bool switch_criterion(std::span<const TraceRecord> window, const SpectrumReport& spectrum, double tau,
                      int switch_window = 10);

} // namespace lasso
