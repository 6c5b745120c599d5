#include "lasso/experiments.hpp"

#include "lasso/errors.hpp"
#include "lasso/random.hpp"
#include "lasso/recurrence.hpp"
#include "lasso/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace lasso {

namespace {

FlagVector sign_flags(const Vector& x)
{
    std::vector<std::int8_t> d(static_cast<std::size_t>(x.size()));
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        d[static_cast<std::size_t>(i)] = static_cast<std::int8_t>((x[i] > 0.0) - (x[i] < 0.0));
    }
    return FlagVector(std::move(d));
}

// τ after k FISTA passes from t⁰ = t¹ = 1.
double fista_tau_after(long k)
{
    double t_prev = 1.0;
    double t = 1.0;
    for (long i = 0; i < k; ++i) {
        t_prev = t;
        t = t_next(t);
    }
    return (t_prev - 1.0) / t;
}

// Support-restricted normal equations with the signs of x held fixed.
std::optional<Vector> polish(const Problem& p, const Vector& x)
{
    const FlagVector d = sign_flags(x);
    const auto support = d.support();
    if (support.empty()) {
        return std::nullopt;
    }
    const auto k = static_cast<Eigen::Index>(support.size());
    Matrix AE(p.rows(), k);
    Vector dE(k);
    for (Eigen::Index j = 0; j < k; ++j) {
        AE.col(j) = p.A().col(support[static_cast<std::size_t>(j)]);
        dE[j] = d[support[static_cast<std::size_t>(j)]];
    }
    const Matrix G = AE.transpose() * AE;
    Eigen::ColPivHouseholderQR<Matrix> qr(G);
    if (qr.rank() < k) {
        return std::nullopt;
    }
    const Vector xE = qr.solve(AE.transpose() * p.b() - p.lambda() * dE);
    Vector out = Vector::Zero(p.cols());
    for (Eigen::Index j = 0; j < k; ++j) {
        if (xE[j] * dE[j] <= 0.0) {
            return std::nullopt;
        }
        out[support[static_cast<std::size_t>(j)]] = xE[j];
    }
    return out;
}

double least_squares_slope(const std::vector<double>& t, const std::vector<double>& y)
{
    const double n = static_cast<double>(t.size());
    const double tm = std::accumulate(t.begin(), t.end(), 0.0) / n;
    const double ym = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        num += (t[i] - tm) * (y[i] - ym);
        den += (t[i] - tm) * (t[i] - tm);
    }
    return num / den;
}

} // namespace

const char* to_string(Example e)
{
    return e == Example::One ? "example1" : "example2";
}

const char* to_string(Scale s)
{
    return s == Scale::Desk ? "desk" : "full";
}

Problem gen_uniform(Eigen::Index m, Eigen::Index n, std::uint64_t seed, double lambda)
{
    if (m < 1 || n < 1) {
        throw std::invalid_argument("gen_uniform: m and n must be >= 1");
    }
    Rng ra(seed, kStreamMatrix);
    Rng rb(seed, kStreamData);
    Matrix A(m, n);
    // Row-major draw order so the file layout and the stream agree.
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            A(i, j) = ra.uniform(-1.0, 1.0);
        }
    }
    Vector b(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        b[i] = rb.uniform(-1.0, 1.0);
    }
    return Problem(std::move(A), std::move(b), lambda);
}

CsInstance gen_compressed_sensing(Eigen::Index m, Eigen::Index n, Eigen::Index k, double sigma, std::uint64_t seed,
                                  double lambda)
{
    if (m < 1 || n < 1) {
        throw std::invalid_argument("gen_compressed_sensing: m and n must be >= 1");
    }
    if (k < 0 || k > n) {
        throw std::invalid_argument("gen_compressed_sensing: need 0 <= k <= n");
    }
    if (sigma < 0.0) {
        throw std::invalid_argument("gen_compressed_sensing: sigma must be >= 0");
    }
    Rng ra(seed, kStreamMatrix);
    Rng rd(seed, kStreamData);
    Matrix A(m, n);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            A(i, j) = ra.normal();
        }
    }
    Vector x_true = Vector::Zero(n);
    for (Eigen::Index idx : rd.choose(n, k)) {
        x_true[idx] = 2.0 * rd.normal();
    }
    Vector b = A * x_true;
    for (Eigen::Index i = 0; i < m; ++i) {
        b[i] += sigma * rd.normal();
    }
    return {Problem(std::move(A), std::move(b), lambda), std::move(x_true)};
}

DuplicateColumnInstance gen_duplicate_column(Eigen::Index m, Eigen::Index n, std::uint64_t seed, double lambda,
                                             double offset_steps)
{
    if (n < 2) {
        throw std::invalid_argument("gen_duplicate_column: need n >= 2");
    }
    Problem base = gen_uniform(m, n, seed, lambda);
    Matrix A = base.A();
    A.col(1) = A.col(0);
    Problem p(std::move(A), base.b(), lambda);
    Vector x0 = Vector::Zero(n);
    x0[0] = offset_steps * p.theta();
    x0[1] = -x0[0];
    return {std::move(p), std::move(x0)};
}

Vector reference_solution(const Problem& p)
{
    RunOptions o;
    o.step_tol = kReferenceStepTol;
    o.max_iter = kReferenceMaxIter;
    Vector x = hybrid_run(p, o).solution;
    double viol = kkt_residual(p, x).max_violation;
    if (auto xp = polish(p, x)) {
        const double pv = kkt_residual(p, *xp).max_violation;
        if (pv < viol) {
            x = *xp;
            viol = pv;
        }
    }
    const KktReport k = kkt_residual(p, x);
    if (!(k.max_violation <= kReferenceKktTol)) {
        throw NoReliableReference("reference_solution: KKT violation " + std::to_string(k.max_violation) +
                                  " above tolerance");
    }
    if (!(k.complementarity_margin > 0.0)) {
        throw NoReliableReference("reference_solution: strict complementarity fails (margin " +
                                  std::to_string(k.complementarity_margin) + ")");
    }
    return x;
}

double empirical_rate(std::span<const double> err, bool envelope)
{
    if (err.size() < kMinRateSamples) {
        throw std::invalid_argument("empirical_rate: need at least 50 samples");
    }
    for (double e : err) {
        if (!(e > 0.0)) {
            throw std::invalid_argument("empirical_rate: samples must be positive");
        }
    }
    std::vector<double> t;
    std::vector<double> y;
    if (envelope) {
        for (std::size_t i = 1; i + 1 < err.size(); ++i) {
            if (err[i] >= err[i - 1] && err[i] >= err[i + 1]) {
                t.push_back(static_cast<double>(i));
                y.push_back(std::log(err[i]));
            }
        }
    }
    if (t.size() < 3) {
        t.clear();
        y.clear();
        for (std::size_t i = 0; i < err.size(); ++i) {
            t.push_back(static_cast<double>(i));
            y.push_back(std::log(err[i]));
        }
    }
    return std::exp(least_squares_slope(t, y));
}

std::vector<double> final_regime_errors(std::span<const TraceRecord> trace, long last_flag_change, double floor)
{
    std::vector<double> out;
    for (const TraceRecord& r : trace) {
        if (r.iter > last_flag_change && r.err_to_ref && *r.err_to_ref > floor) {
            out.push_back(*r.err_to_ref);
        }
    }
    return out;
}

ExperimentReport summarize_run(const Problem& p, Method method, const RunResult& r, const nlohmann::json& meta,
                               const std::optional<Vector>& x_true)
{
    ExperimentReport rep;
    rep.problem_meta = meta;
    rep.method = method;
    rep.total_iters = r.iterations;
    rep.iters_to_final_regime = r.last_flag_change;
    rep.flag_change_count = r.flag_changes;
    rep.switch_iter = r.switch_iter;
    rep.converged = r.converged;
    rep.kkt_violation = r.kkt.max_violation;
    rep.trace = r.trace;
    if (method != Method::Ista) {
        long fista_passes = r.last_flag_change;
        if (r.switch_iter) {
            fista_passes = std::min(fista_passes, *r.switch_iter);
        }
        rep.tau_at_arrival = fista_tau_after(fista_passes);
    }
    if (x_true) {
        const double nt = x_true->norm();
        rep.recovery_rel_error = (r.solution - *x_true).norm() / (nt > 0.0 ? nt : 1.0);
    }

    const SpectrumReport spec = analyze_spectrum(p, sign_flags(r.solution), 0.0);
    rep.beta_max = spec.beta_max_sub1;
    rep.final_regime = spec.regime;
    if (spec.has_unit_eigenvalue) {
        return rep;
    }

    // Fit window: final flag epoch (and, for the hybrid, the ISTA phase),
    // above the rounding floor, with the first half dropped so faster modes
    // have died out.
    long start = r.last_flag_change;
    const bool ista_tail = method == Method::Ista || r.switch_iter.has_value();
    if (r.switch_iter) {
        start = std::max(start, *r.switch_iter);
    }
    const double floor = 1e-11 * std::max(1.0, r.solution.norm());
    std::vector<const TraceRecord*> tail;
    for (const TraceRecord& rec : r.trace) {
        if (rec.iter > start && rec.err_to_ref && *rec.err_to_ref > floor) {
            tail.push_back(&rec);
        }
    }
    if (tail.size() >= 2 * kMinRateSamples) {
        tail.erase(tail.begin(), tail.begin() + static_cast<std::ptrdiff_t>(tail.size() / 2));
    }
    if (ista_tail) {
        rep.rho_predicted = spec.rho_ista;
    } else if (!tail.empty()) {
        double acc = 0.0;
        for (const TraceRecord* rec : tail) {
            acc += std::log(fista_rate(spec.betas, rec->tau));
        }
        rep.rho_predicted = std::exp(acc / static_cast<double>(tail.size()));
    }
    if (tail.size() >= kMinRateSamples) {
        std::vector<double> err;
        err.reserve(tail.size());
        for (const TraceRecord* rec : tail) {
            err.push_back(*rec->err_to_ref);
        }
        rep.rho_empirical = empirical_rate(err, !ista_tail);
    }
    return rep;
}

ExampleRun run_example(Example which, Scale scale, const ExampleOptions& opts)
{
    ExampleRun out;
    out.which = which;
    out.scale = scale;
    out.seed = opts.seed;
    nlohmann::json meta = {{"example", to_string(which)}, {"scale", to_string(scale)}, {"seed", opts.seed},
                           {"rng", kRngName}};
    if (which == Example::One) {
        const double lambda = opts.lambda.value_or(1.0);
        out.problem = gen_uniform(20, 40, opts.seed, lambda);
        meta["family"] = "uniform";
        meta["lambda"] = lambda;
    } else {
        const bool desk = scale == Scale::Desk;
        const Eigen::Index m = desk ? 64 : 128;
        const Eigen::Index n = desk ? 256 : 1024;
        const Eigen::Index k = desk ? 5 : 10;
        const double sigma = 1e-3;
        const double lambda = opts.lambda.value_or(0.5);
        CsInstance cs = gen_compressed_sensing(m, n, k, sigma, opts.seed, lambda);
        out.problem = std::move(cs.problem);
        out.x_true = std::move(cs.x_true);
        meta["family"] = "cs";
        meta["k"] = k;
        meta["sigma"] = sigma;
        meta["lambda"] = lambda;
    }
    const Problem& p = *out.problem;
    meta["m"] = p.rows();
    meta["n"] = p.cols();
    meta["L"] = p.lipschitz();
    out.problem_meta = meta;

    try {
        out.reference = reference_solution(p);
    } catch (const NoReliableReference& e) {
        out.degenerate = true;
        out.degenerate_reason = e.what();
        return out;
    }

    RunOptions ro;
    ro.step_tol = opts.step_tol;
    ro.max_iter = opts.max_iter;
    ro.analyze_spectra = true;
    ro.rng_seed = opts.seed;
    for (Method m : {Method::Ista, Method::Fista, Method::Hybrid}) {
        const RunResult r = run(p, m, ro, out.reference);
        out.reports.push_back(summarize_run(p, m, r, meta, out.x_true));
    }
    return out;
}

RegimeBStudy regime_b_study(const DuplicateColumnInstance& inst, std::span<const double> taus, long ista_iters,
                            long fista_iters)
{
    if (ista_iters < 2 || fista_iters < 2) {
        throw std::invalid_argument("regime_b_study: need at least two iterations per phase");
    }
    const Problem& p = inst.problem;
    RegimeBStudy out;

    Vector x = inst.x0;
    Vector x_prev = x;
    Vector w_prev;
    Vector w;
    FlagVector last_flags;
    std::vector<double> steps;
    steps.reserve(static_cast<std::size_t>(ista_iters));
    for (long k = 0; k < ista_iters; ++k) {
        IstaStep st = ista_step(p, x);
        steps.push_back((st.x_next - x).norm());
        x_prev = std::move(x);
        x = std::move(st.x_next);
        w_prev = std::move(w);
        w = std::move(st.w);
        last_flags = std::move(st.flags);
    }
    long run_len = 1;
    for (std::size_t i = 1; i < steps.size(); ++i) {
        run_len = std::abs(steps[i] - steps[i - 1]) <= kPlateauTol ? run_len + 1 : 1;
        if (run_len > out.plateau_length) {
            out.plateau_length = run_len;
            out.plateau_end = static_cast<long>(i) + 1;
        }
    }

    const Vector dw = w - w_prev;
    const IstaOperator op = build_ista_operator(p, last_flags);
    out.regime = analyze_spectrum(p, last_flags, 0.0).regime;

    for (double tau : taus) {
        Vector xf = x;
        Vector xf_prev = x_prev;
        Vector wf_prev;
        Vector wf;
        for (long k = 0; k < fista_iters; ++k) {
            IstaStep st = momentum_step(p, xf, xf_prev, tau);
            xf_prev = std::move(xf);
            xf = std::move(st.x_next);
            wf_prev = std::move(wf);
            wf = std::move(st.w);
        }
        const ConstantStepChecks c = constant_step_checks(op, dw, tau, wf - wf_prev);
        out.eigvec_residual = c.eigvec_residual;
        out.taus.push_back(tau);
        out.step_ratios.push_back(c.step_ratio);
        out.expected_ratios.push_back(c.expected_ratio);
    }
    if (taus.empty()) {
        const ConstantStepChecks c = constant_step_checks(op, dw, 0.0, dw);
        out.eigvec_residual = c.eigvec_residual;
    }
    return out;
}

} // namespace lasso
