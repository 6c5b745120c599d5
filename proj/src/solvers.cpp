#include "lasso/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace lasso {

const char* to_string(Method m)
{
    switch (m) {
    case Method::Ista:
        return "ista";
    case Method::Fista:
        return "fista";
    case Method::Hybrid:
        return "hybrid";
    }
    return "ista";
}

std::optional<Method> method_from_string(const std::string& s)
{
    for (Method m : {Method::Ista, Method::Fista, Method::Hybrid}) {
        if (s == to_string(m)) {
            return m;
        }
    }
    return std::nullopt;
}

SolverState SolverState::start(const Vector& x0)
{
    SolverState s;
    s.x = x0;
    s.x_prev = x0;
    s.w = x0;
    std::vector<std::int8_t> d(static_cast<std::size_t>(x0.size()));
    for (Eigen::Index i = 0; i < x0.size(); ++i) {
        d[static_cast<std::size_t>(i)] = static_cast<std::int8_t>((x0[i] > 0.0) - (x0[i] < 0.0));
    }
    s.flags = FlagVector(std::move(d));
    return s;
}

void RunOptions::validate() const
{
    if (max_iter < 1) {
        throw std::invalid_argument("RunOptions: max_iter must be >= 1");
    }
    if (!(step_tol > 0.0)) {
        throw std::invalid_argument("RunOptions: step_tol must be > 0");
    }
    if (trace_every < 1) {
        throw std::invalid_argument("RunOptions: trace_every must be >= 1");
    }
    if (switch_window < 1) {
        throw std::invalid_argument("RunOptions: switch_window must be >= 1");
    }
    if (force_switch_at && *force_switch_at < 0) {
        throw std::invalid_argument("RunOptions: force_switch_at must be >= 0");
    }
}

IstaStep ista_step(const Problem& p, const Vector& x)
{
    if (x.size() != p.cols()) {
        throw std::invalid_argument("ista_step: dimension mismatch");
    }
    IstaStep out;
    out.w = p.apply_step_matrix(x) + p.Atb() / p.lipschitz();
    out.x_next = shrink(out.w, p.theta());
    out.flags = flags(out.w, p.theta());
    return out;
}

IstaStep momentum_step(const Problem& p, const Vector& x, const Vector& x_prev, double tau)
{
    if (tau == 0.0) {
        return ista_step(p, x);
    }
    return ista_step(p, x + tau * (x - x_prev));
}

double t_next(double t)
{
    if (!(t >= 1.0)) {
        throw std::invalid_argument("t_next: t must be >= 1");
    }
    return 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
}

SolverState fista_step(const Problem& p, const SolverState& s)
{
    const double tau = (s.t_prev - 1.0) / s.t;
    IstaStep st = momentum_step(p, s.x, s.x_prev, tau);
    SolverState next;
    next.x_prev = s.x;
    next.x = std::move(st.x_next);
    next.w = std::move(st.w);
    next.flags = std::move(st.flags);
    next.t_prev = s.t;
    next.t = t_next(s.t);
    next.tau = (next.t_prev - 1.0) / next.t;
    next.iter = s.iter + 1;
    return next;
}

bool switch_criterion(std::span<const TraceRecord> window, const SpectrumReport& spectrum, double tau,
                      int switch_window)
{
    if (switch_window < 1 || window.size() < static_cast<std::size_t>(switch_window)) {
        return false;
    }
    const auto tail = window.last(static_cast<std::size_t>(switch_window));
    if (std::any_of(tail.begin(), tail.end(), [](const TraceRecord& r) { return r.flag_change; })) {
        return false;
    }
    if (spectrum.has_unit_eigenvalue) {
        return false;
    }
    return tau > spectrum.beta_max_sub1;
}

namespace {

RunResult drive(const Problem& p, Method method, const RunOptions& opts, const std::optional<Vector>& reference)
{
    opts.validate();
    const Eigen::Index n = p.cols();
    if (opts.x0 && opts.x0->size() != n) {
        throw std::invalid_argument("run: x0 has the wrong length");
    }
    if (reference && reference->size() != n) {
        throw std::invalid_argument("run: reference has the wrong length");
    }

    RunResult res;
    SolverState s = SolverState::start(opts.x0.value_or(Vector::Zero(n)));
    SpectrumCache cache(p);
    const bool hybrid = method == Method::Hybrid;
    bool in_ista = method == Method::Ista;
    if (hybrid && !opts.disable_switch && opts.force_switch_at && *opts.force_switch_at == 0) {
        in_ista = true;
        res.switch_iter = 0;
        res.tau_at_switch = 0.0;
    }

    std::deque<TraceRecord> window;
    const auto wsize = static_cast<std::size_t>(opts.switch_window);
    long cum = 0;

    for (long k = 1; k <= opts.max_iter; ++k) {
        const FlagVector prev_flags = s.flags;
        double tau_used = 0.0;
        if (in_ista) {
            IstaStep st = ista_step(p, s.x);
            s.x_prev = std::move(s.x);
            s.x = std::move(st.x_next);
            s.w = std::move(st.w);
            s.flags = std::move(st.flags);
            ++s.iter;
        } else {
            tau_used = (s.t_prev - 1.0) / s.t;
            s = fista_step(p, s);
        }

        const double step = (s.x - s.x_prev).norm();
        const bool changed = s.flags != prev_flags;
        if (changed) {
            ++cum;
            res.last_flag_change = k;
        }
        const bool done = step / std::max(1.0, s.x.norm()) < opts.step_tol;

        TraceRecord rec;
        rec.iter = k;
        rec.step_norm = step;
        rec.flag_change = changed;
        rec.cum_flag_changes = cum;
        rec.tau = in_ista ? 0.0 : s.tau;
        const SpectrumReport* spec = nullptr;
        if (changed) {
            rec.regime = Regime::D;
        } else if (opts.analyze_spectra) {
            spec = &cache.get(s.flags);
            rec.regime = spec->regime;
        }
        if (spec && rec.regime == Regime::A) {
            rec.rho_pred = in_ista ? spec->rho_ista : fista_rate(spec->betas, tau_used);
        }

        const bool emit = k % opts.trace_every == 0 || done || k == opts.max_iter;
        if (emit) {
            rec.objective = objective(p, s.x);
            if (reference) {
                rec.err_to_ref = (s.x - *reference).norm();
            }
            res.trace.push_back(rec);
        }

        res.iterations = k;
        if (done) {
            res.converged = true;
            break;
        }

        if (hybrid && !in_ista && !opts.disable_switch) {
            window.push_back(rec);
            if (window.size() > wsize) {
                window.pop_front();
            }
            bool fire = false;
            if (opts.force_switch_at) {
                fire = k >= *opts.force_switch_at;
            } else if (window.size() == wsize &&
                       std::none_of(window.begin(), window.end(), [](const TraceRecord& r) { return r.flag_change; })) {
                const std::vector<TraceRecord> recent(window.begin(), window.end());
                fire = switch_criterion(recent, cache.get(s.flags), s.tau, opts.switch_window);
            }
            if (fire) {
                in_ista = true;
                res.switch_iter = k;
                res.tau_at_switch = s.tau;
            }
        }
    }

    res.flag_changes = cum;
    res.solution = s.x;
    res.kkt = kkt_residual(p, s.x);
    return res;
}

} // namespace

RunResult run(const Problem& p, Method method, const RunOptions& opts, const std::optional<Vector>& reference)
{
    return drive(p, method, opts, reference);
}

RunResult hybrid_run(const Problem& p, const RunOptions& opts, const std::optional<Vector>& reference)
{
    return drive(p, Method::Hybrid, opts, reference);
}

} // namespace lasso
