#include "lasso/verify.hpp"

#include "lasso/errors.hpp"
#include "lasso/experiments.hpp"
#include "lasso/random.hpp"
#include "lasso/recurrence.hpp"
#include "lasso/solvers.hpp"
#include "lasso/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace lasso {

namespace {

// Tracks the worst value seen and where it occurred.
struct Worst {
    double value = 0.0;
    std::string where;

    void see(double v, const std::string& at)
    {
        if (v > value || where.empty()) {
            value = std::max(value, v);
            where = at;
        }
    }
};

CheckResult upper(const char* suite, std::string name, const Worst& w, double threshold)
{
    CheckResult c;
    c.suite = suite;
    c.name = std::move(name);
    c.measured = w.value;
    c.threshold = threshold;
    c.pass = w.value <= threshold;
    c.detail = "worst at " + w.where;
    return c;
}

CheckResult lower(const char* suite, std::string name, double measured, double threshold, std::string detail)
{
    CheckResult c;
    c.suite = suite;
    c.name = std::move(name);
    c.measured = measured;
    c.threshold = threshold;
    c.pass = measured >= threshold;
    c.detail = std::move(detail);
    return c;
}

std::string seed_tag(int s)
{
    return "seed " + std::to_string(s);
}

double ista_recurrence_gap(const Problem& p, long iters)
{
    const double theta = p.theta();
    Vector x = Vector::Zero(p.cols());
    Vector w = w_from_x(p, x);
    IstaOperator op = build_ista_operator(p, flags(w, theta));
    double gap = 0.0;
    for (long k = 1; k <= iters; ++k) {
        if (k > 1) {
            const FlagVector d = flags(w, theta);
            if (d != op.flags) {
                op = build_ista_operator(p, d);
            }
            w = ista_recurrence_step(op, w, p).w_next;
        }
        x = ista_step(p, x).x_next;
        gap = std::max(gap, (shrink(w, theta) - x).lpNorm<Eigen::Infinity>());
    }
    return gap;
}

double fista_recurrence_gap(const Problem& p, long iters)
{
    const double theta = p.theta();
    SolverState s = SolverState::start(Vector::Zero(p.cols()));
    Vector w = w_from_x(p, s.x);
    Vector w_prev = w;
    double t_prev = 1.0;
    double t = 1.0;
    double gap = 0.0;
    for (long k = 1; k <= iters; ++k) {
        if (k > 1) {
            const double tau = (t_prev - 1.0) / t;
            const FistaOperator op = build_fista_operator(p, flags(w, theta), flags(w_prev, theta), tau);
            Vector next = fista_recurrence_step(op, w, w_prev, p).w_next;
            w_prev = std::move(w);
            w = std::move(next);
        }
        t_prev = t;
        t = t_next(t);
        s = fista_step(p, s);
        gap = std::max(gap, (shrink(w, theta) - s.x).lpNorm<Eigen::Infinity>());
    }
    return gap;
}

FlagVector random_flags(Rng& rng, Eigen::Index n)
{
    std::vector<std::int8_t> d(static_cast<std::size_t>(n));
    for (auto& v : d) {
        v = static_cast<std::int8_t>(static_cast<int>(rng.below(3)) - 1);
    }
    return FlagVector(std::move(d));
}

Problem random_gaussian_problem(Rng& rng, Eigen::Index m, Eigen::Index n)
{
    Matrix A(m, n);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            A(i, j) = rng.normal();
        }
    }
    Vector b(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        b[i] = rng.normal();
    }
    return Problem(std::move(A), std::move(b), 0.1);
}

double min_singular_value_shifted(const Matrix& N, const Complex& gamma)
{
    Eigen::MatrixXcd S = N.cast<Complex>();
    S.diagonal().array() -= gamma;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(S);
    return svd.singularValues().minCoeff();
}

} // namespace

const char* to_string(Suite s)
{
    switch (s) {
    case Suite::Equivalence:
        return "equivalence";
    case Suite::Spectral:
        return "spectral";
    case Suite::FixedPoint:
        return "fixed-point";
    case Suite::RegimeB:
        return "regimeB";
    case Suite::Rates:
        return "rates";
    }
    return "equivalence";
}

std::optional<Suite> suite_from_string(const std::string& s)
{
    for (Suite x : all_suites()) {
        if (s == to_string(x)) {
            return x;
        }
    }
    return std::nullopt;
}

std::vector<Suite> all_suites()
{
    return {Suite::Equivalence, Suite::Spectral, Suite::FixedPoint, Suite::RegimeB, Suite::Rates};
}

std::vector<CheckResult> verify_equivalence(int seeds)
{
    Worst ista;
    Worst fista;
    for (int s = 1; s <= seeds; ++s) {
        const Problem p = gen_uniform(20, 40, static_cast<std::uint64_t>(s));
        ista.see(ista_recurrence_gap(p, kEquivalenceIters), seed_tag(s));
        fista.see(fista_recurrence_gap(p, kEquivalenceIters), seed_tag(s));
    }
    return {upper("equivalence", "ISTA vs w-recurrence, max |dx|", ista, kEquivalenceTol),
            upper("equivalence", "FISTA vs (w, w_prev)-recurrence, max |dx|", fista, kEquivalenceTol)};
}

std::vector<CheckResult> verify_spectral(int draws)
{
    Worst beta_out;
    Worst disk_out;
    Worst quad;
    Rng rng(2024, 7);
    for (int i = 0; i < draws; ++i) {
        const auto m = static_cast<Eigen::Index>(2 + rng.below(8));
        const auto n = static_cast<Eigen::Index>(2 + rng.below(11));
        const Problem p = random_gaussian_problem(rng, m, n);
        const FlagVector d = random_flags(rng, n);
        const double tau = rng.uniform();
        const std::string at = "draw " + std::to_string(i);
        for (double beta : support_spectrum(p, d)) {
            beta_out.see(std::max({0.0, -beta, beta - 1.0}), at);
            auto [g1, g2] = beta_to_gamma(beta, tau);
            for (const Complex& g : {g1, g2}) {
                disk_out.see(std::max(0.0, std::abs(g - 0.5) - 0.5), at);
                quad.see(std::abs(g * g - (1.0 + tau) * beta * g + tau * beta), at);
            }
        }
    }

    Worst rank;
    for (int i = 0; i < 50; ++i) {
        const auto m = static_cast<Eigen::Index>(1 + rng.below(6));
        const auto n = static_cast<Eigen::Index>(1 + rng.below(6));
        const Problem p = random_gaussian_problem(rng, m, n);
        const FlagVector d = random_flags(rng, n);
        const double tau = rng.uniform();
        const Matrix N = build_fista_operator(p, d, d, tau).block();
        const auto betas = support_spectrum(p, d);
        for (const Complex& g : fista_spectrum(betas, tau)) {
            rank.see(min_singular_value_shifted(N, g), "draw " + std::to_string(i));
        }
    }

    long agree = 0;
    long with_unit = 0;
    const long unit_draws = 100;
    for (long i = 0; i < unit_draws; ++i) {
        const Problem p = random_gaussian_problem(rng, 4, 8);
        const FlagVector d = random_flags(rng, 8);
        const double tau = 0.95 * rng.uniform();
        const bool r_unit = analyze_spectrum(p, d, tau).has_unit_eigenvalue;
        const Matrix N = build_fista_operator(p, d, d, tau).block();
        Eigen::EigenSolver<Matrix> es(N, false);
        bool n_unit = false;
        for (Eigen::Index j = 0; j < es.eigenvalues().size(); ++j) {
            n_unit = n_unit || std::abs(es.eigenvalues()[j] - Complex(1.0, 0.0)) <= kUnitGammaTol;
        }
        agree += r_unit == n_unit ? 1 : 0;
        with_unit += r_unit ? 1 : 0;
    }

    std::vector<CheckResult> out{
        upper("spectral", "beta outside [0,1]", beta_out, kBetaSlack),
        upper("spectral", "gamma outside disk |g-1/2|<=1/2", disk_out, kGammaDiskSlack),
        upper("spectral", "quadratic root residual", quad, kQuadraticResidualTol),
        upper("spectral", "max sigma_min(N - gamma I), n<=6", rank, kRankDeficiencyTol),
    };
    std::ostringstream det;
    det << agree << "/" << unit_draws << " agree, " << with_unit << " with unit eigenvalue";
    out.push_back(lower("spectral", "unit eigenvalue of R <=> gamma=1 in N", static_cast<double>(agree),
                        static_cast<double>(unit_draws), det.str()));
    return out;
}

std::vector<CheckResult> verify_fixed_point(int seeds)
{
    Worst ista;
    Worst fista;
    for (int s = 1; s <= seeds; ++s) {
        const Problem p = gen_uniform(20, 40, static_cast<std::uint64_t>(s));
        const Vector x = reference_solution(p);
        const Vector w = fixed_point_w(x, kkt_residual(p, x).nu, p);
        const FlagVector d = flags(w, p.theta());
        ista.see(check_fixed_point(build_ista_operator(p, d).augmented(), augment_ista(w)), seed_tag(s));
        for (double tau : {0.0, 0.5, 0.9}) {
            const FistaOperator op = build_fista_operator(p, d, d, tau);
            fista.see(check_fixed_point(op.augmented(), augment_fista(w, w)), seed_tag(s));
        }
    }
    return {upper("fixed-point", "|R_aug (w*,1) - (w*,1)|", ista, kFixedPointTol),
            upper("fixed-point", "|N_aug (w*,w*,1) - (w*,w*,1)|", fista, kFixedPointTol)};
}

std::vector<CheckResult> verify_regime_b(int seeds)
{
    const std::vector<double> taus{0.0, 0.5, 0.9};
    long min_plateau = -1;
    std::string plateau_at;
    Worst eig;
    Worst ratio;
    int regime_b = 0;
    for (int s = 1; s <= seeds; ++s) {
        const auto inst = gen_duplicate_column(20, 8, static_cast<std::uint64_t>(s));
        const RegimeBStudy st = regime_b_study(inst, taus);
        if (min_plateau < 0 || st.plateau_length < min_plateau) {
            min_plateau = st.plateau_length;
            plateau_at = seed_tag(s);
        }
        eig.see(st.eigvec_residual, seed_tag(s));
        regime_b += st.regime == Regime::B ? 1 : 0;
        for (std::size_t i = 0; i < st.taus.size(); ++i) {
            ratio.see(std::abs(st.step_ratios[i] / st.expected_ratios[i] - 1.0),
                      seed_tag(s) + ", tau " + std::to_string(st.taus[i]));
        }
    }
    return {lower("regimeB", "shortest ISTA plateau (iterations)", static_cast<double>(min_plateau),
                  static_cast<double>(kMinPlateau), "at " + plateau_at),
            upper("regimeB", "|R dw - dw| / |dw|", eig, kEigvecResidualTol),
            lower("regimeB", "instances classified B", regime_b, seeds, ""),
            upper("regimeB", "frozen-tau step ratio vs 1/(1-tau), rel. error", ratio, kStepRatioRelTol)};
}

std::vector<CheckResult> verify_rates(int seeds)
{
    Worst ista;
    Worst fista;
    int measured = 0;
    RunOptions o;
    o.step_tol = 1e-13;
    for (int s = 1; s <= seeds; ++s) {
        const Problem p = gen_uniform(20, 40, static_cast<std::uint64_t>(s));
        const Vector ref = reference_solution(p);
        for (Method m : {Method::Ista, Method::Fista}) {
            const RunResult r = run(p, m, o, ref);
            const ExperimentReport rep = summarize_run(p, m, r, {});
            Worst& w = m == Method::Ista ? ista : fista;
            if (!rep.rho_empirical || !rep.rho_predicted) {
                w.see(1.0, seed_tag(s) + " (no final-regime rate)");
                continue;
            }
            ++measured;
            w.see(std::abs(*rep.rho_empirical / *rep.rho_predicted - 1.0), seed_tag(s));
        }
    }
    return {upper("rates", "ISTA empirical vs rho_ista, rel. error", ista, kIstaRateRelTol),
            upper("rates", "FISTA envelope vs rho_fista, rel. error", fista, kFistaRateRelTol),
            lower("rates", "runs with a measurable final-regime rate", measured, 2 * seeds, "")};
}

std::vector<CheckResult> run_suite(Suite s, int seeds)
{
    switch (s) {
    case Suite::Equivalence:
        return verify_equivalence(seeds);
    case Suite::Spectral:
        return verify_spectral(std::max(200, seeds));
    case Suite::FixedPoint:
        return verify_fixed_point(seeds);
    case Suite::RegimeB:
        return verify_regime_b(std::min(seeds, 5));
    case Suite::Rates:
        return verify_rates(seeds);
    }
    return {};
}

} // namespace lasso
