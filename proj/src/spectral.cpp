#include "lasso/spectral.hpp"

#include "lasso/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace lasso {

namespace {

Matrix support_columns(const Matrix& A, const std::vector<Eigen::Index>& support)
{
    Matrix out(A.rows(), static_cast<Eigen::Index>(support.size()));
    for (std::size_t k = 0; k < support.size(); ++k) {
        out.col(static_cast<Eigen::Index>(k)) = A.col(support[k]);
    }
    return out;
}

bool is_unit(double beta)
{
    return beta >= 1.0 - kUnitEigenvalueTol;
}

JordanTest jordan_from_eigen(const Problem& p, const FlagVector& flags, const SupportEigen& eig)
{
    if (eig.values.size() == 0 || !is_unit(eig.values[0])) {
        return {};
    }
    const double theta = p.theta();
    const double L = p.lipschitz();
    const Matrix AE = support_columns(p.A(), eig.support);
    Vector dE(static_cast<Eigen::Index>(eig.support.size()));
    for (std::size_t k = 0; k < eig.support.size(); ++k) {
        dE[static_cast<Eigen::Index>(k)] = flags[eig.support[k]];
    }
    // h = −θd + Aᵀ(A_E θ d_E)/L + Aᵀb/L
    const Vector Ad = AE * (theta * dE);
    Vector h = p.A().transpose() * Ad / L + p.Atb() / L;
    for (std::size_t k = 0; k < eig.support.size(); ++k) {
        h[eig.support[k]] -= theta * dE[static_cast<Eigen::Index>(k)];
    }
    Vector hE(dE.size());
    for (std::size_t k = 0; k < eig.support.size(); ++k) {
        hE[static_cast<Eigen::Index>(k)] = h[eig.support[k]];
    }
    double sq = 0.0;
    for (Eigen::Index j = 0; j < eig.values.size() && is_unit(eig.values[j]); ++j) {
        const double c = eig.vectors.col(j).dot(hE);
        sq += c * c;
    }
    JordanTest out;
    out.residual = std::sqrt(sq);
    out.is_constant_step_regime = out.residual > kJordanResidualTol * std::max(1.0, h.norm());
    return out;
}

} // namespace

const char* to_string(Regime r)
{
    switch (r) {
    case Regime::A:
        return "A";
    case Regime::B:
        return "B";
    case Regime::C:
        return "C";
    case Regime::D:
        return "D";
    case Regime::Unknown:
        break;
    }
    return "unknown";
}

std::optional<Regime> regime_from_string(const std::string& s)
{
    for (Regime r : {Regime::A, Regime::B, Regime::C, Regime::D, Regime::Unknown}) {
        if (s == to_string(r)) {
            return r;
        }
    }
    return std::nullopt;
}

SupportEigen support_eigen(const Problem& p, const FlagVector& flags, bool with_vectors)
{
    if (flags.size() != p.cols()) {
        throw std::invalid_argument("support_eigen: flag length does not match problem");
    }
    SupportEigen out;
    out.support = flags.support();
    const auto k = static_cast<Eigen::Index>(out.support.size());
    if (k == 0) {
        out.values.resize(0);
        out.vectors.resize(0, 0);
        return out;
    }
    const Matrix AE = support_columns(p.A(), out.support);
    Matrix S = -(AE.transpose() * AE) / p.lipschitz();
    S.diagonal().array() += 1.0;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(S, with_vectors ? Eigen::ComputeEigenvectors
                                                              : Eigen::EigenvaluesOnly);
    // Eigen sorts ascending.
    out.values = eig.eigenvalues().reverse();
    if (with_vectors) {
        out.vectors = eig.eigenvectors().rowwise().reverse();
    }
    return out;
}

std::vector<double> support_spectrum(const Problem& p, const FlagVector& flags)
{
    const SupportEigen eig = support_eigen(p, flags);
    std::vector<double> betas(eig.values.data(), eig.values.data() + eig.values.size());
    betas.resize(static_cast<std::size_t>(p.cols()), 0.0);
    std::sort(betas.begin(), betas.end(), std::greater<>());
    return betas;
}

std::pair<Complex, Complex> beta_to_gamma(double beta, double tau)
{
    // The root map amplifies rounding near β = 0 by a square root
    // (β = −1e-16 gives γ ≈ −1e-8), so project onto [0, 1] first.
    beta = std::clamp(beta, 0.0, 1.0);
    const double s = (1.0 + tau) * beta;
    // disc = s² − 4τβ, factored so its sign matches (1+τ)²β < 4τ exactly.
    const double disc = beta * ((1.0 + tau) * (1.0 + tau) * beta - 4.0 * tau);
    if (disc < 0.0) {
        const double re = 0.5 * s;
        const double im = 0.5 * std::sqrt(-disc);
        return {Complex(re, im), Complex(re, -im)};
    }
    const double r = std::sqrt(disc);
    const double g1 = s >= 0.0 ? 0.5 * (s + r) : 0.5 * (s - r);
    const double g2 = g1 != 0.0 ? tau * beta / g1 : 0.0;
    return {Complex(g1, 0.0), Complex(g2, 0.0)};
}

std::vector<Complex> fista_spectrum(std::span<const double> betas, double tau)
{
    std::vector<Complex> out;
    out.reserve(2 * betas.size());
    for (double beta : betas) {
        auto [g1, g2] = beta_to_gamma(beta, tau);
        out.push_back(g1);
        out.push_back(g2);
    }
    return out;
}

double fista_rate(std::span<const double> betas, double tau)
{
    double rho = 0.0;
    for (double beta : betas) {
        if (is_unit(beta)) {
            continue;
        }
        auto [g1, g2] = beta_to_gamma(beta, tau);
        rho = std::max({rho, std::abs(g1), std::abs(g2)});
    }
    return rho;
}

JordanTest jordan_chain_test(const IstaOperator& op)
{
    const Eigen::Index n = op.R.rows();
    const auto support = op.flags.support();
    if (support.empty()) {
        return {};
    }
    // On the support R_EE = (I − AᵀA/L)_EE, which is symmetric.
    const auto k = static_cast<Eigen::Index>(support.size());
    Matrix S(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        for (Eigen::Index j = 0; j < k; ++j) {
            S(i, j) = op.R(support[static_cast<std::size_t>(i)], support[static_cast<std::size_t>(j)]);
        }
    }
    S = 0.5 * (S + S.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(S, Eigen::EigenvaluesOnly);
    if (!is_unit(eig.eigenvalues().maxCoeff())) {
        return {};
    }
    Matrix IminusR = -op.R;
    IminusR.diagonal().array() += 1.0;
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(n, n);
    cod.setThreshold(kUnitEigenvalueTol);
    cod.compute(IminusR);
    const Vector w = cod.solve(op.h);
    JordanTest out;
    out.residual = (IminusR * w - op.h).norm();
    out.is_constant_step_regime = out.residual > kJordanResidualTol * std::max(1.0, op.h.norm());
    return out;
}

JordanTest jordan_chain_test(const Problem& p, const FlagVector& flags)
{
    return jordan_from_eigen(p, flags, support_eigen(p, flags, true));
}

RegimeLabel classify_regime(const FlagVector& prev_flags, const FlagVector& flags, const SpectrumReport& spectrum,
                            const JordanTest& jordan)
{
    std::ostringstream ev;
    RegimeLabel out;
    if (prev_flags != flags) {
        out.label = Regime::D;
        ev << "flag change";
    } else if (spectrum.has_unit_eigenvalue && jordan.is_constant_step_regime) {
        out.label = Regime::B;
        ev << "unit eigenvalue; Jordan chain (affine residual " << jordan.residual << ")";
    } else if (spectrum.has_unit_eigenvalue) {
        out.label = Regime::C;
        ev << "unit eigenvalue; complete eigenvectors (affine residual " << jordan.residual << ")";
    } else {
        out.label = Regime::A;
        ev << "no unit eigenvalue; beta_max " << spectrum.beta_max_sub1;
    }
    out.evidence = ev.str();
    return out;
}

SpectrumReport analyze_spectrum(const Problem& p, const FlagVector& flags, double tau,
                                const std::optional<FlagVector>& prev_flags)
{
    const SupportEigen eig = support_eigen(p, flags, true);
    SpectrumReport rep;
    rep.flags = flags;
    rep.betas.assign(eig.values.data(), eig.values.data() + eig.values.size());
    rep.betas.resize(static_cast<std::size_t>(p.cols()), 0.0);
    std::sort(rep.betas.begin(), rep.betas.end(), std::greater<>());
    rep.has_unit_eigenvalue = is_unit(rep.betas.front());
    for (double b : rep.betas) {
        if (!is_unit(b)) {
            rep.beta_max_sub1 = b;
            break;
        }
    }
    rep.tau = tau;
    rep.gammas = fista_spectrum(rep.betas, tau);
    rep.jordan = jordan_from_eigen(p, flags, eig);
    rep.rho_ista = rep.beta_max_sub1;
    rep.rho_fista = fista_rate(rep.betas, tau);
    rep.regime = classify_regime(prev_flags.value_or(flags), flags, rep, rep.jordan).label;
    return rep;
}

PredictedRates predicted_rates(const SpectrumReport& spectrum, double tau)
{
    if (spectrum.has_unit_eigenvalue) {
        throw NotApplicable("predicted_rates: spectrum has a unit eigenvalue (regime B or C)");
    }
    PredictedRates out;
    out.rho_ista = spectrum.betas.empty() ? 0.0 : std::max(0.0, spectrum.betas.front());
    out.rho_fista = fista_rate(spectrum.betas, tau);
    return out;
}

ConstantStepChecks constant_step_checks(const IstaOperator& op, const Vector& delta_w, double tau,
                                        const Vector& fista_delta_w)
{
    const double nrm = delta_w.norm();
    if (nrm == 0.0) {
        throw DegenerateInput("constant_step_checks: zero step vector");
    }
    if (!(tau >= 0.0 && tau < 1.0)) {
        throw std::invalid_argument("constant_step_checks: tau must lie in [0, 1)");
    }
    ConstantStepChecks out;
    out.eigvec_residual = (op.R * delta_w - delta_w).norm() / nrm;
    out.step_ratio = fista_delta_w.norm() / nrm;
    out.expected_ratio = 1.0 / (1.0 - tau);
    return out;
}

const SpectrumReport& SpectrumCache::get(const FlagVector& flags)
{
    auto it = cache_.find(flags);
    if (it == cache_.end()) {
        it = cache_.emplace(flags, analyze_spectrum(*problem_, flags, 0.0)).first;
    }
    return it->second;
}

double inf_norm_pair_gap(const Vector& a, const Vector& b)
{
    const double s = a.lpNorm<Eigen::Infinity>() + b.lpNorm<Eigen::Infinity>();
    return 2.0 * (a.squaredNorm() + b.squaredNorm()) - s * s;
}

} // namespace lasso
