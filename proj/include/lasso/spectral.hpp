#pragma once

#include "lasso/problem.hpp"
#include "lasso/recurrence.hpp"

#include <complex>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace lasso {

using Complex = std::complex<double>;

/// Convergence regimes of a flag epoch.
///   A: R has no unit eigenvalue, linear convergence.
///   B: unit eigenvalue with a 2×2 Jordan block in R_aug, constant steps.
///   C: unit eigenvalue, complete eigenvectors.
///   D: flags changed on this step.
enum class Regime { A, B, C, D, Unknown };

const char* to_string(Regime r);
std::optional<Regime> regime_from_string(const std::string& s);

/// β counts as a unit eigenvalue iff β >= 1 − kUnitEigenvalueTol.
inline constexpr double kUnitEigenvalueTol = 1e-9;
/// Least-squares residual above kJordanResidualTol·max(1, ‖h‖) means (I − R)w = h
/// has no solution, i.e. regime B.
inline constexpr double kJordanResidualTol = 1e-8;

/// Eigen-decomposition of I − A_EᵀA_E/L on the support E of `flags`.
/// Eigenvalues are sorted descending; eigenvectors are stored column-wise
/// in the same order (only when requested).
struct SupportEigen {
    std::vector<Eigen::Index> support;
    Vector values;
    Matrix vectors;
};

SupportEigen support_eigen(const Problem& p, const FlagVector& flags, bool with_vectors = false);

/// Spectrum of R = (I − AᵀA/L)D²: the support eigenvalues plus n − |E| zeros,
/// sorted descending. Computed through the symmetric similarity D(I − AᵀA/L)D.
std::vector<double> support_spectrum(const Problem& p, const FlagVector& flags);

/// Roots of γ² − (1+τ)βγ + τβ = 0, larger modulus first. β is first
/// clamped to [0, 1], which only moves eigenvalues off by rounding.
std::pair<Complex, Complex> beta_to_gamma(double beta, double tau);

/// Both roots for every β, in input order.
std::vector<Complex> fista_spectrum(std::span<const double> betas, double tau);

/// max |γ| over β < 1 − kUnitEigenvalueTol; 0 if there is no such β.
double fista_rate(std::span<const double> betas, double tau);

struct JordanTest {
    bool is_constant_step_regime = false;
    double residual = 0.0;
};

/// Dense route: least squares on the assembled n×n system (I − R)w = h.
JordanTest jordan_chain_test(const IstaOperator& op);

/// Support-reduced route. Rows outside E are always solvable, so the minimal
/// residual is the part of h_E in the null space of A_EᵀA_E.
JordanTest jordan_chain_test(const Problem& p, const FlagVector& flags);

struct SpectrumReport {
    FlagVector flags;
    std::vector<double> betas;
    double beta_max_sub1 = 0.0;
    bool has_unit_eigenvalue = false;
    std::vector<Complex> gammas;
    double tau = 0.0;
    Regime regime = Regime::Unknown;
    double rho_ista = 0.0;
    double rho_fista = 0.0;
    JordanTest jordan;
};

struct RegimeLabel {
    Regime label = Regime::Unknown;
    std::string evidence;
};

RegimeLabel classify_regime(const FlagVector& prev_flags, const FlagVector& flags, const SpectrumReport& spectrum,
                            const JordanTest& jordan);

/// Full report for one flag configuration at momentum ratio tau. When
/// `prev_flags` is given and differs from `flags`, the regime is D.
SpectrumReport analyze_spectrum(const Problem& p, const FlagVector& flags, double tau,
                                const std::optional<FlagVector>& prev_flags = std::nullopt);

struct PredictedRates {
    double rho_ista = 0.0;
    double rho_fista = 0.0;
};

/// Local linear rates in regime A. Throws NotApplicable when the spectrum
/// has a unit eigenvalue.
PredictedRates predicted_rates(const SpectrumReport& spectrum, double tau);

struct ConstantStepChecks {
    double eigvec_residual = 0.0;
    double step_ratio = 0.0;
    /// 1/(1 − τ), the ratio a frozen-τ FISTA step should approach.
    double expected_ratio = 1.0;
};

/// ‖R·Δw − Δw‖/‖Δw‖ and ‖Δw_fista‖/‖Δw‖. Throws DegenerateInput if Δw = 0.
ConstantStepChecks constant_step_checks(const IstaOperator& op, const Vector& delta_w, double tau,
                                        const Vector& fista_delta_w);

/// Per-run memo of flag-epoch spectra. The operator is constant while the
/// flags are, so each distinct flag vector is analyzed once (at τ = 0; callers
/// rescale γ with fista_rate for the current τ).
class SpectrumCache {
public:
    explicit SpectrumCache(const Problem& p) : problem_(&p) {}

    const SpectrumReport& get(const FlagVector& flags);
    std::size_t size() const { return cache_.size(); }

private:
    const Problem* problem_;
    std::map<FlagVector, SpectrumReport> cache_;
};

/// 2(‖a‖₂² + ‖b‖₂²) − (‖a‖∞ + ‖b‖∞)², which is never negative.
double inf_norm_pair_gap(const Vector& a, const Vector& b);

} // namespace lasso
