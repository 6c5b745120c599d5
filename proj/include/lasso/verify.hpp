#pragma once

#include <optional>
#include <string>
#include <vector>

namespace lasso {

/// One measured quantity against its threshold.
struct CheckResult {
    std::string suite;
    std::string name;
    double measured = 0.0;
    double threshold = 0.0;
    bool pass = false;
    std::string detail;
};

enum class Suite { Equivalence, Spectral, FixedPoint, RegimeB, Rates };

std::optional<Suite> suite_from_string(const std::string& s);
const char* to_string(Suite s);
std::vector<Suite> all_suites();

// Tolerances of the invariant suites.
inline constexpr double kEquivalenceTol = 1e-9;
inline constexpr long kEquivalenceIters = 1000;
inline constexpr double kBetaSlack = 1e-10;
inline constexpr double kGammaDiskSlack = 1e-8;
inline constexpr double kQuadraticResidualTol = 1e-10;
inline constexpr double kRankDeficiencyTol = 1e-7;
inline constexpr double kUnitGammaTol = 1e-8;
inline constexpr double kFixedPointTol = 1e-8;
inline constexpr long kMinPlateau = 20;
inline constexpr double kEigvecResidualTol = 1e-8;
inline constexpr double kStepRatioRelTol = 0.02;
inline constexpr double kIstaRateRelTol = 0.02;
inline constexpr double kFistaRateRelTol = 0.05;

/// Direct ISTA vs its w-recurrence and direct FISTA vs its (w, w_prev) recurrence on
/// `seeds` 20×40 uniform instances, max |x − x_rec|∞ over 1000 passes.
std::vector<CheckResult> verify_equivalence(int seeds);

/// β ∈ [0, 1], γ in the disk |γ − ½| ≤ ½, root residuals, brute-force
/// rank deficiency of N − γI at n ≤ 6, and unit-eigenvalue agreement of R and N.
std::vector<CheckResult> verify_spectral(int draws);

/// R_aug and N_aug fix (w*, 1) and (w*, w*, 1) at solved instances.
std::vector<CheckResult> verify_fixed_point(int seeds);

/// Constant-step plateau, eigenvector residual and frozen-τ step ratios on
/// duplicate-column instances.
std::vector<CheckResult> verify_regime_b(int seeds);

/// Empirical final-regime contraction against the spectral predictions.
std::vector<CheckResult> verify_rates(int seeds);

std::vector<CheckResult> run_suite(Suite s, int seeds);

} // namespace lasso
