#pragma once

#include "lasso/experiments.hpp"
#include "lasso/recurrence.hpp"
#include "lasso/solvers.hpp"
#include "lasso/spectral.hpp"

#include "json.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>

namespace lasso {

/// Exact CSV header of trace files.
inline constexpr const char* kTraceCsvHeader =
    "iter,objective,step_norm,err_to_ref,flag_change,cum_flag_changes,regime,tau,rho_pred";

/// One row per record. Booleans are 0/1, reals use 17 significant digits,
/// absent optionals are empty fields.
void write_trace_csv(std::ostream& os, std::span<const TraceRecord> trace);
void save_trace_csv(const std::filesystem::path& path, std::span<const TraceRecord> trace);
/// Throws std::invalid_argument on a malformed file.
std::vector<TraceRecord> read_trace_csv(std::istream& is);

nlohmann::json trace_to_json(std::span<const TraceRecord> trace);

/// {"flags", "betas", "gammas": [[re, im], ...], "tau", "regime", "rho_ista",
///  "rho_fista", "unit_eigenvalue"} plus "beta_max" and "jordan_residual".
nlohmann::json spectrum_to_json(const SpectrumReport& s);

/// {"kind": "R_aug"|"N_aug", "dim", "entries": row-major, "flags", "tau": float|null}.
nlohmann::json operator_to_json(const AugmentedOperator& op, const FlagVector& flags, std::optional<double> tau);

nlohmann::json report_to_json(const ExperimentReport& r, std::uint64_t seed);

nlohmann::json flags_to_json(const FlagVector& f);

} // namespace lasso
