#include "lasso/report_io.hpp"

#include "lasso/errors.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lasso {

namespace {

std::string fmt17(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <class T>
nlohmann::json opt_json(const std::optional<T>& v)
{
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& s)
{
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) {
        throw std::invalid_argument("trailing characters in '" + s + "'");
    }
    return v;
}

long parse_long(const std::string& s)
{
    std::size_t pos = 0;
    const long v = std::stol(s, &pos);
    if (pos != s.size()) {
        throw std::invalid_argument("trailing characters in '" + s + "'");
    }
    return v;
}

} // namespace

void write_trace_csv(std::ostream& os, std::span<const TraceRecord> trace)
{
    os << kTraceCsvHeader << '\n';
    for (const TraceRecord& r : trace) {
        os << r.iter << ',' << fmt17(r.objective) << ',' << fmt17(r.step_norm) << ','
           << (r.err_to_ref ? fmt17(*r.err_to_ref) : "") << ',' << (r.flag_change ? 1 : 0) << ','
           << r.cum_flag_changes << ',' << to_string(r.regime) << ',' << fmt17(r.tau) << ','
           << (r.rho_pred ? fmt17(*r.rho_pred) : "") << '\n';
    }
}

void save_trace_csv(const std::filesystem::path& path, std::span<const TraceRecord> trace)
{
    std::ofstream os(path);
    if (!os) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    write_trace_csv(os, trace);
    if (!os) {
        throw IoError("write failed: " + path.string());
    }
}

std::vector<TraceRecord> read_trace_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line) || split_csv(line) != split_csv(kTraceCsvHeader)) {
        throw std::invalid_argument("read_trace_csv: header mismatch");
    }
    std::vector<TraceRecord> out;
    while (std::getline(is, line)) {
        if (line.empty()) {
            continue;
        }
        const auto f = split_csv(line);
        if (f.size() != 9) {
            throw std::invalid_argument("read_trace_csv: expected 9 fields, got " + std::to_string(f.size()));
        }
        try {
            TraceRecord r;
            r.iter = parse_long(f[0]);
            r.objective = parse_double(f[1]);
            r.step_norm = parse_double(f[2]);
            if (!f[3].empty()) {
                r.err_to_ref = parse_double(f[3]);
            }
            if (f[4] != "0" && f[4] != "1") {
                throw std::invalid_argument("flag_change must be 0 or 1");
            }
            r.flag_change = f[4] == "1";
            r.cum_flag_changes = parse_long(f[5]);
            const auto reg = regime_from_string(f[6]);
            if (!reg) {
                throw std::invalid_argument("unknown regime '" + f[6] + "'");
            }
            r.regime = *reg;
            r.tau = parse_double(f[7]);
            if (!f[8].empty()) {
                r.rho_pred = parse_double(f[8]);
            }
            out.push_back(r);
        } catch (const std::logic_error& e) {
            throw std::invalid_argument(std::string("read_trace_csv: ") + e.what());
        }
    }
    return out;
}

nlohmann::json trace_to_json(std::span<const TraceRecord> trace)
{
    nlohmann::json arr = nlohmann::json::array();
    for (const TraceRecord& r : trace) {
        arr.push_back({{"iter", r.iter},
                       {"objective", r.objective},
                       {"step_norm", r.step_norm},
                       {"err_to_ref", opt_json(r.err_to_ref)},
                       {"flag_change", r.flag_change},
                       {"cum_flag_changes", r.cum_flag_changes},
                       {"regime", to_string(r.regime)},
                       {"tau", r.tau},
                       {"rho_pred", opt_json(r.rho_pred)}});
    }
    return arr;
}

nlohmann::json flags_to_json(const FlagVector& f)
{
    nlohmann::json arr = nlohmann::json::array();
    for (auto v : f.values()) {
        arr.push_back(static_cast<int>(v));
    }
    return arr;
}

nlohmann::json spectrum_to_json(const SpectrumReport& s)
{
    nlohmann::json gammas = nlohmann::json::array();
    for (const Complex& g : s.gammas) {
        gammas.push_back({g.real(), g.imag()});
    }
    return {{"flags", flags_to_json(s.flags)},
            {"betas", s.betas},
            {"gammas", gammas},
            {"tau", s.tau},
            {"regime", to_string(s.regime)},
            {"rho_ista", s.rho_ista},
            {"rho_fista", s.rho_fista},
            {"unit_eigenvalue", s.has_unit_eigenvalue},
            {"beta_max", s.beta_max_sub1},
            {"jordan_residual", s.jordan.residual}};
}

nlohmann::json operator_to_json(const AugmentedOperator& op, const FlagVector& flags, std::optional<double> tau)
{
    std::vector<double> entries;
    entries.reserve(static_cast<std::size_t>(op.M.size()));
    for (Eigen::Index i = 0; i < op.M.rows(); ++i) {
        for (Eigen::Index j = 0; j < op.M.cols(); ++j) {
            entries.push_back(op.M(i, j));
        }
    }
    return {{"kind", op.kind == AugmentedKind::R_aug ? "R_aug" : "N_aug"},
            {"dim", op.M.rows()},
            {"entries", entries},
            {"flags", flags_to_json(flags)},
            {"tau", opt_json(tau)}};
}

nlohmann::json report_to_json(const ExperimentReport& r, std::uint64_t seed)
{
    return {{"problem_meta", r.problem_meta},
            {"method", to_string(r.method)},
            {"total_iters", r.total_iters},
            {"iters_to_final_regime", r.iters_to_final_regime},
            {"flag_change_count", r.flag_change_count},
            {"rho_predicted", opt_json(r.rho_predicted)},
            {"rho_empirical", opt_json(r.rho_empirical)},
            {"switch_iter", opt_json(r.switch_iter)},
            {"recovery_rel_error", opt_json(r.recovery_rel_error)},
            {"converged", r.converged},
            {"kkt_violation", r.kkt_violation},
            {"tau_at_arrival", r.tau_at_arrival},
            {"beta_max", r.beta_max},
            {"final_regime", to_string(r.final_regime)},
            {"trace_file", r.trace_file},
            {"seed", seed}};
}

} // namespace lasso
