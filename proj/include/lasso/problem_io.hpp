#pragma once

#include "lasso/problem.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>

namespace lasso {

// Problem file layout:
//   {"m": int, "n": int, "lambda": float, "A": [row-major, m*n], "b": [m], "meta": {...}}
// Doubles are written in shortest round-trip form, so load(save(p)) is exact.

nlohmann::json problem_to_json(const Problem& p, const nlohmann::json& meta = nlohmann::json::object());

/// Throws std::invalid_argument on schema or dimension errors.
Problem problem_from_json(const nlohmann::json& j);

struct ProblemFile {
    Problem problem;
    nlohmann::json meta;
};

void save_problem(const std::filesystem::path& path, const Problem& p,
                  const nlohmann::json& meta = nlohmann::json::object());
ProblemFile load_problem(const std::filesystem::path& path);

nlohmann::json vector_to_json(const Vector& v);
/// Accepts a bare array or an object carrying the array under `key`.
Vector vector_from_json(const nlohmann::json& j, const std::string& key = "x");

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

} // namespace lasso
