#include "lasso/problem_io.hpp"

#include "lasso/errors.hpp"

#include <fstream>
#include <stdexcept>

namespace lasso {

using nlohmann::json;

json problem_to_json(const Problem& p, const json& meta)
{
    const Matrix& A = p.A();
    std::vector<double> entries;
    entries.reserve(static_cast<std::size_t>(A.size()));
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        for (Eigen::Index j = 0; j < A.cols(); ++j) {
            entries.push_back(A(i, j));
        }
    }
    json j;
    j["m"] = p.rows();
    j["n"] = p.cols();
    j["lambda"] = p.lambda();
    j["A"] = std::move(entries);
    j["b"] = vector_to_json(p.b());
    j["meta"] = meta.is_null() ? json::object() : meta;
    return j;
}

Problem problem_from_json(const json& j)
{
    try {
        const auto m = j.at("m").get<Eigen::Index>();
        const auto n = j.at("n").get<Eigen::Index>();
        const auto lambda = j.at("lambda").get<double>();
        const auto& a = j.at("A");
        const auto& b = j.at("b");
        if (m < 1 || n < 1) {
            throw std::invalid_argument("problem file: m and n must be positive");
        }
        if (!a.is_array() || static_cast<Eigen::Index>(a.size()) != m * n) {
            throw std::invalid_argument("problem file: A must hold m*n entries");
        }
        if (!b.is_array() || static_cast<Eigen::Index>(b.size()) != m) {
            throw std::invalid_argument("problem file: b must hold m entries");
        }
        Matrix A(m, n);
        for (Eigen::Index i = 0; i < m; ++i) {
            for (Eigen::Index k = 0; k < n; ++k) {
                A(i, k) = a[static_cast<std::size_t>(i * n + k)].get<double>();
            }
        }
        return Problem(std::move(A), vector_from_json(b), lambda);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("problem file: ") + e.what());
    }
}

void save_problem(const std::filesystem::path& path, const Problem& p, const json& meta)
{
    write_json(path, problem_to_json(p, meta));
}

ProblemFile load_problem(const std::filesystem::path& path)
{
    json j = read_json(path);
    Problem p = problem_from_json(j);
    json meta = j.contains("meta") ? j["meta"] : json::object();
    return {std::move(p), std::move(meta)};
}

json vector_to_json(const Vector& v)
{
    return std::vector<double>(v.data(), v.data() + v.size());
}

Vector vector_from_json(const json& j, const std::string& key)
{
    const json& arr = j.is_object() ? j.at(key) : j;
    if (!arr.is_array()) {
        throw std::invalid_argument("expected a JSON array of numbers");
    }
    Vector v(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i) {
        v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
    }
    return v;
}

void write_json(const std::filesystem::path& path, const json& j)
{
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open for writing: " + path.string());
    }
    out << j.dump(1) << '\n';
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

json read_json(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open for reading: " + path.string());
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(path.string() + ": " + e.what());
    }
}

} // namespace lasso
