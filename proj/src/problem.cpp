#include "lasso/problem.hpp"

#include "lasso/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace lasso {

namespace {

void require_length(Eigen::Index got, Eigen::Index want, const char* what)
{
    if (got != want) {
        throw std::invalid_argument(std::string(what) + ": expected length " + std::to_string(want) +
                                    ", got " + std::to_string(got));
    }
}

} // namespace

double lipschitz_constant(const Matrix& A)
{
    if (A.size() == 0 || A.cwiseAbs().maxCoeff() == 0.0) {
        throw DegenerateInput("lipschitz_constant: matrix is zero");
    }
    if (std::min(A.rows(), A.cols()) > kDenseLipschitzLimit) {
        return lipschitz_constant_power(A);
    }
    // AᵀA and AAᵀ share their nonzero spectrum; decompose the smaller one.
    Matrix gram = A.rows() < A.cols() ? Matrix(A * A.transpose()) : Matrix(A.transpose() * A);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().maxCoeff();
}

double lipschitz_constant_power(const Matrix& A, double rtol, int max_iter)
{
    if (A.size() == 0 || A.cwiseAbs().maxCoeff() == 0.0) {
        throw DegenerateInput("lipschitz_constant_power: matrix is zero");
    }
    const Eigen::Index n = A.cols();
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        // Fixed, non-symmetric start so no eigenvector is systematically missed.
        v[i] = 1.0 + 0.5 * std::sin(static_cast<double>(i + 1));
    }
    v.normalize();
    double estimate = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        Vector u = A.transpose() * (A * v);
        const double next = u.norm();
        if (next == 0.0) {
            throw DegenerateInput("lipschitz_constant_power: iterate collapsed to zero");
        }
        v = u / next;
        if (std::abs(next - estimate) <= rtol * next) {
            return next;
        }
        estimate = next;
    }
    return estimate;
}

Problem::Problem(Matrix A, Vector b, double lambda)
    : A_(std::move(A)), b_(std::move(b)), lambda_(lambda), L_(0.0)
{
    if (A_.rows() < 1 || A_.cols() < 1) {
        throw std::invalid_argument("Problem: A must be at least 1x1");
    }
    require_length(b_.size(), A_.rows(), "Problem: b");
    if (!(lambda_ > 0.0) || !std::isfinite(lambda_)) {
        throw std::invalid_argument("Problem: lambda must be positive and finite");
    }
    if (!A_.allFinite() || !b_.allFinite()) {
        throw std::invalid_argument("Problem: A and b must be finite");
    }
    L_ = lipschitz_constant(A_);
    Atb_ = A_.transpose() * b_;
}

Vector Problem::apply_step_matrix(const Vector& v) const
{
    require_length(v.size(), cols(), "apply_step_matrix");
    return v - (A_.transpose() * (A_ * v)) / L_;
}

Matrix Problem::step_matrix() const
{
    Matrix M = -(A_.transpose() * A_) / L_;
    M.diagonal().array() += 1.0;
    return M;
}

FlagVector::FlagVector(std::vector<std::int8_t> d) : d_(std::move(d))
{
    for (auto v : d_) {
        if (v < -1 || v > 1) {
            throw std::invalid_argument("FlagVector: entries must be in {-1, 0, +1}");
        }
    }
}

FlagVector::FlagVector(std::initializer_list<int> d)
{
    d_.reserve(d.size());
    for (int v : d) {
        if (v < -1 || v > 1) {
            throw std::invalid_argument("FlagVector: entries must be in {-1, 0, +1}");
        }
        d_.push_back(static_cast<std::int8_t>(v));
    }
}

FlagVector FlagVector::zeros(Eigen::Index n)
{
    return FlagVector(std::vector<std::int8_t>(static_cast<std::size_t>(n), 0));
}

std::vector<Eigen::Index> FlagVector::support() const
{
    std::vector<Eigen::Index> idx;
    for (std::size_t i = 0; i < d_.size(); ++i) {
        if (d_[i] != 0) {
            idx.push_back(static_cast<Eigen::Index>(i));
        }
    }
    return idx;
}

Eigen::Index FlagVector::support_size() const
{
    return static_cast<Eigen::Index>(std::count_if(d_.begin(), d_.end(), [](auto v) { return v != 0; }));
}

Vector FlagVector::as_vector() const
{
    Vector out(size());
    for (Eigen::Index i = 0; i < size(); ++i) {
        out[i] = (*this)[i];
    }
    return out;
}

Vector FlagVector::diag_squared() const
{
    return as_vector().cwiseAbs();
}

double objective(const Problem& p, const Vector& x)
{
    require_length(x.size(), p.cols(), "objective: x");
    const Vector r = p.A() * x - p.b();
    return 0.5 * r.squaredNorm() + p.lambda() * x.lpNorm<1>();
}

Vector shrink(const Vector& v, double theta)
{
    if (!(theta > 0.0)) {
        throw std::invalid_argument("shrink: theta must be positive");
    }
    Vector out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double vi = v[i];
        if (vi > theta) {
            out[i] = vi - theta;
        } else if (vi < -theta) {
            out[i] = vi + theta;
        } else {
            out[i] = 0.0;
        }
    }
    return out;
}

FlagVector flags(const Vector& w, double theta)
{
    if (!(theta > 0.0)) {
        throw std::invalid_argument("flags: theta must be positive");
    }
    std::vector<std::int8_t> d(static_cast<std::size_t>(w.size()));
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        d[static_cast<std::size_t>(i)] = w[i] > theta ? 1 : (w[i] < -theta ? -1 : 0);
    }
    return FlagVector(std::move(d));
}

KktReport kkt_residual(const Problem& p, const Vector& x)
{
    require_length(x.size(), p.cols(), "kkt_residual: x");
    KktReport rep;
    rep.nu = p.A().transpose() * (p.b() - p.A() * x) / p.lambda();
    double worst = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double nu = rep.nu[i];
        double v;
        if (x[i] > 0.0) {
            v = std::abs(nu - 1.0);
        } else if (x[i] < 0.0) {
            v = std::abs(nu + 1.0);
        } else {
            v = std::max(0.0, std::abs(nu) - 1.0);
        }
        worst = std::max(worst, v);
    }
    rep.max_violation = worst;

    const double theta = p.theta();
    const Vector w = x + theta * rep.nu;
    double margin = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        margin = std::min({margin, std::abs(w[i] - theta), std::abs(w[i] + theta)});
    }
    rep.complementarity_margin = margin;
    return rep;
}

} // namespace lasso
