#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <initializer_list>
#include <vector>

namespace lasso {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Largest eigenvalue of AᵀA, i.e. σ_max(A)².
///
/// Uses a full symmetric eigendecomposition of the smaller Gram matrix
/// (AᵀA or AAᵀ) when min(m, n) <= kDenseLipschitzLimit, and power iteration
/// otherwise. Throws DegenerateInput for an all-zero matrix.
double lipschitz_constant(const Matrix& A);

/// Power-iteration estimate of ‖AᵀA‖₂ with relative tolerance `rtol`.
double lipschitz_constant_power(const Matrix& A, double rtol = 1e-12, int max_iter = 10000);

inline constexpr Eigen::Index kDenseLipschitzLimit = 2000;

/// An l1-regularized least squares instance: min ½‖Ax − b‖² + λ‖x‖₁.
///
/// Immutable after construction. L is cached along with Aᵀb since every
/// proximal step needs both.
class Problem {
public:
    Problem(Matrix A, Vector b, double lambda);

    const Matrix& A() const { return A_; }
    const Vector& b() const { return b_; }
    double lambda() const { return lambda_; }
    double lipschitz() const { return L_; }
    /// Shrinkage threshold λ/L.
    double theta() const { return lambda_ / L_; }
    const Vector& Atb() const { return Atb_; }

    Eigen::Index rows() const { return A_.rows(); }
    Eigen::Index cols() const { return A_.cols(); }

    /// (I − AᵀA/L)·v, applied matrix-free.
    Vector apply_step_matrix(const Vector& v) const;
    /// Dense I − AᵀA/L. Analysis only; O(n²m).
    Matrix step_matrix() const;

private:
    Matrix A_;
    Vector b_;
    double lambda_;
    double L_;
    Vector Atb_;
};

/// Ternary support indicator d ∈ {−1, 0, +1}ⁿ.
class FlagVector {
public:
    FlagVector() = default;
    explicit FlagVector(std::vector<std::int8_t> d);
    FlagVector(std::initializer_list<int> d);
    static FlagVector zeros(Eigen::Index n);

    Eigen::Index size() const { return static_cast<Eigen::Index>(d_.size()); }
    int operator[](Eigen::Index i) const { return d_[static_cast<std::size_t>(i)]; }
    const std::vector<std::int8_t>& values() const { return d_; }

    /// Indices with nonzero flag, ascending.
    std::vector<Eigen::Index> support() const;
    Eigen::Index support_size() const;
    /// d as a real vector.
    Vector as_vector() const;
    /// Diagonal of D², i.e. |d_i|.
    Vector diag_squared() const;

    friend bool operator==(const FlagVector&, const FlagVector&) = default;
    friend auto operator<=>(const FlagVector&, const FlagVector&) = default;

private:
    std::vector<std::int8_t> d_;
};

struct KktReport {
    Vector nu;
    double max_violation = 0.0;
    double complementarity_margin = 0.0;
};

double objective(const Problem& p, const Vector& x);

/// Elementwise soft threshold. Throws std::invalid_argument unless theta > 0.
Vector shrink(const Vector& v, double theta);

/// d_i = sign(shrink(w, θ)_i); |w_i| == θ maps to 0.
FlagVector flags(const Vector& w, double theta);

/// Dual certificate ν = Aᵀ(b − Ax)/λ with max-norm KKT violation and the
/// distance of w = x + (λ/L)ν from the shrinkage kinks ±λ/L.
KktReport kkt_residual(const Problem& p, const Vector& x);

} // namespace lasso
