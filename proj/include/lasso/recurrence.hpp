#pragma once

#include "lasso/problem.hpp"

#include <optional>
#include <utility>

namespace lasso {

// Matrix-recurrence form of ISTA and FISTA in the auxiliary variable
//
//     w = (I − AᵀA/L)·x + Aᵀb/L,      x_next = shrink(w, λ/L) = D²w − (λ/L)d,
//
// with d = flags(w, λ/L) and D = diag(d). Everything here assembles dense
// n×n (or (2n+1)×(2n+1)) matrices and is meant for analysis and tests; the
// solvers never build these.

enum class AugmentedKind { R_aug, N_aug };

/// Homogeneous form: last row is exactly (0, …, 0, 1).
struct AugmentedOperator {
    Matrix M;
    AugmentedKind kind = AugmentedKind::R_aug;
};

/// R = (I − AᵀA/L)D²,  h = −(I − AᵀA/L)(λ/L)d + Aᵀb/L.
struct IstaOperator {
    Matrix R;
    Vector h;
    FlagVector flags;

    AugmentedOperator augmented() const;
};

/// One step w⁺ = P·w + Q·w_prev + h̄ with
///   P = (1+τ)(I − AᵀA/L)D²,  Q = −τ(I − AᵀA/L)D_prev²,
///   h̄ = (I − AᵀA/L)(−(1+τ)(λ/L)d + τ(λ/L)d_prev) + Aᵀb/L.
struct FistaOperator {
    Matrix P;
    Matrix Q;
    Vector hbar;
    double tau = 0.0;
    FlagVector flags;
    FlagVector flags_prev;

    /// N = [[P, Q], [I, 0]], size 2n×2n.
    Matrix block() const;
    /// N_aug = [[P, Q, h̄], [I, 0, 0], [0, 0, 1]], size (2n+1)×(2n+1).
    AugmentedOperator augmented() const;
};

struct RecurrenceStep {
    Vector w_next;
    FlagVector flags_next;
};

/// (I − AᵀA/L)·v + Aᵀb/L.
Vector w_from_x(const Problem& p, const Vector& v);

IstaOperator build_ista_operator(const Problem& p, const FlagVector& flags);

/// Throws std::invalid_argument unless 0 <= tau < 1.
FistaOperator build_fista_operator(const Problem& p, const FlagVector& flags, const FlagVector& flags_prev,
                                   double tau);

/// w_next = R·w + h. Throws RebuildRequired if op.flags != flags(w, λ/L).
/// flags_next is taken from w_next so that it matches the next application.
RecurrenceStep ista_recurrence_step(const IstaOperator& op, const Vector& w, const Problem& p);

/// w_next = P·w + Q·w_prev + h̄. Both flag vectors are checked against the
/// iterates; a mismatch throws RebuildRequired.
RecurrenceStep fista_recurrence_step(const FistaOperator& op, const Vector& w, const Vector& w_prev,
                                     const Problem& p);

/// w* = x* + (λ/L)ν for a KKT pair. Throws std::invalid_argument when the
/// pair violates the KKT conditions by more than `tol` (max norm).
Vector fixed_point_w(const Vector& x_star, const Vector& nu, const Problem& p, double tol = 1e-8);

/// ‖M·w_aug − w_aug‖₂. Requires w_aug's last entry to be exactly 1.
double check_fixed_point(const AugmentedOperator& aug, const Vector& w_aug);

/// (w, 1) and (w, w, 1).
Vector augment_ista(const Vector& w);
Vector augment_fista(const Vector& w, const Vector& w_prev);

/// Split N_aug = N'_aug + (1 − τ)·ΔN_aug where N'_aug is N_aug with τ = 1.
std::pair<Matrix, Matrix> unit_tau_split(const Problem& p, const FlagVector& flags, const FlagVector& flags_prev);

} // namespace lasso
