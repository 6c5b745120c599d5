#include "lasso/recurrence.hpp"

#include "lasso/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lasso {

namespace {

void require_size(Eigen::Index got, Eigen::Index want, const char* what)
{
    if (got != want) {
        throw std::invalid_argument(std::string(what) + ": dimension mismatch (" + std::to_string(got) +
                                    " vs " + std::to_string(want) + ")");
    }
}

Matrix scale_columns(const Matrix& M, const Vector& s)
{
    return M * s.asDiagonal();
}

} // namespace

AugmentedOperator IstaOperator::augmented() const
{
    const Eigen::Index n = R.rows();
    AugmentedOperator aug;
    aug.kind = AugmentedKind::R_aug;
    aug.M = Matrix::Zero(n + 1, n + 1);
    aug.M.topLeftCorner(n, n) = R;
    aug.M.topRightCorner(n, 1) = h;
    aug.M(n, n) = 1.0;
    return aug;
}

Matrix FistaOperator::block() const
{
    const Eigen::Index n = P.rows();
    Matrix N = Matrix::Zero(2 * n, 2 * n);
    N.topLeftCorner(n, n) = P;
    N.topRightCorner(n, n) = Q;
    N.bottomLeftCorner(n, n).setIdentity();
    return N;
}

AugmentedOperator FistaOperator::augmented() const
{
    const Eigen::Index n = P.rows();
    AugmentedOperator aug;
    aug.kind = AugmentedKind::N_aug;
    aug.M = Matrix::Zero(2 * n + 1, 2 * n + 1);
    aug.M.topLeftCorner(2 * n, 2 * n) = block();
    aug.M.block(0, 2 * n, n, 1) = hbar;
    aug.M(2 * n, 2 * n) = 1.0;
    return aug;
}

Vector w_from_x(const Problem& p, const Vector& v)
{
    require_size(v.size(), p.cols(), "w_from_x");
    return p.apply_step_matrix(v) + p.Atb() / p.lipschitz();
}

IstaOperator build_ista_operator(const Problem& p, const FlagVector& flags)
{
    require_size(flags.size(), p.cols(), "build_ista_operator");
    const Matrix M = p.step_matrix();
    IstaOperator op;
    op.R = scale_columns(M, flags.diag_squared());
    op.h = -(M * (p.theta() * flags.as_vector())) + p.Atb() / p.lipschitz();
    op.flags = flags;
    return op;
}

FistaOperator build_fista_operator(const Problem& p, const FlagVector& flags, const FlagVector& flags_prev,
                                   double tau)
{
    require_size(flags.size(), p.cols(), "build_fista_operator");
    require_size(flags_prev.size(), p.cols(), "build_fista_operator");
    if (!(tau >= 0.0 && tau < 1.0)) {
        throw std::invalid_argument("build_fista_operator: tau must lie in [0, 1)");
    }
    const Matrix M = p.step_matrix();
    const double theta = p.theta();
    FistaOperator op;
    op.P = (1.0 + tau) * scale_columns(M, flags.diag_squared());
    op.Q = -tau * scale_columns(M, flags_prev.diag_squared());
    op.hbar = M * (-(1.0 + tau) * theta * flags.as_vector() + tau * theta * flags_prev.as_vector()) +
              p.Atb() / p.lipschitz();
    op.tau = tau;
    op.flags = flags;
    op.flags_prev = flags_prev;
    return op;
}

RecurrenceStep ista_recurrence_step(const IstaOperator& op, const Vector& w, const Problem& p)
{
    require_size(w.size(), op.R.cols(), "ista_recurrence_step");
    if (flags(w, p.theta()) != op.flags) {
        throw RebuildRequired("ista_recurrence_step: operator flags do not match w");
    }
    RecurrenceStep step;
    step.w_next = op.R * w + op.h;
    step.flags_next = flags(step.w_next, p.theta());
    return step;
}

RecurrenceStep fista_recurrence_step(const FistaOperator& op, const Vector& w, const Vector& w_prev,
                                     const Problem& p)
{
    require_size(w.size(), op.P.cols(), "fista_recurrence_step");
    require_size(w_prev.size(), op.Q.cols(), "fista_recurrence_step");
    if (flags(w, p.theta()) != op.flags || flags(w_prev, p.theta()) != op.flags_prev) {
        throw RebuildRequired("fista_recurrence_step: operator flags do not match (w, w_prev)");
    }
    RecurrenceStep step;
    step.w_next = op.P * w + op.Q * w_prev + op.hbar;
    step.flags_next = flags(step.w_next, p.theta());
    return step;
}

Vector fixed_point_w(const Vector& x_star, const Vector& nu, const Problem& p, double tol)
{
    require_size(x_star.size(), p.cols(), "fixed_point_w: x");
    require_size(nu.size(), p.cols(), "fixed_point_w: nu");
    // KT-1 residual of the supplied ν, then KT-2 against sign(x).
    const Vector nu_check = p.A().transpose() * (p.b() - p.A() * x_star) / p.lambda();
    double violation = (nu - nu_check).lpNorm<Eigen::Infinity>();
    for (Eigen::Index i = 0; i < x_star.size(); ++i) {
        if (x_star[i] > 0.0) {
            violation = std::max(violation, std::abs(nu[i] - 1.0));
        } else if (x_star[i] < 0.0) {
            violation = std::max(violation, std::abs(nu[i] + 1.0));
        } else {
            violation = std::max(violation, std::abs(nu[i]) - 1.0);
        }
    }
    if (violation > tol) {
        throw std::invalid_argument("fixed_point_w: KKT violation " + std::to_string(violation) +
                                    " exceeds tolerance");
    }
    return x_star + p.theta() * nu;
}

double check_fixed_point(const AugmentedOperator& aug, const Vector& w_aug)
{
    require_size(w_aug.size(), aug.M.cols(), "check_fixed_point");
    if (w_aug[w_aug.size() - 1] != 1.0) {
        throw std::invalid_argument("check_fixed_point: last entry must be 1");
    }
    return (aug.M * w_aug - w_aug).norm();
}

Vector augment_ista(const Vector& w)
{
    Vector out(w.size() + 1);
    out << w, 1.0;
    return out;
}

Vector augment_fista(const Vector& w, const Vector& w_prev)
{
    Vector out(w.size() + w_prev.size() + 1);
    out << w, w_prev, 1.0;
    return out;
}

std::pair<Matrix, Matrix> unit_tau_split(const Problem& p, const FlagVector& flags, const FlagVector& flags_prev)
{
    require_size(flags.size(), p.cols(), "unit_tau_split");
    require_size(flags_prev.size(), p.cols(), "unit_tau_split");
    const Eigen::Index n = p.cols();
    const Matrix M = p.step_matrix();
    const double theta = p.theta();
    const Matrix Rt = scale_columns(M, flags.diag_squared());
    const Matrix Rt_prev = scale_columns(M, flags_prev.diag_squared());
    const Vector d = flags.as_vector();
    const Vector d_prev = flags_prev.as_vector();

    Matrix unit = Matrix::Zero(2 * n + 1, 2 * n + 1);
    unit.topLeftCorner(n, n) = 2.0 * Rt;
    unit.block(0, n, n, n) = -Rt_prev;
    unit.block(0, 2 * n, n, 1) = M * (theta * (-2.0 * d + d_prev)) + p.Atb() / p.lipschitz();
    unit.block(n, 0, n, n).setIdentity();
    unit(2 * n, 2 * n) = 1.0;

    Matrix delta = Matrix::Zero(2 * n + 1, 2 * n + 1);
    delta.topLeftCorner(n, n) = -Rt;
    delta.block(0, n, n, n) = Rt_prev;
    delta.block(0, 2 * n, n, 1) = M * (theta * (d - d_prev));
    return {unit, delta};
}

} // namespace lasso
