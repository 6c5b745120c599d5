#include "lasso/errors.hpp"
#include "lasso/experiments.hpp"
#include "lasso/recurrence.hpp"
#include "lasso/solvers.hpp"

#include <gtest/gtest.h>

#include <random>

namespace lasso {
namespace {

Problem random_problem(int m, int n, unsigned seed, double lambda)
{
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Matrix A(m, n);
    Vector b(m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) {
            A(i, j) = u(gen);
        }
        b[i] = u(gen);
    }
    return Problem(A, b, lambda);
}

FlagVector random_flags(int n, unsigned seed)
{
    std::mt19937 gen(seed);
    std::uniform_int_distribution<int> u(-1, 1);
    std::vector<std::int8_t> d(static_cast<std::size_t>(n));
    for (auto& v : d) {
        v = static_cast<std::int8_t>(u(gen));
    }
    return FlagVector(d);
}

// Entry-by-entry assembly, independent of the library's matrix products.
Matrix step_matrix_oracle(const Problem& p)
{
    const Matrix& A = p.A();
    const Eigen::Index n = A.cols();
    Matrix M(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            double g = 0.0;
            for (Eigen::Index r = 0; r < A.rows(); ++r) {
                g += A(r, i) * A(r, j);
            }
            M(i, j) = (i == j ? 1.0 : 0.0) - g / p.lipschitz();
        }
    }
    return M;
}

TEST(IstaOperator, MatchesEntrywiseOracle)
{
    const Problem p = random_problem(5, 7, 1, 0.2);
    const FlagVector d({1, 0, -1, 0, 1, 1, 0});
    const IstaOperator op = build_ista_operator(p, d);
    const Matrix M = step_matrix_oracle(p);
    for (Eigen::Index i = 0; i < 7; ++i) {
        double h = p.Atb()[i] / p.lipschitz();
        for (Eigen::Index j = 0; j < 7; ++j) {
            EXPECT_NEAR(op.R(i, j), M(i, j) * d[j] * d[j], 1e-15);
            h -= M(i, j) * p.theta() * d[j];
        }
        EXPECT_NEAR(op.h[i], h, 1e-15);
    }
}

TEST(IstaOperator, AugmentedLayout)
{
    const Problem p = random_problem(4, 5, 2, 0.2);
    const IstaOperator op = build_ista_operator(p, random_flags(5, 3));
    const AugmentedOperator aug = op.augmented();
    EXPECT_EQ(aug.kind, AugmentedKind::R_aug);
    ASSERT_EQ(aug.M.rows(), 6);
    EXPECT_EQ(aug.M.topLeftCorner(5, 5), op.R);
    EXPECT_EQ(aug.M.topRightCorner(5, 1), op.h);
    EXPECT_EQ(aug.M.row(5), Eigen::RowVectorXd::Unit(6, 5));
}

TEST(IstaRecurrence, OneStepMatchesDirectStep)
{
    const Problem p = random_problem(6, 9, 4, 0.1);
    const Vector x = Vector::LinSpaced(9, -0.5, 0.5);
    const Vector w = w_from_x(p, x);
    const IstaOperator op = build_ista_operator(p, flags(w, p.theta()));
    const RecurrenceStep st = ista_recurrence_step(op, w, p);
    const IstaStep direct = ista_step(p, shrink(w, p.theta()));
    EXPECT_LE((st.w_next - direct.w).lpNorm<Eigen::Infinity>(), 1e-14);
    EXPECT_EQ(st.flags_next, direct.flags);
}

TEST(IstaRecurrence, StaleFlagsRequireRebuild)
{
    const Problem p = random_problem(6, 9, 5, 0.1);
    const Vector w = w_from_x(p, Vector::LinSpaced(9, -0.5, 0.5));
    FlagVector wrong = flags(w, p.theta());
    std::vector<std::int8_t> v = wrong.values();
    v[0] = static_cast<std::int8_t>(v[0] == 0 ? 1 : 0);
    const IstaOperator op = build_ista_operator(p, FlagVector(v));
    EXPECT_THROW(ista_recurrence_step(op, w, p), RebuildRequired);
}

TEST(FistaOperator, MatchesEntrywiseOracle)
{
    const Problem p = random_problem(5, 6, 6, 0.3);
    const FlagVector d({1, 0, -1, 0, 1, -1});
    const FlagVector dp({0, 1, -1, 1, 1, 0});
    const double tau = 0.37;
    const FistaOperator op = build_fista_operator(p, d, dp, tau);
    const Matrix M = step_matrix_oracle(p);
    const double th = p.theta();
    for (Eigen::Index i = 0; i < 6; ++i) {
        double hb = p.Atb()[i] / p.lipschitz();
        for (Eigen::Index j = 0; j < 6; ++j) {
            EXPECT_NEAR(op.P(i, j), (1.0 + tau) * M(i, j) * d[j] * d[j], 1e-15);
            EXPECT_NEAR(op.Q(i, j), -tau * M(i, j) * dp[j] * dp[j], 1e-15);
            hb += M(i, j) * (-(1.0 + tau) * th * d[j] + tau * th * dp[j]);
        }
        EXPECT_NEAR(op.hbar[i], hb, 1e-15);
    }
    const Matrix N = op.block();
    EXPECT_EQ(N.bottomLeftCorner(6, 6), Matrix::Identity(6, 6));
    EXPECT_EQ(N.bottomRightCorner(6, 6), Matrix::Zero(6, 6));
    const AugmentedOperator aug = op.augmented();
    EXPECT_EQ(aug.kind, AugmentedKind::N_aug);
    EXPECT_EQ(aug.M.row(12), Eigen::RowVectorXd::Unit(13, 12));
    EXPECT_EQ(aug.M.block(0, 12, 6, 1), op.hbar);
    EXPECT_EQ(aug.M.block(6, 12, 6, 1), Vector::Zero(6));
}

TEST(FistaOperator, RejectsTauOutsideUnitInterval)
{
    const Problem p = random_problem(3, 4, 7, 0.3);
    const FlagVector d = FlagVector::zeros(4);
    EXPECT_THROW(build_fista_operator(p, d, d, 1.0), std::invalid_argument);
    EXPECT_THROW(build_fista_operator(p, d, d, -0.1), std::invalid_argument);
    EXPECT_THROW(build_fista_operator(p, d, FlagVector::zeros(3), 0.5), std::invalid_argument);
}

TEST(FistaRecurrence, OneStepMatchesMomentumStep)
{
    const Problem p = random_problem(6, 9, 8, 0.05);
    const double th = p.theta();
    const Vector w_prev = w_from_x(p, Vector::LinSpaced(9, -0.3, 0.6));
    const Vector w = w_from_x(p, Vector::LinSpaced(9, 0.4, -0.2));
    const double tau = 0.63;
    const FistaOperator op = build_fista_operator(p, flags(w, th), flags(w_prev, th), tau);
    const RecurrenceStep st = fista_recurrence_step(op, w, w_prev, p);
    const IstaStep direct = momentum_step(p, shrink(w, th), shrink(w_prev, th), tau);
    EXPECT_LE((st.w_next - direct.w).lpNorm<Eigen::Infinity>(), 1e-14);
    EXPECT_EQ(st.flags_next, direct.flags);
    EXPECT_THROW(fista_recurrence_step(op, w_prev, w, p), RebuildRequired);
}

TEST(Equivalence, DirectAndRecurrenceTrajectoriesAgree)
{
    const Problem p = gen_uniform(20, 40, 3);
    const double th = p.theta();
    Vector x = Vector::Zero(40);
    Vector w = w_from_x(p, x);
    for (int k = 0; k < 300; ++k) {
        x = ista_step(p, x).x_next;
        ASSERT_LE((shrink(w, th) - x).lpNorm<Eigen::Infinity>(), 1e-9) << "pass " << k + 1;
        w = ista_recurrence_step(build_ista_operator(p, flags(w, th)), w, p).w_next;
    }
}

TEST(FixedPoint, KktPairGivesEigenvectorOfBothOperators)
{
    const Problem p = gen_uniform(20, 40, 5);
    const Vector x = reference_solution(p);
    const Vector w = fixed_point_w(x, kkt_residual(p, x).nu, p);
    const FlagVector d = flags(w, p.theta());
    EXPECT_LE(check_fixed_point(build_ista_operator(p, d).augmented(), augment_ista(w)), 1e-8);
    EXPECT_LE(check_fixed_point(build_fista_operator(p, d, d, 0.7).augmented(), augment_fista(w, w)), 1e-8);
    // The shrink of the fixed point recovers x*.
    EXPECT_LE((shrink(w, p.theta()) - x).norm(), 1e-12);
}

TEST(FixedPoint, NonKktPairIsRejected)
{
    const Problem p = gen_uniform(20, 40, 5);
    Vector x = reference_solution(p);
    x[0] += 0.1;
    EXPECT_THROW(fixed_point_w(x, kkt_residual(p, x).nu, p), std::invalid_argument);
}

TEST(FixedPoint, NonFixedVectorLeavesResidual)
{
    const Problem p = random_problem(6, 8, 9, 0.2);
    const Vector w = Vector::LinSpaced(8, -1.0, 1.0);
    const IstaOperator op = build_ista_operator(p, flags(w, p.theta()));
    EXPECT_GT(check_fixed_point(op.augmented(), augment_ista(w)), 1e-3);
}

TEST(FixedPoint, AugmentedVectorMustEndInOne)
{
    const Problem p = random_problem(3, 4, 10, 0.2);
    const IstaOperator op = build_ista_operator(p, FlagVector::zeros(4));
    Vector v = augment_ista(Vector::Zero(4));
    v[4] = 0.5;
    EXPECT_THROW(check_fixed_point(op.augmented(), v), std::invalid_argument);
    EXPECT_THROW(check_fixed_point(op.augmented(), Vector::Ones(3)), std::invalid_argument);
}

TEST(UnitTauSplit, RecombinesToAugmentedOperator)
{
    const Problem p = random_problem(5, 7, 11, 0.3);
    const FlagVector d = random_flags(7, 12);
    const FlagVector dp = random_flags(7, 13);
    const auto [unit, delta] = unit_tau_split(p, d, dp);
    for (double tau : {0.0, 0.25, 0.8, 0.999}) {
        const Matrix N = build_fista_operator(p, d, dp, tau).augmented().M;
        EXPECT_LE((unit + (1.0 - tau) * delta - N).lpNorm<Eigen::Infinity>(), 1e-14) << "tau " << tau;
    }
    EXPECT_EQ(delta.bottomRows(8), Matrix::Zero(8, 15));
}

TEST(WFromX, DimensionMismatch)
{
    const Problem p = random_problem(3, 4, 14, 0.2);
    EXPECT_THROW(w_from_x(p, Vector::Zero(5)), std::invalid_argument);
    EXPECT_THROW(build_ista_operator(p, FlagVector::zeros(5)), std::invalid_argument);
}

} // namespace
} // namespace lasso
