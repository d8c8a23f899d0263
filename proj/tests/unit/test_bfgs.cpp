#include "qcmps/bfgs.hpp"

#include <Eigen/Cholesky>
#include <gtest/gtest.h>

using namespace qcmps;

namespace {

double rosenbrock(const Eigen::VectorXd& x, Eigen::VectorXd* g) {
    double f = 0;
    if (g)
        g->setZero(x.size());
    for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
        const double a = x(i + 1) - x(i) * x(i), b = 1 - x(i);
        f += 100 * a * a + b * b;
        if (g) {
            (*g)(i) += -400 * a * x(i) - 2 * b;
            (*g)(i + 1) += 200 * a;
        }
    }
    return f;
}

} // namespace

TEST(Bfgs, Rosenbrock) {
    BfgsOptions opt;
    opt.max_iter = 500;
    opt.grad_tol = 1e-8;
    opt.energy_tol = 0;
    const auto r = minimize_bfgs(rosenbrock, Eigen::Vector4d(-1.2, 1.0, -0.5, 0.8), opt);
    EXPECT_EQ(r.reason, BfgsStop::gradient);
    EXPECT_LT((r.x - Eigen::Vector4d::Ones()).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_LT(r.grad.cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Bfgs, QuadraticConvergesInFewSteps) {
    Eigen::MatrixXd a(3, 3);
    a << 4, 1, 0, 1, 3, 0.5, 0, 0.5, 2;
    const Eigen::Vector3d b(1, -2, 0.5);
    auto f = [&](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
        if (g)
            *g = a * x - b;
        return 0.5 * x.dot(a * x) - b.dot(x);
    };
    BfgsOptions opt;
    opt.grad_tol = 1e-10;
    opt.energy_tol = 0;
    const auto r = minimize_bfgs(f, Eigen::Vector3d::Zero(), opt);
    EXPECT_LT((r.x - a.ldlt().solve(b)).norm(), 1e-9) << to_string(r.reason) << " after " << r.trace.size();
    EXPECT_LE(r.trace.size(), 20u);
}

TEST(Bfgs, TraceIsMonotoneAndStartsAtZero) {
    std::vector<double> seen;
    BfgsOptions opt;
    opt.max_iter = 100;
    const auto r = minimize_bfgs(rosenbrock, Eigen::Vector2d(-1.2, 1.0), opt,
                                 [&](const BfgsIterate& it, const Eigen::VectorXd&) { seen.push_back(it.value); });
    ASSERT_FALSE(r.trace.empty());
    EXPECT_EQ(r.trace.front().iteration, 0u);
    EXPECT_EQ(seen.size(), r.trace.size());
    for (std::size_t i = 1; i < r.trace.size(); ++i) {
        EXPECT_LE(r.trace[i].value, r.trace[i - 1].value);
        EXPECT_EQ(r.trace[i].iteration, i);
    }
    EXPECT_GE(r.evaluations, r.trace.size());
}

TEST(Bfgs, ZeroIterationBudget) {
    BfgsOptions opt;
    opt.max_iter = 0;
    const Eigen::Vector2d x0(-1.2, 1.0);
    const auto r = minimize_bfgs(rosenbrock, x0, opt);
    EXPECT_EQ(r.reason, BfgsStop::max_iter);
    EXPECT_EQ(r.x, Eigen::VectorXd(x0));
    EXPECT_EQ(r.trace.size(), 1u);
    EXPECT_DOUBLE_EQ(r.value, rosenbrock(x0, nullptr));
}

TEST(Bfgs, StartingAtMinimumStopsOnGradient) {
    const auto r = minimize_bfgs(rosenbrock, Eigen::Vector2d(1.0, 1.0));
    EXPECT_EQ(r.reason, BfgsStop::gradient);
    EXPECT_EQ(r.trace.size(), 1u);
}

TEST(Bfgs, EnergyToleranceStop) {
    BfgsOptions opt;
    opt.grad_tol = 0;
    opt.energy_tol = 1e-3;
    const auto r = minimize_bfgs(rosenbrock, Eigen::Vector2d(-1.2, 1.0), opt);
    EXPECT_EQ(r.reason, BfgsStop::energy);
}

TEST(Bfgs, StopNames) {
    EXPECT_EQ(to_string(BfgsStop::gradient), "gradient");
    EXPECT_EQ(to_string(BfgsStop::line_search), "line_search");
}
