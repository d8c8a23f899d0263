#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace qcmps {

/// Returns f(x); fills *grad with the gradient when grad is non-null.
using ObjectiveFunction = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd* grad)>;

struct BfgsOptions {
    std::size_t max_iter = 200;
    /// Stop when the gradient infinity norm drops below this.
    double grad_tol = 1e-5;
    /// Stop when an accepted step changes f by less than this.
    double energy_tol = 1e-10;
    double c1 = 1e-4;
    double c2 = 0.9;
    std::size_t max_line_search = 30;
};

enum class BfgsStop { gradient, energy, max_iter, line_search };

std::string to_string(BfgsStop reason);

struct BfgsIterate {
    std::size_t iteration = 0;
    double value = 0.0;
    double grad_norm = 0.0; // infinity norm
};

struct BfgsResult {
    Eigen::VectorXd x;
    double value = 0.0;
    Eigen::VectorXd grad;
    std::vector<BfgsIterate> trace;
    BfgsStop reason = BfgsStop::max_iter;
    std::size_t evaluations = 0;
    std::size_t gradient_evaluations = 0;
};

/// Called once for the starting point and once after every accepted step.
using IterateCallback = std::function<void(const BfgsIterate&, const Eigen::VectorXd& x)>;

/// Dense inverse-Hessian BFGS with a strong-Wolfe line search. The update is
/// skipped whenever the curvature y^T s is not positive.
BfgsResult minimize_bfgs(const ObjectiveFunction& f, Eigen::VectorXd x0, const BfgsOptions& options = {},
                         const IterateCallback& on_iterate = {});

} // namespace qcmps
