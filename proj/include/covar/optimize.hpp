#pragma once

#include <Eigen/Dense>

#include <functional>

namespace covar::opt {

using Objective = std::function<double(const Eigen::VectorXd&)>;

struct Minimum {
    Eigen::VectorXd x;
    double value = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
};

struct NelderMeadOptions {
    double f_tol = 1e-8;   ///< spread of simplex values
    double x_tol = 1e-6;   ///< simplex diameter (max-norm)
    double initial_step = 0.5;
    int max_iterations = 5000;
};

/// Derivative-free simplex minimization over an unconstrained space.
Minimum nelder_mead(const Objective& f, const Eigen::VectorXd& x0,
                    const NelderMeadOptions& options = {});

struct BfgsOptions {
    double grad_tol = 1e-5;
    double f_rel_tol = 1e-10;
    double fd_step = 1e-5;
    int max_iterations = 500;
};

/// Quasi-Newton minimization with central finite-difference gradients and an
/// Armijo backtracking line search. Non-finite objective values are treated as
/// +infinity, so the line search backs away from infeasible regions.
Minimum bfgs(const Objective& f, const Eigen::VectorXd& x0, const BfgsOptions& options = {});

}  // namespace covar::opt
