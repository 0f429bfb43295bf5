#pragma once

// Damped Gauss-Newton (Levenberg-Marquardt) for small dense nonlinear
// least-squares problems.  Marquardt scaling on the normal equations,
// analytic Jacobian when supplied, central differences otherwise.

#include <functional>

#include <Eigen/Dense>

namespace cavity {

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using JacobianFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

struct LmOptions {
    int max_iterations = 200;
    double step_tol_rel = 1e-12;  // stop when |dx| <= tol * (|x| + tol)
    double lambda_init = 1e-3;
    double lambda_max = 1e12;
};

struct LmResult {
    Eigen::VectorXd x;
    Eigen::MatrixXd covariance;  // (J^T J)^-1 * ssr / (n - p); empty if n <= p
    double ssr = 0.0;            // sum of squared residuals at x
    int iterations = 0;
    bool converged = false;
};

// Minimizes |r(x)|^2 from x0.  jacobian may be an empty std::function, in
// which case a central-difference Jacobian with per-parameter step
// eps^(1/3) * (|x_j| + eps^(1/3)) is used.
LmResult levenberg_marquardt(const ResidualFn& residuals,
                             const JacobianFn& jacobian,
                             const Eigen::VectorXd& x0,
                             const LmOptions& opt = {});

}  // namespace cavity
