#include "cavity/least_squares.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cavity {

namespace {

Eigen::MatrixXd numeric_jacobian(const ResidualFn& residuals,
                                 const Eigen::VectorXd& x) {
    // Central differences with step eps^(1/3) * (|x_j| + eps^(1/3)); the
    // additive floor keeps the step finite for parameters sitting at zero.
    const double cbrt_eps =
        std::cbrt(std::numeric_limits<double>::epsilon());
    const Eigen::VectorXd r0 = residuals(x);
    Eigen::MatrixXd jac(r0.size(), x.size());
    for (int j = 0; j < x.size(); ++j) {
        const double h = cbrt_eps * (std::abs(x(j)) + cbrt_eps);
        Eigen::VectorXd xp = x, xm = x;
        xp(j) += h;
        xm(j) -= h;
        jac.col(j) = (residuals(xp) - residuals(xm)) / (2.0 * h);
    }
    return jac;
}

}  // namespace

LmResult levenberg_marquardt(const ResidualFn& residuals,
                             const JacobianFn& jacobian,
                             const Eigen::VectorXd& x0,
                             const LmOptions& opt) {
    if (x0.size() == 0) throw std::invalid_argument("empty parameter vector");

    Eigen::VectorXd x = x0;
    Eigen::VectorXd r = residuals(x);
    if (r.size() == 0) throw std::invalid_argument("empty residual vector");
    double ssr = r.squaredNorm();
    double lambda = opt.lambda_init;

    LmResult out;
    Eigen::MatrixXd jac;
    bool jac_fresh = false;

    int iters = 0;
    for (int it = 0; it < opt.max_iterations; ++it) {
        ++iters;
        if (!jac_fresh) {
            jac = jacobian ? jacobian(x) : numeric_jacobian(residuals, x);
            jac_fresh = true;
        }
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd grad = jac.transpose() * r;

        // Accept/reject loop on the damping parameter.
        bool accepted = false;
        while (lambda <= opt.lambda_max) {
            Eigen::MatrixXd a = jtj;
            for (int k = 0; k < a.rows(); ++k) {
                const double dk = jtj(k, k);
                a(k, k) += lambda * (dk > 0.0 ? dk : 1.0);
            }
            const Eigen::VectorXd dx = a.ldlt().solve(-grad);
            const Eigen::VectorXd x_try = x + dx;
            const Eigen::VectorXd r_try = residuals(x_try);
            const double ssr_try = r_try.squaredNorm();
            if (std::isfinite(ssr_try) && ssr_try <= ssr) {
                const double step = dx.norm();
                const double scale = x.norm() + opt.step_tol_rel;
                x = x_try;
                r = r_try;
                ssr = ssr_try;
                lambda = std::max(lambda * 0.1, 1e-14);
                jac_fresh = false;
                accepted = true;
                if (step <= opt.step_tol_rel * scale) out.converged = true;
                break;
            }
            lambda *= 10.0;
        }
        if (!accepted) {
            // Damping exhausted: stationary within machine precision.
            out.converged = true;
            break;
        }
        if (out.converged) break;
    }

    out.x = x;
    out.ssr = ssr;
    out.iterations = iters;

    const Eigen::MatrixXd jfin = jacobian ? jacobian(x) : numeric_jacobian(residuals, x);
    const long n = jfin.rows(), p = jfin.cols();
    if (n > p) {
        const Eigen::MatrixXd jtj = jfin.transpose() * jfin;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(jtj);
        if (ldlt.info() == Eigen::Success) {
            out.covariance =
                ldlt.solve(Eigen::MatrixXd::Identity(p, p)) * (ssr / double(n - p));
        }
    }
    return out;
}

}  // namespace cavity
