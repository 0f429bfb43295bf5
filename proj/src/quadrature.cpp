#include "cavity/quadrature.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "cavity/constants.hpp"

namespace cavity {

GaussHermiteRule gauss_hermite(int n) {
    if (n < 1) throw std::invalid_argument("node count must be >= 1");
    // Jacobi matrix of the (physicists') Hermite recurrence: zero diagonal,
    // off-diagonal beta_k = sqrt(k/2).  Eigenvalues are the nodes; weights
    // are mu0 * v0^2 with mu0 = integral e^(-x^2) dx = sqrt(pi).
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double beta = std::sqrt(k / 2.0);
        jacobi(k, k - 1) = beta;
        jacobi(k - 1, k) = beta;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("Hermite Jacobi eigendecomposition failed");

    const double mu0 = std::sqrt(kPi);
    GaussHermiteRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        rule.nodes[i] = eig.eigenvalues()(i);  // ascending
        const double v0 = eig.eigenvectors()(0, i);
        rule.weights[i] = mu0 * v0 * v0;
    }
    return rule;
}

double gaussian_mean(const std::function<double(double)>& f, double sigma,
                     int nodes) {
    if (sigma < 0.0) throw std::invalid_argument("sigma must be >= 0");
    if (sigma == 0.0) return f(0.0);
    const GaussHermiteRule rule = gauss_hermite(nodes);
    const double scale = std::sqrt(2.0) * sigma;
    double acc = 0.0;
    for (int i = 0; i < nodes; ++i)
        acc += rule.weights[i] * f(scale * rule.nodes[i]);
    return acc / std::sqrt(kPi);
}

}  // namespace cavity
