#pragma once

// Gauss-Hermite quadrature for averages over Gaussian-distributed variables:
//   integral f(x) e^(-x^2) dx  ~=  sum_i w_i f(x_i).
// Nodes/weights come from the symmetric Jacobi (tridiagonal) matrix of the
// Hermite recurrence (Golub-Welsch).

#include <functional>
#include <vector>

namespace cavity {

struct GaussHermiteRule {
    std::vector<double> nodes;    // roots of H_n
    std::vector<double> weights;  // sum = sqrt(pi)
};

// n-point rule, n >= 1.
GaussHermiteRule gauss_hermite(int n);

// Mean of f under N(0, sigma^2):
//   E[f] = (1/sqrt(pi)) sum_i w_i f(sqrt(2) sigma x_i).
// sigma = 0 evaluates f(0) exactly.
double gaussian_mean(const std::function<double(double)>& f, double sigma,
                     int nodes = 64);

}  // namespace cavity
