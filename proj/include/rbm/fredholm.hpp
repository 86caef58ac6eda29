#pragma once

#include <vector>

#include <Eigen/Dense>

#include "rbm/kernel.hpp"
#include "rbm/quadrature.hpp"

namespace rbm {

struct DetResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int order_used = 0;
    double pad_used = 0.0;  // truncation length L of each (-inf, a_j]
};

/// Nystrom discretization of I - chi K chi with chi = 1{x <= upper_j} on line j,
/// truncated to [upper_j - L, upper_j], L = pad * scale + extra.
struct NystromSystem {
    const BlockKernel* kernel = nullptr;
    std::vector<double> upper;
    int order = 40;
    double pad = 10.0;
    double scale = 1.0;
    double extra = 0.0;

    double length() const { return pad * scale + extra; }
    std::vector<QuadratureRule> rules() const;
    /// I - W^{1/2} K W^{1/2}
    Eigen::MatrixXd assemble() const;
};

/// Determinant of the assembled matrix by LU with partial pivoting.
double nystrom_determinant(const NystromSystem& system);

/// Value at (order, pad) with error estimate max(|D - D(order/2)|, |D - D(pad-2)|).
DetResult fredholm_det(const NystromSystem& system);

struct DetOptions {
    int order = 40;
    double pad = 10.0;     // in units of the kernel's natural scale (sqrt t for RBM)
    double target = 1e-6;
    int max_refinements = 3;
};

/// fredholm_det with automatic refinement (order doubled, pad + 2) until the error
/// estimate is below target; throws ConvergenceError otherwise.
DetResult fredholm_det_refined(NystromSystem system, double target, int max_refinements);

/// P(X_t(n_j) >= a_j, j = 1..m) as det(I - chibar_a K chibar_a).
DetResult rbm_probability(const KernelSpec& spec, const std::vector<double>& a, const DetOptions& options = {});

}  // namespace rbm
