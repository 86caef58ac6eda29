#pragma once

#include <cmath>

#include <Eigen/Dense>

#include "rbm/airy.hpp"
#include "rbm/quadrature.hpp"

namespace oracle {

// F_2(s) = det(I - K_Airy) on (s, inf), truncated to [s, s + 16]
inline double tracy_widom_gue(double s, int order = 60) {
    const rbm::QuadratureRule q = rbm::gauss_legendre(order, s, s + 16.0);
    const int n = order;
    Eigen::VectorXd ai(n), aip(n);
    for (int k = 0; k < n; ++k) {
        ai[k] = rbm::airy_ai(q.nodes[k]);
        aip[k] = rbm::airy_ai_prime(q.nodes[k]);
    }
    Eigen::MatrixXd M(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            const double x = q.nodes[r], y = q.nodes[c];
            const double K = r == c ? aip[r] * aip[r] - x * ai[r] * ai[r] : (ai[r] * aip[c] - aip[r] * ai[c]) / (x - y);
            M(r, c) = (r == c ? 1.0 : 0.0) - std::sqrt(q.weights[r] * q.weights[c]) * K;
        }
    return M.partialPivLu().determinant();
}

}  // namespace oracle
