#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rbm/initial_data.hpp"
#include "rbm/polynomial.hpp"

namespace rbm {

/// Table h^n_k(l, .) for 0 <= l <= k <= n-1:
///   h^n_k(k, z) = 1,  h^n_k(l, z) = int_z^{X0(n-l)} h^n_k(l+1, y) dy.
struct HFamily {
    int n = 0;
    std::vector<std::vector<Polynomial>> table;  // table[k][l]

    const Polynomial& at(int k, int l) const { return table[k][l]; }
};

/// Default cap on n for the polynomial path (conditioning degrades beyond it).
inline constexpr int kBiorthMaxN = 30;

HFamily h_family(const InitialCondition& ic, int n, int max_n = kBiorthMaxN);

/// Phi^n_k = e^{-t d^2/2} h^n_k(0, .), as a polynomial.
Polynomial phi_poly(const HFamily& family, int k, double t);

/// (Psi^n_k(x), Phi^n_k(x)) with Psi^n_k(x) = psi_k(t, X0(n-k) - x).
std::pair<double, double> psi_phi_eval(const InitialCondition& ic, int n, int k, double t, double x);

struct GramOptions {
    int order = 20;
    double window = 12.0;  // in units of sqrt(t) beyond the level range
};

/// Matrix of <Psi^n_k, Phi^n_l> by composite Gauss–Legendre quadrature.
Eigen::MatrixXd gram(const InitialCondition& ic, int n, double t, const GramOptions& options = {});

enum class G0nMethod { biorth, hitting };

/// G_{0,n}(x1, x2). The biorthogonal sum uses the open indicator 1{x1 > X0(n-k)};
/// the hitting form uses the closed epigraph, so they differ only when x1 is a level.
double g0n_eval(const InitialCondition& ic, int n, double x1, double x2, G0nMethod method);

}  // namespace rbm
