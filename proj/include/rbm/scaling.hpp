#pragma once

#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rbm/fredholm.hpp"
#include "rbm/kernel.hpp"

namespace rbm {

/// 1:2:3 substitution t = eps^{-3/2} T, n = eps^{-3/2} T - 2 x / eps,
/// z = -2 eps^{-3/2} T + 2 x / eps + eps^{-1/2} u. n is rounded to the nearest
/// integer and x is replaced by the x_eff for which the rounded n is exact.
struct ScaledVars {
    double eps = 0.0;
    double t = 0.0;
    int n = 0;
    double n_exact = 0.0;
    double rounding = 0.0;  // n - n_exact
    double x_eff = 0.0;
    double z = 0.0;
};

ScaledVars scale_vars(double eps, double T, double x, double u = 0.0);

/// RBM threshold matching h(T, x) <= A:  -2 eps^{-3/2} T + 2 x_eff / eps - eps^{-1/2} A.
double scaled_threshold(const ScaledVars& v, double A);

/// (S^eps(v,u), Sbar^eps(v,u)) with eta = eps^{-1/2} v, both from log-scale psi.
std::pair<double, double> scaled_kernels(double eps, double T, double x, double v, double u);

/// T^{-1/3} exp(2x^3/(3T^2) + w x / T) Ai(T^{-1/3} w + T^{-4/3} x^2).
double fixedpoint_s(double T, double x, double w);

struct FixedPointSpec {
    std::vector<double> wedges;      // a_1 > a_2 > ... , all <= 0
    double t = 1.0;
    std::vector<double> points;      // evaluation points x_j
    std::vector<double> thresholds;  // h(t, x_j) <= A_j
};

void validate(const FixedPointSpec& spec);

struct FixedPointOptions {
    int inner_order = 16;     // Gauss–Legendre nodes per panel of the chain integrals
    double tail = 40.0;       // log-magnitude dropped at the ends of the chain grids
};

/// K(x_i,u_i; x_j,u_j) = -p_{2(x_i-x_j)}(u_j-u_i) 1{x_i>x_j}
///   + sum_k int_{w_k>=0} L_k(u_i, w_k) S_{-x_j+a_k}(w_k - u_j) dw_k,
/// L_1(u, w) = S_{x_i-a_1}(w - u), L_{k+1}(u, w') = int_{w<0} L_k(u, w) p_{2(a_k-a_{k+1})}(w' - w) dw.
/// The chain is the first hit of a diffusion-2 Brownian motion on {w >= 0} at the
/// successive wedge times -a_1 < -a_2 < ...
class FixedPointKernel : public BlockKernel {
public:
    FixedPointKernel(FixedPointSpec spec, FixedPointOptions options = {});

    const FixedPointSpec& spec() const { return spec_; }
    int lines() const override { return static_cast<int>(spec_.points.size()); }
    Eigen::MatrixXd block(int i, std::span<const double> xs, int j, std::span<const double> ys) const override;

    /// Just the chain sum (second term).
    Eigen::MatrixXd chain(int i, std::span<const double> xs, int j, std::span<const double> ys) const;

private:
    FixedPointSpec spec_;
    FixedPointOptions options_;
};

std::shared_ptr<FixedPointKernel> fixedpoint_kernel_nw(const FixedPointSpec& spec, const FixedPointOptions& options = {});

/// P(h(t, x_j) <= A_j for all j) = det(I - chi K chi), chi = 1{u <= -A_j}.
DetResult fixedpoint_probability(const FixedPointSpec& spec, const DetOptions& options = {},
                                 const FixedPointOptions& kernel_options = {});

struct StudyRow {
    double eps = 0.0;
    bool feasible = false;
    std::string note;
    std::vector<int> n;
    std::vector<double> x_eff;
    double prob_rbm = 0.0;
    double prob_fp = 0.0;
    double abs_err = 0.0;
    double det_err_rbm = 0.0;
    double det_err_fp = 0.0;
};

/// For each eps: narrow-wedge approximation, RBM determinant at the scaled
/// thresholds, fixed point determinant at the effective points.
std::vector<StudyRow> convergence_study(const std::vector<double>& wedges, double T, const std::vector<double>& xs,
                                        const std::vector<double>& A, const std::vector<double>& eps_list,
                                        const DetOptions& options = {}, unsigned threads = 0);

}  // namespace rbm
