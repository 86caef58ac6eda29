#pragma once

#include <cstdint>
#include <vector>

#include "rbm/initial_data.hpp"

namespace rbm {

/// Normal(0, dt) increments on a uniform grid, one independent stream per particle
/// (seeded by mix_seed(seed, particle)).
struct NoiseField {
    int particles = 0;
    int steps = 0;
    double dt = 0.0;
    std::uint64_t seed = 0;
    std::vector<std::vector<double>> increments;  // [particle][step]

    /// W_k at grid time s (W_k(0) = 0), k 0-based.
    std::vector<double> path(int k) const;
    NoiseField negated() const;
};

NoiseField sample_noise(int particles, double T, double dt, std::uint64_t seed);

enum class Construction { reflect, variational };

struct PathEnsemble {
    Construction tag = Construction::reflect;
    std::vector<std::vector<double>> paths;  // [particle][grid time]

    double max_gap(const PathEnsemble& other) const;
    bool ordered(double tol = 1e-12) const;
};

/// X(1) = X0(1) + W_1, X(k+1)_s = B_s + min(0, min_{r<=s}(X(k)_r - B_r)) with B = X0(k+1) + W_{k+1}.
PathEnsemble rbm_reflect(const InitialCondition& ic, const NoiseField& noise);

/// Discrete last passage value from (0, l) to (s, n), 1 <= l <= n, s a grid index:
///   G(l,l,s) = W_l(s),  G(l,k+1,s) = W_{k+1}(s) + max_{r<=s}(G(l,k,r) - W_{k+1}(r)).
double lpp_value(const NoiseField& noise, int l, int n, int s);

/// X_s(n) = min_{1<=l<=n}(X0(l) - G[(0,l)->(s,n)]) with G built on the negated field,
/// which is the environment dual to rbm_reflect on `noise`.
PathEnsemble rbm_variational(const InitialCondition& ic, const NoiseField& noise);

enum class McScheme { euler, bridge };

struct McResult {
    double estimate = 0.0;
    double stderr_ = 0.0;
    std::int64_t paths = 0;
    double dt = 0.0;
    std::uint64_t seed = 0;
};

/// Empirical P(X_t(n_j) >= a_j for all j). Path p draws from mix_seed(seed, p), so
/// the estimate does not depend on the worker count. The bridge scheme replaces
/// the grid minimum in each reflection by a draw of the running minimum of the
/// Brownian bridge between grid values (variance rate 2 for the gap process).
McResult mc_distribution(const InitialCondition& ic, double t, const std::vector<int>& indices,
                         const std::vector<double>& a, std::int64_t paths, double dt, std::uint64_t seed,
                         McScheme scheme = McScheme::bridge, unsigned threads = 0);

/// Largest eigenvalues of n x n GUE matrices: diagonal Normal(0,1), off-diagonal
/// (g1 + i g2)/sqrt(2) with E|h_ij|^2 = 1. For packed data, X_t(n) has the law of
/// -sqrt(t) lambda_max.
std::vector<double> gue_edge_sample(int n, std::int64_t samples, std::uint64_t seed, unsigned threads = 0);

}  // namespace rbm
