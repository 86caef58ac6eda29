#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "rbm/initial_data.hpp"

namespace rbm {

/// m-step transition density of the left-Exp[1] walk: e^{y-x}(x-y)^{m-1}/(m-1)! for x > y.
double q_exp_pow(int m, double x, double y);

/// Sub-density of {tau = ell, B_tau in db} on [lo, hi).
///
/// Analytic components (exact sweep) store the tilted density
///   g(b) = e^{eta-b} P(tau=ell, B_tau in db)/db = e^{log_scale} sum_k c_k (anchor-b)^k/k!,
/// sampled components store density values on increasing nodes and interpolate linearly.
struct HitComponent {
    int ell = 0;
    double lo = 0.0, hi = 0.0;
    double mass = 0.0;
    double eta = 0.0;

    bool analytic = true;
    double anchor = 0.0;
    double log_scale = 0.0;
    std::vector<double> coeffs;

    std::vector<double> nodes;
    std::vector<double> values;

    double density(double b) const;
    /// e^{eta-b} times the density; a polynomial for analytic components.
    double tilted(double b) const;
    /// Upper bound on the polynomial degree of tilted() (analytic only).
    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
};

struct HittingLaw {
    double start = 0.0;
    bool atom = false;  // tau = 0 with B_0 = start, mass 1
    int horizon = 0;
    std::vector<HitComponent> components;

    double total_mass() const;
    const HitComponent* find(int ell) const;
};

enum class ExactMode { sweep, inclusion_exclusion };

/// Law of the epigraph hitting time for the hitting curve c_k of `profile`,
/// restricted to tau < n_max. The sweep is exact (survivor densities are e^{y-eta}
/// times polynomials); the inclusion–exclusion mode evaluates each component as a
/// signed sum over chains of earlier blocks with nested Gauss–Legendre quadrature
/// and samples it on `samples` uniform nodes.
HittingLaw hitting_law_exact(const StepProfile& profile, double eta, int n_max,
                             ExactMode mode = ExactMode::sweep, int samples = 129);

/// Pointwise inclusion–exclusion density of {tau = ell, B_tau in db} at b.
double hitting_density_ie(const StepProfile& profile, double eta, int ell, double b, int order = 24);

struct GridOptions {
    double spacing = 1e-3;
    double pad = 12.0;
    double leak_tolerance = 1e-6;
};

/// Uniform grid from (lowest relevant level - pad) to eta.
std::vector<double> default_hitting_grid(const InitialCondition& ic, double eta, int n_max,
                                         const GridOptions& options = {});

/// Forward recursion of the survivor density on a grid (levels and eta are inserted
/// as nodes). Each step is integrated exactly for the piecewise-linear interpolant.
/// Throws ConvergenceError carrying the mass defect if it exceeds the tolerance.
HittingLaw hitting_law_grid(const InitialCondition& ic, double eta, const std::vector<double>& b_grid, int n_max,
                            double leak_tolerance = 1e-6);

struct McComponent {
    int ell = 0;
    double mass = 0.0;
    double stderr_ = 0.0;
    double lo = 0.0;
    double bin_width = 0.0;
    std::vector<std::int64_t> counts;
};

struct McHittingLaw {
    std::int64_t paths = 0;
    double atom_mass = 0.0;
    std::vector<McComponent> components;

    const McComponent* find(int ell) const;
};

/// Direct simulation of B_k = B_{k-1} - Exp(1) until B_k >= c_k or k = n_max.
/// Paths are split into fixed chunks seeded by mix_seed(seed, chunk); the result
/// does not depend on `threads`.
McHittingLaw hitting_law_mc(const InitialCondition& ic, double eta, int n_max, std::int64_t paths,
                            std::uint64_t seed, double bin_width = 0.05, unsigned threads = 0);

/// CSV dump `ell,b,density` with `samples` points per component, plus an
/// `atom,<eta>,1` row when the walk starts on the epigraph.
void write_law_csv(std::ostream& out, const HittingLaw& law, int samples = 101);

}  // namespace rbm
