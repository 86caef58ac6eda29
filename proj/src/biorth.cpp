#include "rbm/biorth.hpp"

#include <algorithm>
#include <cmath>

#include "rbm/error.hpp"
#include "rbm/hermite.hpp"
#include "rbm/hitting.hpp"
#include "rbm/quadrature.hpp"

namespace rbm {

namespace {

void require_finite(const InitialCondition& ic, int n, const char* who) {
    if (n < 1) throw ArgumentError(std::string(who) + ": n must be >= 1");
    if (n > ic.size()) throw ArgumentError(std::string(who) + ": n exceeds the number of particles");
    if (ic.infinite_prefix() > 0)
        throw ArgumentError(std::string(who) + ": +inf level within range; use the hitting representation");
}

}  // namespace

HFamily h_family(const InitialCondition& ic, int n, int max_n) {
    require_finite(ic, n, "h_family");
    if (n > max_n) throw ArgumentError("h_family: n above the polynomial-path cap");
    HFamily f;
    f.n = n;
    f.table.resize(n);
    for (int k = 0; k < n; ++k) {
        f.table[k].resize(k + 1);
        f.table[k][k] = Polynomial::constant(1.0);
        for (int l = k - 1; l >= 0; --l) {
            // int_z^{X} p = P(X) - P(z)
            Polynomial P = f.table[k][l + 1].antiderivative();
            f.table[k][l] = Polynomial::constant(P(ic.level(n - l))) - P;
        }
    }
    return f;
}

Polynomial phi_poly(const HFamily& family, int k, double t) { return heat_on_poly(-t, family.at(k, 0)); }

std::pair<double, double> psi_phi_eval(const InitialCondition& ic, int n, int k, double t, double x) {
    if (k < 0 || k >= n) throw ArgumentError("psi_phi_eval: need 0 <= k <= n-1");
    if (!(t > 0.0)) throw ArgumentError("psi_phi_eval: t must be > 0");
    HFamily f = h_family(ic, n);
    return {psi(k, t, ic.level(n - k) - x), phi_poly(f, k, t)(x)};
}

Eigen::MatrixXd gram(const InitialCondition& ic, int n, double t, const GramOptions& options) {
    if (!(t > 0.0)) throw ArgumentError("gram: t must be > 0");
    HFamily f = h_family(ic, n);
    std::vector<Polynomial> phi;
    for (int l = 0; l < n; ++l) phi.push_back(phi_poly(f, l, t));
    double lo = INFINITY, hi = -INFINITY;
    std::vector<double> levels;
    for (int i = 1; i <= n; ++i) {
        lo = std::min(lo, ic.level(i));
        hi = std::max(hi, ic.level(i));
        levels.push_back(ic.level(i));
    }
    const double w = (options.window + 2.0 * std::sqrt(static_cast<double>(n))) * std::sqrt(t);
    QuadratureRule q = build_quadrature(Interval{lo - w, hi + w}, levels, options.order, std::sqrt(t));
    Eigen::MatrixXd G(n, n);
    for (int k = 0; k < n; ++k) {
        const double X = ic.level(n - k);
        for (int l = 0; l < n; ++l) {
            double s = 0.0;
            for (std::size_t i = 0; i < q.size(); ++i) s += q.weights[i] * psi(k, t, X - q.nodes[i]) * phi[l](q.nodes[i]);
            G(k, l) = s;
        }
    }
    return G;
}

double g0n_eval(const InitialCondition& ic, int n, double x1, double x2, G0nMethod method) {
    if (n < 1) throw ArgumentError("g0n_eval: n must be >= 1");
    if (method == G0nMethod::biorth) {
        HFamily f = h_family(ic, n);
        double s = 0.0;
        for (int k = 0; k < n; ++k) {
            const double X = ic.level(n - k);
            if (x1 > X) s += std::pow(x1 - X, n - k - 1) / std::tgamma(n - k) * f.at(k, 0)(x2);
        }
        return s;
    }
    if (n > ic.size()) throw ArgumentError("g0n_eval: n exceeds the number of particles");
    HittingLaw law = hitting_law_exact(blocks(ic), x1, n);
    if (law.atom) return std::pow(x1 - x2, n - 1) / std::tgamma(n);
    double s = 0.0;
    for (const HitComponent& c : law.components) {
        // tilted(b) (b - x2)^{n-l-1}/(n-l-1)! is a polynomial of degree <= n-2
        QuadratureRule q = gauss_legendre(n / 2 + 2, c.lo, c.hi);
        const int m = n - c.ell - 1;
        for (std::size_t i = 0; i < q.size(); ++i)
            s += q.weights[i] * c.tilted(q.nodes[i]) * std::pow(q.nodes[i] - x2, m) / std::tgamma(m + 1.0);
    }
    return s;
}

}  // namespace rbm
