#include "rbm/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rbm/error.hpp"
#include "rbm/hermite.hpp"
#include "rbm/hitting.hpp"
#include "rbm/parallel.hpp"
#include "rbm/quadrature.hpp"

namespace rbm {

double s_ops(KernelKind kind, double t, int n, double z1, double z2) {
    const double x = z1 - z2;
    if (kind == KernelKind::S) {
        if (n < 0) throw ArgumentError("s_ops(S): n must be >= 0");
        return psi_log(n, t, x).scaled(x).value();
    }
    if (n < 1) throw ArgumentError("s_ops(Sbar): n must be >= 1");
    return psibar_log(n - 1, t, x).scaled(-x).value();
}

namespace {

// E(eta; y) = e^{eta - z1}-free part of the epi expectation:
//   1{eta >= c0} psibar_{n-1}(t, eta - y) + sum_l int tilted_l(b) psibar_{n-l-1}(t, b - y) db,
// so that Sbar^epi(eta, y) = e^{y - eta} E(eta; y).
void epi_values(const HittingLaw& law, double t, int n, std::span<const double> ys, double* out) {
    const std::size_t m = ys.size();
    if (law.atom) {
        for (std::size_t c = 0; c < m; ++c) out[c] = psibar(n - 1, t, law.start - ys[c]);
        return;
    }
    std::fill(out, out + m, 0.0);
    for (const HitComponent& comp : law.components) {
        const int deg = n - comp.ell - 1;
        if (deg < 0) continue;
        // polynomial integrand of degree <= n - 2
        QuadratureRule q = gauss_legendre(n / 2 + 2, comp.lo, comp.hi);
        for (std::size_t g = 0; g < q.size(); ++g) {
            const double wg = q.weights[g] * comp.tilted(q.nodes[g]);
            if (wg == 0.0) continue;
            for (std::size_t c = 0; c < m; ++c) out[c] += wg * psibar(deg, t, q.nodes[g] - ys[c]);
        }
    }
}

std::vector<double> relevant_levels(const StepProfile& p, int n) {
    std::vector<double> v;
    for (const Block& b : p.blocks)
        if (b.start < n) v.push_back(b.level);
    return v;
}

// psibar_m(t, s) as a polynomial in s
Polynomial psibar_poly(int m, double t) {
    // probabilists' Hermite coefficients by the three-term recurrence
    std::vector<double> prev = {1.0}, cur = {0.0, 1.0};
    std::vector<double> h = m == 0 ? prev : cur;
    for (int k = 1; k < m; ++k) {
        std::vector<double> next(k + 2, 0.0);
        for (int i = 0; i <= k; ++i) next[i + 1] += cur[i];
        for (int i = 0; i < k; ++i) next[i] -= k * prev[i];
        prev = std::move(cur);
        cur = std::move(next);
        h = cur;
    }
    // H_m(s/sqrt t) t^{m/2}/m!: coefficient of s^i picks up t^{(m-i)/2}
    const double lf = std::lgamma(m + 1.0);
    for (int i = 0; i <= m; ++i) h[i] *= std::exp(0.5 * (m - i) * std::log(t) - lf);
    return Polynomial(std::move(h));
}

}  // namespace

double sbar_epi(const InitialCondition& ic, double t, int n, double z1, double z2) {
    if (n < 1) throw ArgumentError("sbar_epi: n must be >= 1");
    if (!(t > 0.0)) throw ArgumentError("sbar_epi: t must be > 0");
    HittingLaw law = hitting_law_exact(blocks(ic), z1, std::min(n, ic.size()));
    double e = 0.0;
    const double y[1] = {z2};
    epi_values(law, t, n, y, &e);
    return e * std::exp(z2 - z1);
}

void validate(const KernelSpec& spec) {
    if (!(spec.t > 0.0)) throw ArgumentError("kernel: t must be > 0");
    if (spec.indices.empty()) throw ArgumentError("kernel: no indices");
    for (std::size_t i = 0; i < spec.indices.size(); ++i) {
        if (spec.indices[i] < 1) throw ArgumentError("kernel: indices must be >= 1");
        if (i > 0 && spec.indices[i] <= spec.indices[i - 1]) throw ArgumentError("kernel: indices must strictly increase");
    }
    if (spec.indices.back() > spec.ic.size()) throw ArgumentError("kernel: index exceeds the number of particles");
    if (spec.representation == Representation::biorth && spec.ic.infinite_prefix() > 0)
        throw ArgumentError("kernel: biorthogonal representation needs finite levels up to n_m");
}

ExtendedKernel::ExtendedKernel(KernelSpec spec) : spec_(std::move(spec)) {
    validate(spec_);
    profile_ = blocks(spec_.ic);
    if (spec_.representation == Representation::biorth) {
        for (int nj : spec_.indices) {
            HFamily f = h_family(spec_.ic, nj);
            std::vector<Polynomial> row;
            for (int k = 0; k < nj; ++k) row.push_back(phi_poly(f, k, spec_.t));
            phi_.push_back(std::move(row));
        }
    }
}

Eigen::MatrixXd ExtendedKernel::second_hitting(int ni, std::span<const double> xs, int nj,
                                               std::span<const double> ys) const {
    const double t = spec_.t, st = std::sqrt(t);
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(ys.size()));
    std::vector<double> levels = relevant_levels(profile_, nj);
    if (levels.empty() || xs.empty() || ys.empty()) return out;
    const double lmin = *std::min_element(levels.begin(), levels.end());
    const double reach = st * (2.0 * std::sqrt(static_cast<double>(ni)) + spec_.options.eta_reach);
    const double lo = std::max(*std::min_element(xs.begin(), xs.end()) - reach, lmin);
    const double hi = *std::max_element(xs.begin(), xs.end()) + reach;
    if (!(hi > lo)) return out;
    const double panel = st * std::numbers::pi / (std::sqrt(static_cast<double>(ni)) + 1.0);
    QuadratureRule q = build_quadrature(Interval{lo, hi}, levels, spec_.options.eta_order, panel);
    const std::size_t N = q.size();

    Eigen::MatrixXd A(xs.size(), N), E(N, ys.size());
    parallel_for(N, spec_.options.threads, [&](std::size_t k) {
        const double eta = q.nodes[k];
        for (std::size_t r = 0; r < xs.size(); ++r) A(r, k) = q.weights[k] * psi(ni, t, eta - xs[r]);
        HittingLaw law = hitting_law_exact(profile_, eta, nj);
        std::vector<double> e(ys.size());
        epi_values(law, t, nj, ys, e.data());
        for (std::size_t c = 0; c < ys.size(); ++c) E(k, c) = e[c];
    });
    out.noalias() = A * E;
    return out;
}

Eigen::MatrixXd ExtendedKernel::second_biorth(int ni, std::span<const double> xs, int nj,
                                              std::span<const double> ys) const {
    const double t = spec_.t;
    int jline = 0;
    while (spec_.indices[jline] != nj) ++jline;
    const auto& phi = phi_[jline];
    Eigen::MatrixXd P(xs.size(), nj), F(nj, ys.size());
    for (int k = 1; k <= nj; ++k) {
        const double X = spec_.ic.level(k);
        for (std::size_t r = 0; r < xs.size(); ++r) P(r, k - 1) = psi(ni - k, t, X - xs[r]);
        for (std::size_t c = 0; c < ys.size(); ++c) F(k - 1, c) = phi[nj - k](ys[c]);
    }
    return P * F;
}

Eigen::MatrixXd ExtendedKernel::second_operator(int ni, std::span<const double> xs, int nj,
                                                std::span<const double> ys) const {
    const double t = spec_.t, st = std::sqrt(t);
    std::vector<Block> blk;
    for (const Block& b : profile_.blocks)
        if (b.start < nj) blk.push_back(b);
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(ys.size()));
    const std::size_t B = blk.size();
    if (B == 0) return out;
    std::vector<Polynomial> bar(B);
    for (std::size_t k = 0; k < B; ++k) bar[k] = psibar_poly(nj - blk[k].start - 1, t);

    // half-line rules int_{L_k}^{inf} psi_{ni - s_k}(t, b - x) f(b) db, per row point
    std::vector<std::vector<QuadratureRule>> rules(B, std::vector<QuadratureRule>(xs.size()));
    for (std::size_t k = 0; k < B; ++k) {
        const int idx = ni - blk[k].start;
        const double sn = std::sqrt(static_cast<double>(std::abs(idx)));
        const double panel = st * std::numbers::pi / (sn + 1.0);
        for (std::size_t r = 0; r < xs.size(); ++r) {
            const double top = xs[r] + st * (2.0 * sn + spec_.options.eta_reach);
            if (top > blk[k].level)
                rules[k][r] = build_quadrature(Interval{blk[k].level, top}, {}, spec_.options.tail_order, panel);
        }
    }
    for (std::size_t c = 0; c < ys.size(); ++c) {
        // T_k(s), s = b - y: chains starting at block k, built from the right
        const double y = ys[c];
        std::vector<Polynomial> T(B);
        for (std::size_t k = B; k-- > 0;) {
            Polynomial acc = bar[k];
            for (std::size_t qb = k + 1; qb < B; ++qb) {
                Polynomial I = T[qb];
                const double lower = blk[qb].level - y;
                for (int d = 0; d < blk[qb].start - blk[k].start; ++d) I = I.antiderivative_from(lower);
                acc = acc - I;
            }
            T[k] = std::move(acc);
        }
        for (std::size_t k = 0; k < B; ++k) {
            const int idx = ni - blk[k].start;
            for (std::size_t r = 0; r < xs.size(); ++r) {
                const QuadratureRule& qr = rules[k][r];
                double s = 0.0;
                for (std::size_t g = 0; g < qr.size(); ++g)
                    s += qr.weights[g] * psi(idx, t, qr.nodes[g] - xs[r]) * T[k](qr.nodes[g] - y);
                out(r, c) += s;
            }
        }
    }
    return out;
}

Eigen::MatrixXd ExtendedKernel::block(int i, std::span<const double> xs, int j, std::span<const double> ys) const {
    if (i < 0 || j < 0 || i >= lines() || j >= lines()) throw ArgumentError("kernel: line label out of range");
    ++block_calls_;
    entries_ += xs.size() * ys.size();
    const int ni = spec_.indices[i], nj = spec_.indices[j];
    Eigen::MatrixXd K;
    switch (spec_.representation) {
        case Representation::hitting: K = second_hitting(ni, xs, nj, ys); break;
        case Representation::biorth: K = second_biorth(ni, xs, nj, ys); break;
        case Representation::operator_step: K = second_operator(ni, xs, nj, ys); break;
    }
    const int gap = nj - ni;
    for (std::size_t r = 0; r < xs.size(); ++r)
        for (std::size_t c = 0; c < ys.size(); ++c) {
            double v = K(r, c);
            if (spec_.conjugated) {
                v *= std::exp(ys[c] - xs[r]);
                if (gap > 0) v -= q_exp_pow(gap, xs[r], ys[c]);
            } else if (gap > 0 && xs[r] > ys[c]) {
                v -= std::exp((gap - 1) * std::log(xs[r] - ys[c]) - std::lgamma(static_cast<double>(gap)));
            }
            K(r, c) = v;
        }
    return K;
}

std::shared_ptr<ExtendedKernel> kernel_eval(const KernelSpec& spec) { return std::make_shared<ExtendedKernel>(spec); }

}  // namespace rbm
