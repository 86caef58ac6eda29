#include "rbm/hitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>

#include <boost/math/special_functions/gamma.hpp>

#include "rbm/error.hpp"
#include "rbm/parallel.hpp"
#include "rbm/quadrature.hpp"

namespace rbm {

double q_exp_pow(int m, double x, double y) {
    if (m < 1) throw ArgumentError("q_exp_pow: m must be >= 1");
    if (!(x > y)) return 0.0;
    const double d = x - y;
    return std::exp((m - 1) * std::log(d) - std::lgamma(static_cast<double>(m)) - d);
}

double HitComponent::tilted(double b) const {
    if (!(b >= lo && b < hi)) return 0.0;
    if (!analytic) return std::exp(eta - b) * density(b);
    const double v = anchor - b;
    // sum_k c_k v^k/k! by Horner on the factorial basis
    double acc = 0.0;
    for (int k = static_cast<int>(coeffs.size()) - 1; k >= 0; --k) acc = coeffs[k] + acc * v / (k + 1);
    return std::exp(log_scale) * acc;
}

double HitComponent::density(double b) const {
    if (!(b >= lo && b <= hi)) return 0.0;
    if (analytic) return b < hi ? std::exp(b - eta) * tilted(b) : 0.0;
    if (nodes.empty()) return 0.0;
    auto it = std::upper_bound(nodes.begin(), nodes.end(), b);
    if (it == nodes.begin()) return values.front();
    if (it == nodes.end()) return values.back();
    const std::size_t i = static_cast<std::size_t>(it - nodes.begin());
    const double w = (b - nodes[i - 1]) / (nodes[i] - nodes[i - 1]);
    return (1.0 - w) * values[i - 1] + w * values[i];
}

double HittingLaw::total_mass() const {
    double m = atom ? 1.0 : 0.0;
    for (const auto& c : components) m += c.mass;
    return m;
}

const HitComponent* HittingLaw::find(int ell) const {
    for (const auto& c : components)
        if (c.ell == ell) return &c;
    return nullptr;
}

const McComponent* McHittingLaw::find(int ell) const {
    for (const auto& c : components)
        if (c.ell == ell) return &c;
    return nullptr;
}

namespace {

double first_level(const StepProfile& p) {
    if (p.infinite_prefix == 0 && !p.blocks.empty() && p.blocks.front().start == 0) return p.blocks.front().level;
    return INFINITY;
}

void normalize(std::vector<double>& c, double& log_scale) {
    double m = 0.0;
    for (double v : c) m = std::max(m, std::abs(v));
    if (m == 0.0 || !std::isfinite(m)) return;
    for (double& v : c) v /= m;
    log_scale += std::log(m);
}

HittingLaw sweep(const StepProfile& profile, double eta, int n_max) {
    HittingLaw law;
    law.start = eta;
    law.horizon = n_max;
    if (n_max <= 0) return law;
    if (eta >= first_level(profile)) {
        law.atom = true;
        return law;
    }
    bool delta = true;
    int steps = 0;
    double upper = eta;  // survivors live on (-inf, upper); also the expansion anchor
    double log_scale = 0.0;
    std::vector<double> c;
    for (const Block& blk : profile.blocks) {
        if (blk.start == 0) continue;
        if (blk.start >= n_max) break;
        const int m = blk.start - steps;
        if (delta) {
            c.assign(m, 0.0);
            c[m - 1] = 1.0;
            delta = false;
        } else {
            c.insert(c.begin(), m, 0.0);
        }
        steps = blk.start;
        const double L = blk.level;
        if (!(L < upper)) continue;

        HitComponent h;
        h.ell = blk.start;
        h.lo = L;
        h.hi = upper;
        h.eta = eta;
        h.anchor = upper;
        h.log_scale = log_scale;
        h.coeffs = c;
        const double D = upper - L;
        double mass = 0.0;
        for (std::size_t k = 0; k < c.size(); ++k)
            if (c[k] != 0.0) mass += c[k] * boost::math::gamma_p(static_cast<double>(k + 1), D);
        h.mass = std::exp(log_scale + upper - eta) * mass;
        law.components.push_back(std::move(h));

        // re-expand the survivor part (b < L) around the new anchor L
        std::vector<double> next(c.size(), 0.0);
        const double logD = std::log(D);
        for (std::size_t j = 0; j < c.size(); ++j) {
            double s = 0.0;
            for (std::size_t k = j; k < c.size(); ++k)
                if (c[k] != 0.0) s += c[k] * std::exp((k - j) * logD - std::lgamma(static_cast<double>(k - j + 1)));
            next[j] = s;
        }
        c = std::move(next);
        normalize(c, log_scale);
        upper = L;
    }
    return law;
}

struct IeContext {
    const StepProfile& profile;
    double eta;
    int order;
    QuadratureRule unit;
};

// Nested integral over b_1 > ... > b_r along `chain` (block indices), ending with a
// transition to the target block start and point.
double chain_integral(const IeContext& ctx, const std::vector<int>& chain, std::size_t r, double x, int s_prev,
                      int s_target, double b) {
    if (r == chain.size()) return q_exp_pow(s_target - s_prev, x, b);
    const Block& blk = ctx.profile.blocks[chain[r]];
    const double lo = std::max(blk.level, b);
    if (!(x > lo)) return 0.0;
    const double width = x - lo;
    const int panels = std::max(1, static_cast<int>(std::ceil(width / 2.0)));
    const double pw = width / panels;
    double sum = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double a = lo + p * pw;
        for (std::size_t i = 0; i < ctx.unit.size(); ++i) {
            const double y = a + 0.5 * pw * (ctx.unit.nodes[i] + 1.0);
            const double w = 0.5 * pw * ctx.unit.weights[i];
            sum += w * q_exp_pow(blk.start - s_prev, x, y) * chain_integral(ctx, chain, r + 1, y, blk.start, s_target, b);
        }
    }
    return sum;
}

}  // namespace

double hitting_density_ie(const StepProfile& profile, double eta, int ell, double b, int order) {
    if (eta >= first_level(profile)) return 0.0;
    int target = -1;
    for (std::size_t j = 0; j < profile.blocks.size(); ++j)
        if (profile.blocks[j].start == ell) target = static_cast<int>(j);
    if (target < 0 || ell == 0) return 0.0;
    if (b < profile.blocks[target].level) return 0.0;
    std::vector<int> earlier;
    for (int j = 0; j < target; ++j)
        if (profile.blocks[j].start > 0) earlier.push_back(j);
    IeContext ctx{profile, eta, order, gauss_legendre(order)};
    double total = 0.0;
    const std::size_t subsets = std::size_t{1} << earlier.size();
    for (std::size_t mask = 0; mask < subsets; ++mask) {
        std::vector<int> chain;
        for (std::size_t i = 0; i < earlier.size(); ++i)
            if (mask >> i & 1) chain.push_back(earlier[i]);
        const double g = chain_integral(ctx, chain, 0, eta, 0, ell, b);
        total += (chain.size() % 2 ? -g : g);
    }
    return total;
}

HittingLaw hitting_law_exact(const StepProfile& profile, double eta, int n_max, ExactMode mode, int samples) {
    for (std::size_t j = 1; j < profile.blocks.size(); ++j)
        if (!(profile.blocks[j].level < profile.blocks[j - 1].level))
            throw ArgumentError("hitting_law_exact: block levels must strictly decrease");
    HittingLaw law = sweep(profile, eta, n_max);
    if (mode == ExactMode::sweep || law.atom) return law;

    // Same supports, values recomputed independently.
    for (HitComponent& h : law.components) {
        HitComponent s;
        s.ell = h.ell;
        s.lo = h.lo;
        s.hi = h.hi;
        s.eta = eta;
        s.analytic = false;
        for (int i = 0; i < samples; ++i) {
            const double b = h.lo + (h.hi - h.lo) * i / (samples - 1);
            s.nodes.push_back(b);
            s.values.push_back(i == samples - 1 ? 0.0 : hitting_density_ie(profile, eta, h.ell, b));
        }
        QuadratureRule q = build_quadrature(Interval{h.lo, h.hi}, {}, 16, 0.5);
        s.mass = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i) s.mass += q.weights[i] * hitting_density_ie(profile, eta, h.ell, q.nodes[i]);
        h = std::move(s);
    }
    return law;
}

std::vector<double> default_hitting_grid(const InitialCondition& ic, double eta, int n_max, const GridOptions& options) {
    double lowest = eta;
    for (int k = 0; k < std::min(n_max, ic.size()); ++k)
        if (std::isfinite(ic.curve(k))) lowest = std::min(lowest, ic.curve(k));
    const double lo = lowest - options.pad;
    const int n = static_cast<int>(std::ceil((eta - lo) / options.spacing));
    std::vector<double> g(n + 1);
    for (int i = 0; i <= n; ++i) g[i] = lo + (eta - lo) * i / n;
    return g;
}

HittingLaw hitting_law_grid(const InitialCondition& ic, double eta, const std::vector<double>& b_grid, int n_max,
                            double leak_tolerance) {
    HittingLaw law;
    law.start = eta;
    law.horizon = n_max;
    if (n_max <= 0) return law;
    if (eta >= ic.curve(0)) {
        law.atom = true;
        return law;
    }
    const int kmax = std::min(n_max, ic.size());
    std::vector<double> x = b_grid;
    x.push_back(eta);
    for (int k = 1; k < kmax; ++k)
        if (std::isfinite(ic.curve(k)) && ic.curve(k) < eta) x.push_back(ic.curve(k));
    std::sort(x.begin(), x.end());
    x.erase(std::unique(x.begin(), x.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }), x.end());
    x.erase(std::remove_if(x.begin(), x.end(), [&](double v) { return v > eta + 1e-12; }), x.end());
    auto index_of = [&](double v) {
        auto it = std::min_element(x.begin(), x.end(), [&](double a, double b) { return std::abs(a - v) < std::abs(b - v); });
        return static_cast<std::size_t>(it - x.begin());
    };
    const double lowest_level = [&] {
        double m = INFINITY;
        for (int k = 1; k < kmax; ++k)
            if (std::isfinite(ic.curve(k))) m = std::min(m, ic.curve(k));
        return m;
    }();
    if (std::isfinite(lowest_level) && x.front() > lowest_level)
        throw ArgumentError("hitting_law_grid: grid must extend below the lowest level");

    const std::size_t N = x.size();
    std::vector<double> p(N, 0.0);
    std::size_t top = index_of(eta);
    for (std::size_t i = 0; i <= top; ++i) p[i] = std::exp(x[i] - eta);
    double below = p[0];  // mass that left through the bottom of the grid
    double upper = eta;

    auto trapezoid = [&](std::size_t a, std::size_t b) {
        double s = 0.0;
        for (std::size_t i = a; i < b; ++i) s += 0.5 * (p[i] + p[i + 1]) * (x[i + 1] - x[i]);
        return s;
    };
    double hit_mass = 0.0;
    std::vector<double> r(N, 0.0);
    for (int k = 1; k < kmax; ++k) {
        if (k > 1) {
            r[top] = 0.0;
            for (std::size_t i = top; i-- > 0;) {
                const double h = x[i + 1] - x[i];
                const double e = std::exp(-h);
                r[i] = e * r[i + 1] + p[i] * (1.0 - e) + (p[i + 1] - p[i]) * (1.0 - (1.0 + h) * e) / h;
            }
            for (std::size_t i = 0; i <= top; ++i) p[i] = r[i];
            below += p[0];
        }
        const double c = ic.curve(k);
        if (!(c < upper)) continue;
        const std::size_t iL = index_of(c);
        HitComponent h;
        h.ell = k;
        h.lo = c;
        h.hi = upper;
        h.eta = eta;
        h.analytic = false;
        h.nodes.assign(x.begin() + iL, x.begin() + top + 1);
        h.values.assign(p.begin() + iL, p.begin() + top + 1);
        h.mass = trapezoid(iL, top);
        hit_mass += h.mass;
        law.components.push_back(std::move(h));
        for (std::size_t i = iL + 1; i <= top; ++i) p[i] = 0.0;
        top = iL;
        upper = c;
    }
    // One more propagation accounts for the survivors' mass exactly as mass.
    const double survivors = trapezoid(0, top);
    const double defect = std::abs(1.0 - (hit_mass + survivors + below));
    if (defect > leak_tolerance)
        throw ConvergenceError("hitting_law_grid: mass defect " + std::to_string(defect) + " exceeds tolerance", defect);
    return law;
}

McHittingLaw hitting_law_mc(const InitialCondition& ic, double eta, int n_max, std::int64_t paths,
                            std::uint64_t seed, double bin_width, unsigned threads) {
    if (paths < 1) throw ArgumentError("hitting_law_mc: paths must be >= 1");
    McHittingLaw out;
    out.paths = paths;
    const int kmax = std::min(n_max, ic.size());
    if (kmax <= 0) return out;
    if (eta >= ic.curve(0)) {
        out.atom_mass = 1.0;
        return out;
    }
    // candidate components with their supports
    std::vector<int> ells;
    std::vector<double> los, his;
    double upper = eta;
    for (int k = 1; k < kmax; ++k) {
        const double c = ic.curve(k);
        if (c < upper) {
            ells.push_back(k);
            los.push_back(c);
            his.push_back(upper);
            upper = c;
        }
    }
    std::vector<int> comp_of(kmax, -1);
    std::vector<std::size_t> bins(ells.size());
    for (std::size_t j = 0; j < ells.size(); ++j) {
        comp_of[ells[j]] = static_cast<int>(j);
        bins[j] = static_cast<std::size_t>(std::ceil((his[j] - los[j]) / bin_width)) + 1;
    }

    constexpr std::int64_t chunk = 1 << 14;
    const std::size_t chunks = static_cast<std::size_t>((paths + chunk - 1) / chunk);
    std::vector<std::vector<std::vector<std::int64_t>>> counts(chunks);
    parallel_for(chunks, threads, [&](std::size_t ch) {
        std::mt19937_64 rng(mix_seed(seed, ch));
        std::exponential_distribution<double> step(1.0);
        auto& local = counts[ch];
        local.resize(ells.size());
        for (std::size_t j = 0; j < ells.size(); ++j) local[j].assign(bins[j], 0);
        const std::int64_t begin = static_cast<std::int64_t>(ch) * chunk;
        const std::int64_t end = std::min(paths, begin + chunk);
        for (std::int64_t path = begin; path < end; ++path) {
            double B = eta;
            for (int k = 1; k < kmax; ++k) {
                B -= step(rng);
                if (B >= ic.curve(k)) {
                    const int j = comp_of[k];
                    const auto bin = static_cast<std::size_t>((B - los[j]) / bin_width);
                    ++local[j][std::min(bin, bins[j] - 1)];
                    break;
                }
            }
        }
    });
    for (std::size_t j = 0; j < ells.size(); ++j) {
        McComponent c;
        c.ell = ells[j];
        c.lo = los[j];
        c.bin_width = bin_width;
        c.counts.assign(bins[j], 0);
        for (const auto& local : counts)
            for (std::size_t b = 0; b < bins[j]; ++b) c.counts[b] += local[j][b];
        std::int64_t total = 0;
        for (auto v : c.counts) total += v;
        c.mass = static_cast<double>(total) / paths;
        c.stderr_ = std::sqrt(c.mass * (1.0 - c.mass) / paths);
        out.components.push_back(std::move(c));
    }
    return out;
}

void write_law_csv(std::ostream& out, const HittingLaw& law, int samples) {
    out.precision(17);
    out << "ell,b,density\n";
    if (law.atom) out << "atom," << law.start << ",1\n";
    for (const auto& c : law.components) {
        for (int i = 0; i < samples; ++i) {
            const double b = c.lo + (c.hi - c.lo) * i / std::max(1, samples - 1);
            out << c.ell << ',' << b << ',' << c.density(b) << '\n';
        }
    }
}

}  // namespace rbm
