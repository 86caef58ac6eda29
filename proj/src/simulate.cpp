#include "rbm/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "rbm/error.hpp"
#include "rbm/parallel.hpp"

namespace rbm {

std::vector<double> NoiseField::path(int k) const {
    std::vector<double> w(steps + 1, 0.0);
    for (int s = 0; s < steps; ++s) w[s + 1] = w[s] + increments[k][s];
    return w;
}

NoiseField NoiseField::negated() const {
    NoiseField n = *this;
    for (auto& row : n.increments)
        for (double& v : row) v = -v;
    return n;
}

NoiseField sample_noise(int particles, double T, double dt, std::uint64_t seed) {
    if (!(dt > 0.0) || !(T >= dt)) throw ArgumentError("sample_noise: need dt > 0 and T >= dt");
    if (particles < 1) throw ArgumentError("sample_noise: need at least one particle");
    NoiseField f;
    f.particles = particles;
    f.steps = static_cast<int>(std::llround(T / dt));
    f.dt = dt;
    f.seed = seed;
    f.increments.resize(particles);
    const double sd = std::sqrt(dt);
    for (int k = 0; k < particles; ++k) {
        std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(k)));
        std::normal_distribution<double> g(0.0, sd);
        f.increments[k].resize(f.steps);
        for (double& v : f.increments[k]) v = g(rng);
    }
    return f;
}

double PathEnsemble::max_gap(const PathEnsemble& other) const {
    double g = 0.0;
    for (std::size_t k = 0; k < paths.size(); ++k)
        for (std::size_t s = 0; s < paths[k].size(); ++s) g = std::max(g, std::abs(paths[k][s] - other.paths[k][s]));
    return g;
}

bool PathEnsemble::ordered(double tol) const {
    for (std::size_t k = 1; k < paths.size(); ++k)
        for (std::size_t s = 0; s < paths[k].size(); ++s)
            if (paths[k][s] > paths[k - 1][s] + tol) return false;
    return true;
}

namespace {

void require_finite_particles(const InitialCondition& ic, const NoiseField& noise) {
    if (noise.particles > ic.size()) throw ArgumentError("simulate: more noise rows than particles");
    if (ic.infinite_prefix() > 0) throw ArgumentError("simulate: all simulated levels must be finite");
}

}  // namespace

PathEnsemble rbm_reflect(const InitialCondition& ic, const NoiseField& noise) {
    require_finite_particles(ic, noise);
    PathEnsemble e;
    e.tag = Construction::reflect;
    e.paths.resize(noise.particles);
    for (int k = 0; k < noise.particles; ++k) {
        std::vector<double> B = noise.path(k);
        for (double& v : B) v += ic.level(k + 1);
        if (k > 0) {
            const auto& f = e.paths[k - 1];
            double running = INFINITY;
            for (int s = 0; s <= noise.steps; ++s) {
                running = std::min(running, f[s] - B[s]);
                B[s] = std::min(f[s], B[s] + std::min(0.0, running));
            }
        }
        e.paths[k] = std::move(B);
    }
    return e;
}

namespace {

// G(l, n, s) for all s, one call per start row l
std::vector<double> lpp_row(const NoiseField& noise, int l, int n) {
    std::vector<double> G = noise.path(l - 1);
    for (int k = l; k < n; ++k) {
        std::vector<double> W = noise.path(k);
        double best = -INFINITY;
        for (int s = 0; s <= noise.steps; ++s) {
            best = std::max(best, G[s] - W[s]);
            G[s] = W[s] + best;
        }
    }
    return G;
}

}  // namespace

double lpp_value(const NoiseField& noise, int l, int n, int s) {
    if (l < 1 || l > n || n > noise.particles) throw ArgumentError("lpp_value: need 1 <= l <= n <= particles");
    if (s < 0 || s > noise.steps) throw ArgumentError("lpp_value: time index off the grid");
    return lpp_row(noise, l, n)[s];
}

PathEnsemble rbm_variational(const InitialCondition& ic, const NoiseField& noise) {
    require_finite_particles(ic, noise);
    const NoiseField env = noise.negated();
    PathEnsemble e;
    e.tag = Construction::variational;
    e.paths.assign(noise.particles, std::vector<double>(noise.steps + 1, INFINITY));
    // one DP sweep per start row l updates every n >= l
    for (int l = 1; l <= noise.particles; ++l) {
        std::vector<double> G = env.path(l - 1);
        const double X0 = ic.level(l);
        for (int n = l; n <= noise.particles; ++n) {
            if (n > l) {
                std::vector<double> W = env.path(n - 1);
                double best = -INFINITY;
                for (int s = 0; s <= noise.steps; ++s) {
                    best = std::max(best, G[s] - W[s]);
                    G[s] = W[s] + best;
                }
            }
            auto& X = e.paths[n - 1];
            for (int s = 0; s <= noise.steps; ++s) X[s] = std::min(X[s], X0 - G[s]);
        }
    }
    return e;
}

McResult mc_distribution(const InitialCondition& ic, double t, const std::vector<int>& indices,
                         const std::vector<double>& a, std::int64_t paths, double dt, std::uint64_t seed,
                         McScheme scheme, unsigned threads) {
    if (paths < 1) throw ArgumentError("mc_distribution: paths must be >= 1");
    if (!(t > 0.0) || !(dt > 0.0)) throw ArgumentError("mc_distribution: need t > 0 and dt > 0");
    if (indices.empty() || indices.size() != a.size()) throw ArgumentError("mc_distribution: one threshold per index");
    for (std::size_t j = 0; j < indices.size(); ++j)
        if (indices[j] < 1 || (j > 0 && indices[j] <= indices[j - 1]))
            throw ArgumentError("mc_distribution: indices must be >= 1 and strictly increasing");
    const int N = indices.back();
    if (N > ic.size()) throw ArgumentError("mc_distribution: index exceeds the number of particles");
    for (int k = 1; k <= N; ++k)
        if (!std::isfinite(ic.level(k))) throw ArgumentError("mc_distribution: simulated levels must be finite");
    const int steps = std::max(1, static_cast<int>(std::llround(t / dt)));
    const double h = t / steps, sd = std::sqrt(h);

    constexpr std::int64_t chunk = 256;
    const std::size_t chunks = static_cast<std::size_t>((paths + chunk - 1) / chunk);
    std::vector<std::int64_t> hits(chunks, 0);
    parallel_for(chunks, threads, [&](std::size_t ch) {
        std::vector<double> B(N), X(N), Xprev(N), run(N);
        std::int64_t local = 0;
        const std::int64_t begin = static_cast<std::int64_t>(ch) * chunk;
        const std::int64_t end = std::min(paths, begin + chunk);
        for (std::int64_t p = begin; p < end; ++p) {
            std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(p)));
            std::normal_distribution<double> g(0.0, sd);
            std::uniform_real_distribution<double> u(0.0, 1.0);
            for (int k = 0; k < N; ++k) {
                B[k] = X[k] = ic.level(k + 1);
                run[k] = INFINITY;
            }
            for (int s = 0; s < steps; ++s) {
                Xprev = X;
                for (int k = 0; k < N; ++k) {
                    const double Bold = B[k];
                    B[k] += g(rng);
                    if (k == 0) {
                        X[0] = B[0];
                        continue;
                    }
                    const double d0 = Xprev[k - 1] - Bold, d1 = X[k - 1] - B[k];
                    double m = std::min(d0, d1);
                    if (scheme == McScheme::bridge) {
                        const double uu = 1.0 - u(rng);  // (0, 1]
                        const double dd = d1 - d0;
                        m = 0.5 * (d0 + d1 - std::sqrt(dd * dd - 4.0 * h * std::log(uu)));
                    }
                    run[k] = std::min(run[k], m);
                    X[k] = B[k] + std::min(0.0, run[k]);
                }
            }
            bool ok = true;
            for (std::size_t j = 0; j < indices.size() && ok; ++j) ok = X[indices[j] - 1] >= a[j];
            local += ok ? 1 : 0;
        }
        hits[ch] = local;
    });
    std::int64_t total = 0;
    for (auto v : hits) total += v;
    McResult r;
    r.paths = paths;
    r.dt = h;
    r.seed = seed;
    r.estimate = static_cast<double>(total) / paths;
    r.stderr_ = std::sqrt(std::max(r.estimate * (1.0 - r.estimate), 0.0) / paths);
    return r;
}

std::vector<double> gue_edge_sample(int n, std::int64_t samples, std::uint64_t seed, unsigned threads) {
    if (n < 1) throw ArgumentError("gue_edge_sample: n must be >= 1");
    if (samples < 1) throw ArgumentError("gue_edge_sample: samples must be >= 1");
    std::vector<double> out(static_cast<std::size_t>(samples));
    parallel_for(out.size(), threads, [&](std::size_t s) {
        std::mt19937_64 rng(mix_seed(seed, s));
        std::normal_distribution<double> g(0.0, 1.0);
        Eigen::MatrixXcd H(n, n);
        for (int i = 0; i < n; ++i) {
            H(i, i) = g(rng);
            for (int j = i + 1; j < n; ++j) {
                const double re = g(rng), im = g(rng);
                H(i, j) = std::complex<double>(re, im) / std::sqrt(2.0);
                H(j, i) = std::conj(H(i, j));
            }
        }
        if (n == 1) {
            out[s] = H(0, 0).real();
            return;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H, Eigen::EigenvaluesOnly);
        out[s] = es.eigenvalues().maxCoeff();
    });
    return out;
}

}  // namespace rbm
