#include "rbm/validate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "rbm/biorth.hpp"
#include "rbm/contour.hpp"
#include "rbm/error.hpp"
#include "rbm/kernel.hpp"
#include "rbm/parallel.hpp"
#include "rbm/simulate.hpp"

namespace rbm {

namespace {

InitialCondition random_levels(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<double> v(n);
    for (double& x : v) x = u(rng);
    std::sort(v.begin(), v.end(), std::greater<>());
    return InitialCondition::from_positions(v);
}

// packed blocks of 1-3 particles with decreasing levels
InitialCondition random_step(std::mt19937_64& rng, int n) {
    std::vector<double> v;
    double level = std::uniform_real_distribution<double>(-0.5, 1.0)(rng);
    while (static_cast<int>(v.size()) < n) {
        v.insert(v.end(), 1 + rng() % 3, level);
        level -= std::uniform_real_distribution<double>(0.3, 1.2)(rng);
    }
    v.resize(n);
    return InitialCondition::from_positions(v);
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

SuiteResult finish(SuiteResult r) {
    r.passed = r.max_error < r.tolerance;
    return r;
}

}  // namespace

SuiteResult validate_gram(std::uint64_t seed, int conditions, int n_max) {
    if (conditions < 1 || n_max < 1 || n_max > kBiorthMaxN) throw ArgumentError("validate gram: bad sizes");
    std::mt19937_64 rng(mix_seed(seed, 1));
    SuiteResult r{"gram", 0.0, 1e-8, 0, false, ""};
    for (int c = 0; c < conditions; ++c) {
        const int n = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(n_max));
        InitialCondition ic = random_levels(rng, n);
        for (double t : {0.5, 1.0, 2.0}) {
            Eigen::MatrixXd G = gram(ic, n, t);
            r.max_error = std::max(r.max_error, (G - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff());
            ++r.cases;
        }
    }
    r.detail = "max |G - I| over n <= " + std::to_string(n_max) + " and t in {0.5, 1, 2}";
    return finish(r);
}

SuiteResult validate_representation(std::uint64_t seed, int points, int n_max) {
    if (points < 1 || n_max < 1 || n_max > kBiorthMaxN) throw ArgumentError("validate representation: bad sizes");
    std::mt19937_64 rng(mix_seed(seed, 2));
    std::uniform_real_distribution<double> uz(-2.5, 1.5);
    SuiteResult r{"representation", 0.0, 1e-7, 0, false, ""};
    double largest = 0.0;
    const int per_condition = 10;
    while (r.cases < points) {
        const int N = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(n_max));
        InitialCondition ic = random_step(rng, N);
        const double t = std::uniform_real_distribution<double>(0.5, 2.0)(rng);
        std::vector<int> idx;
        for (int n = 1; n <= N; ++n)
            if (rng() % 2 || n == N) idx.push_back(n);
        KernelSpec spec{t, idx, ic, Representation::hitting, false, {}};
        ExtendedKernel kh(spec);
        spec.representation = Representation::biorth;
        ExtendedKernel kb(spec);
        spec.representation = Representation::operator_step;
        ExtendedKernel ko(spec);
        for (int p = 0; p < per_condition && r.cases < points; ++p, ++r.cases) {
            const int i = static_cast<int>(rng() % idx.size()), j = static_cast<int>(rng() % idx.size());
            const double zi = uz(rng), zj = uz(rng);
            const double h = kh(i, zi, j, zj), b = kb(i, zi, j, zj), o = ko(i, zi, j, zj);
            r.max_error = std::max({r.max_error, rel(h, b), rel(o, b)});
            largest = std::max(largest, std::abs(b));
        }
    }
    std::ostringstream d;
    d << "largest |K| sampled " << largest;
    r.detail = d.str();
    return finish(r);
}

SuiteResult validate_duality(std::uint64_t seed, int fields, int max_particles, int steps) {
    if (fields < 1 || max_particles < 1 || steps < 1) throw ArgumentError("validate duality: bad sizes");
    SuiteResult r{"duality", 0.0, 1e-12, 0, false, ""};
    const double dt = 1.0 / steps;
    for (int f = 0; f < fields; ++f) {
        const std::uint64_t s = mix_seed(seed, 1000 + static_cast<std::uint64_t>(f));
        std::mt19937_64 rng(s);
        const int N = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_particles));
        InitialCondition ic = random_step(rng, N);
        NoiseField noise = sample_noise(N, 1.0, dt, s);
        PathEnsemble a = rbm_reflect(ic, noise), b = rbm_variational(ic, noise);
        r.max_error = std::max(r.max_error, a.max_gap(b));
        ++r.cases;
    }
    r.detail = "max pathwise gap (absolute)";
    return finish(r);
}

SuiteResult validate_contour(std::uint64_t seed, int points) {
    if (points < 1) throw ArgumentError("validate contour: bad sizes");
    std::mt19937_64 rng(mix_seed(seed, 4));
    std::uniform_real_distribution<double> ut(0.3, 2.5), uz(-2.5, 2.5);
    SuiteResult r{"contour", 0.0, 1e-8, 0, false, ""};
    for (int p = 0; p < points; ++p) {
        const double t = ut(rng), z1 = uz(rng), z2 = uz(rng);
        const int n = 1 + static_cast<int>(rng() % 20);
        r.max_error = std::max(r.max_error, rel(contour_eval(ContourKind::S, t, n, z1, z2).value, s_ops(KernelKind::S, t, n, z1, z2)));
        r.max_error =
            std::max(r.max_error, rel(contour_eval(ContourKind::Sbar, t, n, z1, z2).value, s_ops(KernelKind::Sbar, t, n, z1, z2)));
        r.cases += 2;
    }
    r.detail = "S and Sbar, n <= 20";
    return finish(r);
}

SuiteResult validate_g0n(std::uint64_t seed, int points, int n_max) {
    if (points < 1 || n_max < 1 || n_max > kBiorthMaxN) throw ArgumentError("validate g0n: bad sizes");
    std::mt19937_64 rng(mix_seed(seed, 5));
    std::uniform_real_distribution<double> u(-3.0, 2.0);
    SuiteResult r{"g0n", 0.0, 1e-8, 0, false, ""};
    while (r.cases < points) {
        const int n = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(n_max));
        InitialCondition ic = random_step(rng, n);
        const double x1 = u(rng), x2 = u(rng);
        bool near = false;
        for (double L : ic.finite_levels()) near = near || std::abs(x1 - L) < 1e-3;
        if (near) continue;
        r.max_error = std::max(r.max_error, rel(g0n_eval(ic, n, x1, x2, G0nMethod::hitting), g0n_eval(ic, n, x1, x2, G0nMethod::biorth)));
        ++r.cases;
    }
    r.detail = "n <= " + std::to_string(n_max);
    return finish(r);
}

std::vector<SuiteResult> validate_suite(const std::string& name, std::uint64_t seed) {
    std::vector<SuiteResult> out;
    const bool all = name == "all";
    if (all || name == "gram") out.push_back(validate_gram(seed));
    if (all || name == "representation") out.push_back(validate_representation(seed));
    if (all || name == "duality") out.push_back(validate_duality(seed));
    if (all || name == "contour") out.push_back(validate_contour(seed));
    if (all || name == "g0n") out.push_back(validate_g0n(seed));
    if (out.empty()) throw ArgumentError("validate: unknown suite '" + name + "'");
    return out;
}

}  // namespace rbm
