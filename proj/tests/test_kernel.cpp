#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "rbm/contour.hpp"
#include "rbm/error.hpp"
#include "rbm/hermite.hpp"
#include "rbm/hitting.hpp"
#include "rbm/kernel.hpp"
#include "rbm/quadrature.hpp"

using namespace rbm;

namespace {

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

}  // namespace

TEST_CASE("building blocks") {
    CHECK(s_ops(KernelKind::Sbar, 0.7, 1, 0.3, -0.4) == doctest::Approx(std::exp(-0.7)).epsilon(1e-14));
    CHECK(s_ops(KernelKind::S, 1.0, 0, 0.0, 0.0) == doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-14));
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> ut(0.3, 2.5), uz(-2.5, 2.5);
    for (int rep = 0; rep < 100; ++rep) {
        const double t = ut(rng), z1 = uz(rng), z2 = uz(rng);
        const int n = 1 + static_cast<int>(rng() % 20);
        for (auto [kind, ck] : {std::pair{KernelKind::S, ContourKind::S}, std::pair{KernelKind::Sbar, ContourKind::Sbar}}) {
            const double a = s_ops(kind, t, n, z1, z2);
            const double b = contour_eval(ck, t, n, z1, z2).value;
            CHECK(std::abs(a - b) < 1e-8 * std::max(1.0, std::abs(a)));
        }
    }
    CHECK_THROWS_AS(s_ops(KernelKind::Sbar, 1.0, 0, 0.0, 0.0), ArgumentError);
}

TEST_CASE("epi operator") {
    auto packed = InitialCondition::from_positions({0, 0, 0, 0});
    CHECK(sbar_epi(packed, 1.2, 3, 0.4, -0.3) == doctest::Approx(s_ops(KernelKind::Sbar, 1.2, 3, 0.4, -0.3)).epsilon(1e-13));
    CHECK(sbar_epi(packed, 1.2, 3, -0.1, -0.3) == 0.0);

    // single wedge (l, L): Sbar^epi = Q^l chi_L Sbar_{n-l}, by direct quadrature in b
    const int l = 2, n = 5;
    const double L = -0.6, t = 0.9;
    auto wedge = InitialCondition(l, std::vector<double>(4, L));
    for (double z1 : {0.3, 1.1}) {
        for (double z2 : {-1.0, 0.2}) {
            QuadratureRule q = build_quadrature(Interval{L, z1}, {}, 30, 0.5);
            double ref = 0.0;
            for (std::size_t i = 0; i < q.size(); ++i)
                ref += q.weights[i] * q_exp_pow(l, z1, q.nodes[i]) * s_ops(KernelKind::Sbar, t, n - l, q.nodes[i], z2);
            CHECK(sbar_epi(wedge, t, n, z1, z2) == doctest::Approx(ref).epsilon(1e-12));
        }
        CHECK(sbar_epi(wedge, t, 2, z1, 0.0) == 0.0);
    }
}

TEST_CASE("representation equivalence") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> uz(-2.5, 1.5);
    double largest = 0.0;
    for (int rep = 0; rep < 12; ++rep) {
        const int N = 2 + static_cast<int>(rng() % 7);
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
        for (int p = 0; p < 6; ++p) {
            const int i = static_cast<int>(rng() % idx.size()), j = static_cast<int>(rng() % idx.size());
            const double zi = uz(rng), zj = uz(rng);
            const double h = kh(i, zi, j, zj), b = kb(i, zi, j, zj), o = ko(i, zi, j, zj);
            INFO("rep=" << rep << " ni=" << idx[i] << " nj=" << idx[j] << " zi=" << zi << " zj=" << zj);
            CHECK(std::abs(h - b) < 1e-7 * std::max(1.0, std::abs(b)));
            CHECK(std::abs(o - b) < 1e-7 * std::max(1.0, std::abs(b)));
            largest = std::max(largest, std::abs(b));
        }
    }
    CHECK(largest > 0.1);
}

TEST_CASE("kernel structure") {
    auto ic = InitialCondition::from_positions({0.5, 0.0, -1.0});
    KernelSpec spec{1.0, {1, 3}, ic, Representation::biorth, false, {}};
    ExtendedKernel k(spec);
    KernelSpec cs = spec;
    cs.conjugated = true;
    ExtendedKernel kc(cs);
    // conjugation is e^{zj - zi}
    CHECK(kc(0, 0.3, 1, -0.8) == doctest::Approx(std::exp(-1.1) * k(0, 0.3, 1, -0.8)).epsilon(1e-12));
    // first term only for ni < nj: the jump across zi = zj is (zi - zj)^{m-1}/(m-1)! -> 0 for m = 2 ... check m=1 jump
    KernelSpec s2{1.0, {2, 3}, ic, Representation::biorth, false, {}};
    ExtendedKernel k2(s2);
    CHECK(k2(0, 0.1 + 1e-9, 1, 0.1) - k2(0, 0.1 - 1e-9, 1, 0.1) == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(std::abs(k2(0, 0.1 + 1e-9, 0, 0.1) - k2(0, 0.1 - 1e-9, 0, 0.1)) < 1e-6);
    CHECK_THROWS_AS(ExtendedKernel(KernelSpec{1.0, {2, 2}, ic, Representation::hitting, true, {}}), ArgumentError);
    CHECK_THROWS_AS(ExtendedKernel(KernelSpec{1.0, {4}, ic, Representation::hitting, true, {}}), ArgumentError);
    CHECK_THROWS_AS(ExtendedKernel(KernelSpec{1.0, {1}, InitialCondition(1, {0.0}), Representation::biorth, true, {}}),
                    ArgumentError);
    CHECK(k.block_calls() > 0);
}
