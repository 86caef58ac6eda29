#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "rbm/error.hpp"
#include "rbm/hitting.hpp"
#include "rbm/quadrature.hpp"

using namespace rbm;

namespace {

InitialCondition random_step_data(std::mt19937_64& rng, int max_blocks = 4) {
    std::uniform_real_distribution<double> gap(0.2, 1.5);
    const int nb = 1 + static_cast<int>(rng() % max_blocks);
    const int prefix = static_cast<int>(rng() % 3);
    std::vector<double> f;
    double level = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
    for (int b = 0; b < nb; ++b) {
        f.insert(f.end(), 1 + rng() % 3, level);
        level -= gap(rng);
    }
    return InitialCondition(prefix, std::move(f));
}

// integrated absolute difference of two component densities
double l1_gap(const HitComponent& a, const HitComponent& b) {
    const double lo = std::min(a.lo, b.lo), hi = std::max(a.hi, b.hi);
    std::vector<double> splits = {a.lo, a.hi, b.lo, b.hi};
    QuadratureRule q = build_quadrature(Interval{lo, hi}, splits, 20, 0.25);
    double s = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) s += q.weights[i] * std::abs(a.density(q.nodes[i]) - b.density(q.nodes[i]));
    return s;
}

}  // namespace

TEST_CASE("q_exp_pow") {
    CHECK(q_exp_pow(1, 1.0, 0.5) == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
    CHECK(q_exp_pow(4, 0.5, 0.5) == 0.0);
    CHECK(q_exp_pow(4, 0.2, 0.5) == 0.0);
    // triple convolution of Exp(1) densities, by nested quadrature
    QuadratureRule q = gauss_legendre(60, 0.0, 2.0);
    double conv = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        const double u = q.nodes[i];
        QuadratureRule r = gauss_legendre(60, 0.0, 2.0 - u);
        for (std::size_t j = 0; j < r.size(); ++j) conv += q.weights[i] * r.weights[j] * std::exp(-u) * std::exp(-r.nodes[j]) * std::exp(-(2.0 - u - r.nodes[j]));
    }
    CHECK(q_exp_pow(3, 2.0, 0.0) == doctest::Approx(conv).epsilon(1e-12));
    CHECK(q_exp_pow(3, 2.0, 0.0) == doctest::Approx(0.270670566473225).epsilon(1e-12));
    CHECK(std::isfinite(q_exp_pow(2000, 2100.0, 0.0)));
    CHECK(q_exp_pow(2000, 2100.0, 0.0) > 0.0);
}

TEST_CASE("exact law: packed and single wedge") {
    auto packed = blocks(InitialCondition::from_positions({0, 0, 0, 0}));
    HittingLaw a = hitting_law_exact(packed, 0.7, 4);
    CHECK(a.atom);
    CHECK(a.components.empty());
    CHECK(a.total_mass() == 1.0);
    HittingLaw z = hitting_law_exact(packed, -1.0, 4);
    CHECK_FALSE(z.atom);
    CHECK(z.total_mass() == 0.0);

    auto wedge = blocks(InitialCondition(2, {0.0, 0.0, 0.0}));
    HittingLaw w = hitting_law_exact(wedge, 1.0, 5);
    REQUIRE(w.components.size() == 1);
    CHECK(w.components[0].ell == 2);
    CHECK(w.components[0].mass == doctest::Approx(1.0 - 2.0 * std::exp(-1.0)).epsilon(1e-13));
    // density of B_2 on [0,1): e^{b-1}(1-b)
    CHECK(w.components[0].density(0.3) == doctest::Approx(std::exp(-0.7) * 0.7).epsilon(1e-13));
    CHECK(w.components[0].tilted(0.3) == doctest::Approx(0.7).epsilon(1e-13));

    // horizon before the first block start: empty law
    HittingLaw e = hitting_law_exact(wedge, 1.0, 2);
    CHECK(e.components.empty());
    CHECK(e.total_mass() == 0.0);
}

TEST_CASE("monotone atom mass for packed data") {
    auto packed = blocks(InitialCondition::from_positions({0, 0, 0}));
    double prev = 0.0;
    for (double eta = -2.0; eta <= 2.0; eta += 0.25) {
        double m = hitting_law_exact(packed, eta, 3).atom ? 1.0 : 0.0;
        CHECK(m >= prev);
        CHECK(m == (eta >= 0.0 ? 1.0 : 0.0));
        prev = m;
    }
}

TEST_CASE("sweep agrees with inclusion-exclusion") {
    std::mt19937_64 rng(21);
    for (int rep = 0; rep < 25; ++rep) {
        InitialCondition ic = random_step_data(rng);
        StepProfile p = blocks(ic);
        const double eta = std::uniform_real_distribution<double>(-1.5, 1.2)(rng);
        HittingLaw s = hitting_law_exact(p, eta, ic.size());
        HittingLaw ie = hitting_law_exact(p, eta, ic.size(), ExactMode::inclusion_exclusion, 17);
        CHECK(s.atom == ie.atom);
        REQUIRE(s.components.size() == ie.components.size());
        CHECK(s.total_mass() <= 1.0 + 1e-9);
        for (std::size_t j = 0; j < s.components.size(); ++j) {
            const auto& a = s.components[j];
            const auto& b = ie.components[j];
            CHECK(a.ell == b.ell);
            CHECK(a.mass == doctest::Approx(b.mass).epsilon(1e-10));
            for (std::size_t i = 0; i + 1 < b.nodes.size(); ++i) CHECK(std::abs(a.density(b.nodes[i]) - b.values[i]) < 1e-11);
            // support only at block starts
            auto st = p.starts();
            CHECK(std::find(st.begin(), st.end(), a.ell) != st.end());
            CHECK(a.lo == ic.curve(a.ell));
        }
    }
}

TEST_CASE("grid recursion agrees with the exact law") {
    std::mt19937_64 rng(4);
    for (int rep = 0; rep < 6; ++rep) {
        InitialCondition ic = random_step_data(rng);
        const double eta = std::uniform_real_distribution<double>(-1.0, 1.2)(rng);
        HittingLaw ex = hitting_law_exact(blocks(ic), eta, ic.size());
        HittingLaw gr = hitting_law_grid(ic, eta, default_hitting_grid(ic, eta, ic.size()), ic.size());
        CHECK(ex.atom == gr.atom);
        CHECK(gr.total_mass() <= 1.0 + 1e-9);
        REQUIRE(ex.components.size() == gr.components.size());
        for (std::size_t j = 0; j < ex.components.size(); ++j) {
            CHECK(ex.components[j].ell == gr.components[j].ell);
            CHECK(l1_gap(ex.components[j], gr.components[j]) < 1e-6);
        }
    }
    auto packed = InitialCondition::from_positions({0, 0});
    CHECK(hitting_law_grid(packed, 0.2, {-5.0, 0.2}, 2).atom);
    // a coarse grid trips the mass check
    auto ic = InitialCondition(1, {0.0, -1.0, -1.0});
    std::vector<double> coarse = {-14.0, -7.0, 1.0};
    CHECK_THROWS_AS(hitting_law_grid(ic, 1.0, coarse, 4), ConvergenceError);
}

TEST_CASE("monte carlo hitting law") {
    auto wedge = InitialCondition(2, {0.0, 0.0, 0.0});
    McHittingLaw mc = hitting_law_mc(wedge, 1.0, 5, 1000000, 99);
    REQUIRE(mc.components.size() == 1);
    const double exact = 1.0 - 2.0 * std::exp(-1.0);
    CHECK(std::abs(mc.components[0].mass - exact) < 3.0 * mc.components[0].stderr_);

    McHittingLaw again = hitting_law_mc(wedge, 1.0, 5, 1000000, 99, 0.05, 1);
    CHECK(again.components[0].counts == mc.components[0].counts);

    auto packed = InitialCondition::from_positions({0, 0, 0});
    CHECK(hitting_law_mc(packed, 0.3, 3, 100, 1).atom_mass == 1.0);

    std::mt19937_64 rng(8);
    for (int rep = 0; rep < 4; ++rep) {
        InitialCondition ic = random_step_data(rng);
        const double eta = std::uniform_real_distribution<double>(-1.0, 1.2)(rng);
        HittingLaw ex = hitting_law_exact(blocks(ic), eta, ic.size());
        McHittingLaw m = hitting_law_mc(ic, eta, ic.size(), 200000, 5 + rep);
        if (ex.atom) {
            CHECK(m.atom_mass == 1.0);
            continue;
        }
        REQUIRE(m.components.size() == ex.components.size());
        for (std::size_t j = 0; j < ex.components.size(); ++j)
            CHECK(std::abs(m.components[j].mass - ex.components[j].mass) < std::max(1e-5, 3.0 * m.components[j].stderr_));
    }
}

TEST_CASE("csv dump") {
    std::ostringstream out;
    write_law_csv(out, hitting_law_exact(blocks(InitialCondition::from_positions({0, 0})), 1.0, 2));
    CHECK(out.str() == "ell,b,density\natom,1,1\n");
    std::ostringstream out2;
    write_law_csv(out2, hitting_law_exact(blocks(InitialCondition(2, {0.0, 0.0})), 1.0, 4), 3);
    CHECK(out2.str().find("2,0.5,") != std::string::npos);
}
