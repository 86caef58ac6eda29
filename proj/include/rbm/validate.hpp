#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rbm {

/// Outcome of one randomized cross-check. max_error is the worst case over all
/// cases, measured relative to max(1, |reference|) unless noted otherwise.
struct SuiteResult {
    std::string name;
    double max_error = 0.0;
    double tolerance = 0.0;
    int cases = 0;
    bool passed = false;
    std::string detail;
};

/// Gram matrices of the biorthogonal pair against the identity.
SuiteResult validate_gram(std::uint64_t seed, int conditions = 20, int n_max = 12);

/// Hitting, biorthogonal and operator-step kernels on random step data.
SuiteResult validate_representation(std::uint64_t seed, int points = 200, int n_max = 8);

/// Reflection against variational construction on shared noise (absolute gap).
SuiteResult validate_duality(std::uint64_t seed, int fields = 50, int max_particles = 20, int steps = 1000);

/// Contour integrals against the closed forms of S and Sbar.
SuiteResult validate_contour(std::uint64_t seed, int points = 200);

/// G_{0,n} by biorthogonal functions against the hitting formula, off the levels.
SuiteResult validate_g0n(std::uint64_t seed, int points = 100, int n_max = 6);

std::vector<SuiteResult> validate_suite(const std::string& name, std::uint64_t seed);

}  // namespace rbm
