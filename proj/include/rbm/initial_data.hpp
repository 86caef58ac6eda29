#pragma once

#include <cmath>
#include <iosfwd>
#include <string>
#include <vector>

namespace rbm {

/// Right-finite ordered initial positions X0(1) >= X0(2) >= ... >= X0(N).
/// A leading run of +inf levels is stored as a count, never as a float.
class InitialCondition {
public:
    InitialCondition() = default;
    InitialCondition(int infinite_prefix, std::vector<double> finite_levels);

    /// Validates ordering; a leading run of +inf entries becomes the prefix.
    static InitialCondition from_positions(const std::vector<double>& levels);

    int size() const { return prefix_ + static_cast<int>(finite_.size()); }
    int infinite_prefix() const { return prefix_; }
    const std::vector<double>& finite_levels() const { return finite_; }

    /// X0(i), 1-based; +inf inside the prefix.
    double level(int i) const;
    /// Hitting curve c_k = X0(k+1), k >= 0.
    double curve(int k) const { return level(k + 1); }
    bool finite_up_to(int n) const { return n <= size() && prefix_ == 0; }

    InitialCondition shifted(double c) const;

    bool operator==(const InitialCondition&) const = default;

private:
    int prefix_ = 0;
    std::vector<double> finite_;
};

struct Block {
    int start;     // hitting-curve index k of the first entry (particle start+1)
    double level;
    int length;
};

/// Maximal runs of equal finite levels of the hitting curve. Levels strictly
/// decrease from block to block; the +inf prefix precedes the first block.
struct StepProfile {
    int infinite_prefix = 0;
    std::vector<Block> blocks;

    int size() const;
    std::vector<int> starts() const;
};

StepProfile blocks(const InitialCondition& ic);
InitialCondition from_blocks(const StepProfile& profile);

/// epsilon-approximation of multiple narrow wedges at a_1 > a_2 > ... (a_1 <= 0):
/// block starts l_k = ceil(-2 a_k / eps), X0(i) = +inf for i <= l_1 and
/// X0(i) = 2 a_p / eps for l_p < i <= l_{p+1}; `length` particles in total.
/// Throws if eps is too coarse to separate the wedges or length <= l_last.
InitialCondition narrow_wedge_approx(const std::vector<double>& a, double eps, int length);
/// Block start indices l_k for the same construction.
std::vector<int> narrow_wedge_starts(const std::vector<double>& a, double eps);

/// x -> -eps^{1/2} (X0(-2x/eps) - 2x/eps), linearly interpolated between the
/// lattice points x = -eps i / 2, i = 1..N; -inf where the level is +inf.
class RescaledProfile {
public:
    RescaledProfile(const InitialCondition& ic, double eps);
    double lower() const { return lo_; }
    double upper() const { return hi_; }
    double operator()(double x) const;

private:
    InitialCondition ic_;
    double eps_;
    double lo_, hi_;
};

RescaledProfile rescale_profile(const InitialCondition& ic, double eps);

/// CSV `index,position` with 1-based contiguous indices; an optional header
/// line, blank lines and '#' comments are skipped; `inf` only in a leading run.
InitialCondition read_initial_csv(std::istream& in);
InitialCondition read_initial_csv_file(const std::string& path);

}  // namespace rbm
