#include "rbm/initial_data.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "rbm/error.hpp"

namespace rbm {

InitialCondition::InitialCondition(int infinite_prefix, std::vector<double> finite_levels)
    : prefix_(infinite_prefix), finite_(std::move(finite_levels)) {
    if (prefix_ < 0) throw ArgumentError("initial condition: negative +inf prefix");
    if (size() < 1) throw ArgumentError("initial condition: empty");
    for (std::size_t i = 0; i < finite_.size(); ++i) {
        if (!std::isfinite(finite_[i]))
            throw ArgumentError("initial condition: non-finite level at index " + std::to_string(prefix_ + i + 1));
        if (i > 0 && finite_[i] > finite_[i - 1])
            throw ArgumentError("initial condition: levels increase at index " + std::to_string(prefix_ + i + 1));
    }
}

InitialCondition InitialCondition::from_positions(const std::vector<double>& levels) {
    if (levels.empty()) throw ArgumentError("initial condition: empty");
    int prefix = 0;
    while (prefix < static_cast<int>(levels.size()) && levels[prefix] == INFINITY) ++prefix;
    return InitialCondition(prefix, std::vector<double>(levels.begin() + prefix, levels.end()));
}

double InitialCondition::level(int i) const {
    if (i < 1 || i > size()) throw ArgumentError("initial condition: index " + std::to_string(i) + " out of range");
    if (i <= prefix_) return INFINITY;
    return finite_[i - prefix_ - 1];
}

InitialCondition InitialCondition::shifted(double c) const {
    std::vector<double> f = finite_;
    for (double& v : f) v += c;
    return InitialCondition(prefix_, std::move(f));
}

int StepProfile::size() const {
    int n = infinite_prefix;
    for (const Block& b : blocks) n += b.length;
    return n;
}

std::vector<int> StepProfile::starts() const {
    std::vector<int> s;
    for (const Block& b : blocks) s.push_back(b.start);
    return s;
}

StepProfile blocks(const InitialCondition& ic) {
    StepProfile p;
    p.infinite_prefix = ic.infinite_prefix();
    const auto& f = ic.finite_levels();
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (p.blocks.empty() || f[i] != p.blocks.back().level)
            p.blocks.push_back({ic.infinite_prefix() + static_cast<int>(i), f[i], 1});
        else
            ++p.blocks.back().length;
    }
    return p;
}

InitialCondition from_blocks(const StepProfile& profile) {
    std::vector<double> f;
    for (const Block& b : profile.blocks) f.insert(f.end(), b.length, b.level);
    return InitialCondition(profile.infinite_prefix, std::move(f));
}

std::vector<int> narrow_wedge_starts(const std::vector<double>& a, double eps) {
    if (!(eps > 0.0)) throw ArgumentError("narrow wedge: eps must be > 0");
    if (a.empty()) throw ArgumentError("narrow wedge: no wedge positions");
    if (a.front() > 0.0) throw ArgumentError("narrow wedge: a_1 must be <= 0");
    std::vector<int> l;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (k > 0 && !(a[k] < a[k - 1])) throw ArgumentError("narrow wedge: positions must strictly decrease");
        const double raw = -2.0 * a[k] / eps;
        // guard against 4.0000000001 from rounding in -2a/eps
        l.push_back(static_cast<int>(std::ceil(raw - 1e-9 * std::max(1.0, std::abs(raw)))));
        if (k > 0 && l[k] <= l[k - 1])
            throw ArgumentError("narrow wedge: eps too coarse to separate wedges " + std::to_string(k) + " and " +
                                std::to_string(k + 1));
    }
    return l;
}

InitialCondition narrow_wedge_approx(const std::vector<double>& a, double eps, int length) {
    std::vector<int> l = narrow_wedge_starts(a, eps);
    if (length <= l.back()) throw ArgumentError("narrow wedge: length must exceed the last block start");
    std::vector<double> f;
    for (std::size_t p = 0; p < l.size(); ++p) {
        const int end = p + 1 < l.size() ? l[p + 1] : length;
        f.insert(f.end(), end - l[p], 2.0 * a[p] / eps);
    }
    return InitialCondition(l.front(), std::move(f));
}

RescaledProfile::RescaledProfile(const InitialCondition& ic, double eps) : ic_(ic), eps_(eps) {
    if (!(eps > 0.0)) throw ArgumentError("rescale_profile: eps must be > 0");
    lo_ = -0.5 * eps * ic.size();
    hi_ = -0.5 * eps;
}

double RescaledProfile::operator()(double x) const {
    if (x < lo_ || x > hi_) throw ArgumentError("rescale_profile: x outside the index range");
    auto at = [&](int i) -> double {
        const double X = ic_.level(i);
        if (X == INFINITY) return -INFINITY;
        return -std::sqrt(eps_) * (X + i);  // 2x/eps = -i at lattice points
    };
    const double s = -2.0 * x / eps_;
    const int i0 = std::clamp(static_cast<int>(std::floor(s)), 1, ic_.size());
    const int i1 = std::min(i0 + 1, ic_.size());
    const double w = std::clamp(s - i0, 0.0, 1.0);
    const double v0 = at(i0), v1 = at(i1);
    if (w == 0.0) return v0;
    if (w == 1.0) return v1;
    if (std::isinf(v0) || std::isinf(v1)) return -INFINITY;
    return (1.0 - w) * v0 + w * v1;
}

RescaledProfile rescale_profile(const InitialCondition& ic, double eps) { return RescaledProfile(ic, eps); }

InitialCondition read_initial_csv(std::istream& in) {
    std::vector<double> levels;
    std::string line;
    int lineno = 0;
    bool header_allowed = true;
    bool finite_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        auto comma = line.find(',');
        if (comma == std::string::npos) throw ArgumentError("csv line " + std::to_string(lineno) + ": expected index,position");
        std::string idx = line.substr(0, comma), pos = line.substr(comma + 1);
        auto strip = [](std::string s) {
            s.erase(0, s.find_first_not_of(" \t\r"));
            s.erase(s.find_last_not_of(" \t\r") + 1);
            return s;
        };
        idx = strip(idx);
        pos = strip(pos);
        if (header_allowed && !idx.empty() && !std::isdigit(static_cast<unsigned char>(idx[0]))) {
            header_allowed = false;
            continue;
        }
        header_allowed = false;
        std::size_t used = 0;
        long index = 0;
        try {
            index = std::stol(idx, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != idx.size() || idx.empty()) throw ArgumentError("csv line " + std::to_string(lineno) + ": bad index");
        if (index != static_cast<long>(levels.size()) + 1)
            throw ArgumentError("csv line " + std::to_string(lineno) + ": indices must be 1-based and contiguous");
        std::string lower = pos;
        std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
        if (lower == "inf" || lower == "+inf") {
            if (finite_seen) throw ArgumentError("csv line " + std::to_string(lineno) + ": inf allowed only in a leading run");
            levels.push_back(INFINITY);
            continue;
        }
        double v = 0.0;
        try {
            v = std::stod(pos, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != pos.size() || pos.empty() || !std::isfinite(v))
            throw ArgumentError("csv line " + std::to_string(lineno) + ": bad position");
        finite_seen = true;
        levels.push_back(v);
    }
    return InitialCondition::from_positions(levels);
}

InitialCondition read_initial_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    return read_initial_csv(in);
}

}  // namespace rbm
