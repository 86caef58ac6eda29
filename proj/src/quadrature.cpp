#include "rbm/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "rbm/error.hpp"

namespace rbm {

double QuadratureRule::total_weight() const {
    return std::accumulate(weights.begin(), weights.end(), 0.0);
}

QuadratureRule gauss_legendre(int order) {
    if (order < 1) throw ArgumentError("gauss_legendre: order must be >= 1");
    QuadratureRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    const int half = (order + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = z;
            for (int j = 2; j <= order; ++j) {
                double p2 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            if (order == 1) { p1 = z; p0 = 1.0; }
            dp = order * (z * p1 - p0) / (z * z - 1.0);
            double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        // recompute the derivative at the converged root
        double p0 = 1.0, p1 = z;
        for (int j = 2; j <= order; ++j) {
            double p2 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p0) / j;
            p0 = p1;
            p1 = p2;
        }
        if (order == 1) { p1 = z; p0 = 1.0; }
        dp = order * (z * p1 - p0) / (z * z - 1.0);
        double w = 2.0 / ((1.0 - z * z) * dp * dp);
        rule.nodes[i] = -z;
        rule.nodes[order - 1 - i] = z;
        rule.weights[i] = w;
        rule.weights[order - 1 - i] = w;
    }
    if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
    return rule;
}

QuadratureRule gauss_legendre(int order, double lo, double hi) {
    QuadratureRule rule = gauss_legendre(order);
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    for (std::size_t i = 0; i < rule.size(); ++i) {
        rule.nodes[i] = mid + half * rule.nodes[i];
        rule.weights[i] *= half;
    }
    return rule;
}

QuadratureRule build_quadrature(std::span<const Interval> intervals,
                                std::span<const double> splits,
                                int order,
                                double max_panel) {
    const QuadratureRule ref = gauss_legendre(order);
    QuadratureRule out;
    std::vector<double> cuts;
    for (const Interval& iv : intervals) {
        if (!(iv.lo < iv.hi)) throw ArgumentError("build_quadrature: interval needs lo < hi");
        cuts.assign({iv.lo, iv.hi});
        for (double s : splits)
            if (s > iv.lo && s < iv.hi) cuts.push_back(s);
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
        for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
            const double a = cuts[c], b = cuts[c + 1];
            int panels = 1;
            if (max_panel > 0.0) panels = std::max(1, static_cast<int>(std::ceil((b - a) / max_panel)));
            const double width = (b - a) / panels;
            for (int p = 0; p < panels; ++p) {
                const double lo = a + p * width;
                const double hi = (p + 1 == panels) ? b : lo + width;
                const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
                for (std::size_t i = 0; i < ref.size(); ++i) {
                    out.nodes.push_back(mid + half * ref.nodes[i]);
                    out.weights.push_back(half * ref.weights[i]);
                }
            }
        }
    }
    return out;
}

QuadratureRule build_quadrature(Interval interval,
                                std::span<const double> splits,
                                int order,
                                double max_panel) {
    return build_quadrature(std::span<const Interval>(&interval, 1), splits, order, max_panel);
}

}  // namespace rbm
