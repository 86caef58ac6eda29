#pragma once

#include <span>
#include <vector>

namespace rbm {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }
    double total_weight() const;
};

struct Interval {
    double lo;
    double hi;
};

/// Gauss–Legendre rule of the given order on [-1, 1] (Newton iteration on P_n).
QuadratureRule gauss_legendre(int order);

/// Gauss–Legendre rule mapped to [lo, hi].
QuadratureRule gauss_legendre(int order, double lo, double hi);

/// Composite Gauss–Legendre rule over the union of `intervals`. Every interval
/// is cut at each split point that falls strictly inside it, and every piece is
/// further divided into panels no wider than `max_panel` (if positive). Each
/// panel carries `order` nodes. No panel straddles a split point.
QuadratureRule build_quadrature(std::span<const Interval> intervals,
                                std::span<const double> splits,
                                int order,
                                double max_panel = 0.0);

/// Single-interval convenience overload.
QuadratureRule build_quadrature(Interval interval,
                                std::span<const double> splits,
                                int order,
                                double max_panel = 0.0);

}  // namespace rbm
