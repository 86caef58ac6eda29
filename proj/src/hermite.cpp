#include "rbm/hermite.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rbm/error.hpp"
#include "rbm/quadrature.hpp"

namespace rbm {

namespace {

constexpr double kRescale = 1e150;
const double kLogRescale = std::log(kRescale);

// Upper-tail integral for x > 0, where the forward recurrence cancels.
double hh_positive(int n, double x) {
    const double peak = 0.5 * (-x + std::sqrt(x * x + 4.0 * n));
    const double upper = peak + 40.0;
    static const QuadratureRule ref = gauss_legendre(16);
    const double lg = std::lgamma(n + 1.0);
    double sum = 0.0;
    const double panel = 2.0;
    for (double lo = 0.0; lo < upper; lo += panel) {
        const double mid = lo + 0.5 * panel, half = 0.5 * panel;
        for (std::size_t i = 0; i < ref.size(); ++i) {
            const double r = mid + half * ref.nodes[i];
            const double log_term = (n > 0 ? n * std::log(r) : 0.0) - lg - 0.5 * (x + r) * (x + r);
            sum += half * ref.weights[i] * std::exp(log_term);
        }
    }
    return sum;
}

}  // namespace

double hermite(int k, double x) {
    if (k < 0) throw ArgumentError("hermite: degree must be >= 0");
    if (k > 150) {
        LogValue v = hermite_normalized_log(k, x);
        const double log_abs = v.log_abs + 0.5 * std::lgamma(k + 1.0);
        if (log_abs > 709.0) throw OverflowError("hermite: H_k(x) overflows; use hermite_normalized_log");
        return v.sign == 0 ? 0.0 : v.sign * std::exp(log_abs);
    }
    if (k == 0) return 1.0;
    double prev = 1.0, cur = x;
    for (int j = 1; j < k; ++j) {
        const double next = x * cur - j * prev;
        prev = cur;
        cur = next;
    }
    if (!std::isfinite(cur)) throw OverflowError("hermite: H_k(x) overflows; use hermite_normalized_log");
    return cur;
}

LogValue hermite_normalized_log(int k, double x) {
    if (k < 0) throw ArgumentError("hermite_normalized_log: degree must be >= 0");
    if (k == 0) return {0.0, 1};
    double prev = 1.0, cur = x, log_scale = 0.0;
    for (int j = 1; j < k; ++j) {
        const double next = (x * cur - std::sqrt(static_cast<double>(j)) * prev) / std::sqrt(j + 1.0);
        prev = cur;
        cur = next;
        if (std::abs(cur) > kRescale) {
            cur /= kRescale;
            prev /= kRescale;
            log_scale += kLogRescale;
        }
    }
    return LogValue::from(cur).scaled(log_scale);
}

HermiteEvaluator::HermiteEvaluator(int max_degree)
    : max_degree_(max_degree), mantissa_(max_degree + 1), log_scale_(max_degree + 1) {
    if (max_degree < 0) throw ArgumentError("HermiteEvaluator: max_degree must be >= 0");
}

void HermiteEvaluator::evaluate(double x) {
    double log_scale = 0.0;
    double prev = 1.0, cur = x;
    mantissa_[0] = 1.0;
    log_scale_[0] = 0.0;
    if (max_degree_ >= 1) {
        mantissa_[1] = x;
        log_scale_[1] = 0.0;
    }
    for (int j = 1; j < max_degree_; ++j) {
        const double next = (x * cur - std::sqrt(static_cast<double>(j)) * prev) / std::sqrt(j + 1.0);
        prev = cur;
        cur = next;
        if (std::abs(cur) > kRescale) {
            cur /= kRescale;
            prev /= kRescale;
            log_scale += kLogRescale;
        }
        mantissa_[j + 1] = cur;
        log_scale_[j + 1] = log_scale;
    }
}

LogValue HermiteEvaluator::at(int k) const {
    return LogValue::from(mantissa_.at(k)).scaled(log_scale_.at(k));
}

LogValue psi_log(int n, double t, double x) {
    if (!(t > 0.0)) throw ArgumentError("psi: t must be > 0");
    const double st = std::sqrt(t);
    const double u = x / st;
    if (n >= 0) {
        const double base = -0.5 * n * std::log(t) - 0.5 * std::log(2.0 * std::numbers::pi * t) - 0.5 * u * u +
                            0.5 * std::lgamma(n + 1.0);
        return hermite_normalized_log(n, u).scaled(base);
    }
    const int m = -n;
    const double h = hh_function(m - 1, u);
    return LogValue::from(h).scaled(0.5 * (m - 1) * std::log(t) - 0.5 * std::log(2.0 * std::numbers::pi));
}

double psi(int n, double t, double x) { return psi_log(n, t, x).value(); }

LogValue psibar_log(int n, double t, double x) {
    if (!(t > 0.0)) throw ArgumentError("psibar: t must be > 0");
    if (n < 0) throw ArgumentError("psibar: n must be >= 0");
    const double u = x / std::sqrt(t);
    return hermite_normalized_log(n, u).scaled(0.5 * n * std::log(t) - 0.5 * std::lgamma(n + 1.0));
}

double psibar(int n, double t, double x) { return psibar_log(n, t, x).value(); }

std::pair<double, double> psi_pair(int n, double t, double x) {
    if (n < 0) throw ArgumentError("psi_pair: n must be >= 0");
    return {psi(n, t, x), psibar(n, t, x)};
}

double oscillator(int n, double x) {
    return hermite_normalized_log(n, x).scaled(-0.25 * std::log(2.0 * std::numbers::pi) - 0.25 * x * x).value();
}

double hh_function(int n, double x) {
    if (n < -1) throw ArgumentError("hh_function: n must be >= -1");
    const double hm1 = std::exp(-0.5 * x * x);
    if (n == -1) return hm1;
    const double h0 = std::sqrt(std::numbers::pi / 2.0) * std::erfc(x / std::numbers::sqrt2);
    if (n == 0) return h0;
    if (x > 0.0) return hh_positive(n, x);
    double prev = hm1, cur = h0;
    for (int k = 1; k <= n; ++k) {
        const double next = (prev - x * cur) / k;
        prev = cur;
        cur = next;
    }
    return cur;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double gaussian(double x, double var) {
    return std::exp(-0.5 * x * x / var) / std::sqrt(2.0 * std::numbers::pi * var);
}

}  // namespace rbm
