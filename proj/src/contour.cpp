#include "rbm/contour.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "rbm/error.hpp"

namespace rbm {

namespace {

using cplx = std::complex<double>;

ContourResult vertical_line(double t, int n, double x, const ContourOptions& opt) {
    // Saddle of w^n e^{t w^2/2 - w x} on the real axis; the larger-|w| root is
    // the one the vertical line crosses in its steepest-descent direction.
    const double disc = x * x - 4.0 * n * t;
    double delta = x / (2.0 * t);
    if (n == 0) delta = x / t;
    else if (disc > 0.0) delta = (x + std::copysign(std::sqrt(disc), x)) / (2.0 * t);

    auto f = [&](double y) -> double {
        const cplx w(delta, y);
        if (n > 0 && std::abs(w) == 0.0) return 0.0;
        const cplx expo = (n > 0 ? static_cast<double>(n) * std::log(w) : cplx(0.0)) + 0.5 * t * w * w + (1.0 - w) * x;
        return std::exp(expo).real();
    };
    auto magnitude = [&](double y) {
        const double r2 = delta * delta + y * y;
        return 0.5 * n * std::log(std::max(r2, 1e-300)) + 0.5 * t * (delta * delta - y * y) + (1.0 - delta) * x;
    };

    // Half-width: double until the integrand envelope has dropped by 1e-12
    // below its value at the saddle (the envelope is even and unimodal in y far out).
    const double peak = std::max(magnitude(0.0), magnitude(std::sqrt(std::max(0.0, n / t - delta * delta))));
    double width = (1.0 + std::sqrt(static_cast<double>(n))) / std::sqrt(t);
    while (magnitude(width) - peak > std::log(1e-12) - 10.0 && width < 1e6) width *= 2.0;

    auto trapezoid = [&](int panels, double& l1) {
        const double h = width / panels;
        double sum = 0.5 * f(0.0);
        l1 = 0.5 * std::abs(f(0.0));
        for (int k = 1; k <= panels; ++k) {
            const double v = f(k * h);
            sum += v;
            l1 += std::abs(v);
        }
        l1 *= 2.0 * h / (2.0 * std::numbers::pi);
        return 2.0 * h * sum / (2.0 * std::numbers::pi);
    };

    int panels = 32;
    double l1 = 0.0;
    double coarse = trapezoid(panels, l1);
    double err = INFINITY;
    for (int r = 0; r < opt.max_refinements; ++r) {
        panels *= 2;
        double fine = trapezoid(panels, l1);
        err = std::abs(fine - coarse);
        if (err <= opt.tolerance * std::max(1.0, l1)) return {fine, err};
        coarse = fine;
        if (panels > (1 << 22)) break;
    }
    throw ConvergenceError("contour_eval(S): trapezoid rule did not converge", err);
}

ContourResult circle(double t, int n, double x, const ContourOptions& opt) {
    double r = opt.radius;
    if (r <= 0.0) {
        r = (n > 1) ? (-std::abs(x) + std::sqrt(x * x + 4.0 * t * (n - 1))) / (2.0 * t) : 1.0;
        if (!(r > 0.0)) r = 1.0;
    }
    auto sum_nodes = [&](int m, double& l1) {
        double sum = 0.0;
        l1 = 0.0;
        for (int j = 0; j < m; ++j) {
            const cplx w = std::polar(r, 2.0 * std::numbers::pi * j / m);
            const cplx expo = static_cast<double>(1 - n) * std::log(w) - 0.5 * t * w * w + (w - 1.0) * x;
            const cplx v = std::exp(expo);
            sum += v.real();
            l1 += std::abs(v);
        }
        l1 /= m;
        return sum / m;
    };
    int m = 2 * (n + 8);
    double l1 = 0.0;
    double coarse = sum_nodes(m, l1);
    double err = INFINITY;
    for (int k = 0; k < opt.max_refinements; ++k) {
        m *= 2;
        double fine = sum_nodes(m, l1);
        err = std::abs(fine - coarse);
        if (err <= opt.tolerance * std::max(1.0, l1)) return {fine, err};
        coarse = fine;
        if (m > (1 << 22)) break;
    }
    throw ConvergenceError("contour_eval(Sbar): circle rule did not converge", err);
}

}  // namespace

ContourResult contour_eval(ContourKind kind, double t, int n, double z1, double z2, const ContourOptions& options) {
    if (!(t > 0.0)) throw ArgumentError("contour_eval: t must be > 0");
    const double x = z1 - z2;
    if (kind == ContourKind::S) {
        if (n < 0) throw ArgumentError("contour_eval(S): n must be >= 0");
        return vertical_line(t, n, x, options);
    }
    if (n < 1) throw ArgumentError("contour_eval(Sbar): n must be >= 1");
    return circle(t, n, x, options);
}

}  // namespace rbm
