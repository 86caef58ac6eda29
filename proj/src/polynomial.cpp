#include "rbm/polynomial.hpp"

#include <algorithm>
#include <cmath>

namespace rbm {

Polynomial::Polynomial(std::vector<double> coefficients) : c_(std::move(coefficients)) { trim(); }

Polynomial Polynomial::constant(double c) { return Polynomial({c}); }

Polynomial Polynomial::shifted_power(int k, double root) {
    // binomial expansion of (x - r)^k / k! = sum_j x^j/j! (-r)^{k-j}/(k-j)!
    std::vector<double> c(k + 1);
    for (int j = 0; j <= k; ++j)
        c[j] = std::pow(-root, k - j) / (std::tgamma(j + 1.0) * std::tgamma(k - j + 1.0));
    return Polynomial(std::move(c));
}

void Polynomial::trim() {
    while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
}

double Polynomial::operator()(double x) const {
    double acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
    return acc;
}

Polynomial Polynomial::derivative(int order) const {
    if (order <= 0) return *this;
    if (static_cast<int>(c_.size()) <= order) return {};
    std::vector<double> d(c_.size() - order);
    for (std::size_t k = 0; k < d.size(); ++k) {
        double f = 1.0;
        for (int j = 1; j <= order; ++j) f *= static_cast<double>(k + j);
        d[k] = c_[k + order] * f;
    }
    return Polynomial(std::move(d));
}

Polynomial Polynomial::antiderivative() const {
    if (c_.empty()) return {};
    std::vector<double> a(c_.size() + 1, 0.0);
    for (std::size_t k = 0; k < c_.size(); ++k) a[k + 1] = c_[k] / static_cast<double>(k + 1);
    return Polynomial(std::move(a));
}

Polynomial Polynomial::antiderivative_from(double lower) const {
    Polynomial a = antiderivative();
    return a - Polynomial::constant(a(lower));
}

double Polynomial::integral(double lo, double hi) const {
    Polynomial a = antiderivative();
    return a(hi) - a(lo);
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
    std::vector<double> r(std::max(c_.size(), o.c_.size()), 0.0);
    for (std::size_t k = 0; k < c_.size(); ++k) r[k] += c_[k];
    for (std::size_t k = 0; k < o.c_.size(); ++k) r[k] += o.c_[k];
    return Polynomial(std::move(r));
}

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + o * -1.0; }

Polynomial Polynomial::operator*(const Polynomial& o) const {
    if (c_.empty() || o.c_.empty()) return {};
    std::vector<double> r(c_.size() + o.c_.size() - 1, 0.0);
    for (std::size_t i = 0; i < c_.size(); ++i)
        for (std::size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
    return Polynomial(std::move(r));
}

Polynomial Polynomial::operator*(double s) const {
    std::vector<double> r = c_;
    for (double& v : r) v *= s;
    return Polynomial(std::move(r));
}

Polynomial heat_on_poly(double s, const Polynomial& p) {
    Polynomial acc = p;
    Polynomial term = p;
    double factor = 1.0;
    for (int j = 1; 2 * j <= p.degree(); ++j) {
        term = term.derivative(2);
        factor *= 0.5 * s / j;
        acc = acc + term * factor;
    }
    return acc;
}

}  // namespace rbm
