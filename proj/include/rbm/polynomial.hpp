#pragma once

#include <span>
#include <vector>

namespace rbm {

/// Real polynomial in one variable, coefficients in ascending degree. Trailing
/// zeros are trimmed, so degree() is the index of the last nonzero coefficient
/// (-1 for the zero polynomial).
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<double> coefficients);
    static Polynomial constant(double c);
    /// (x - root)^k / k!
    static Polynomial shifted_power(int k, double root);

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    std::span<const double> coefficients() const { return c_; }
    double coefficient(int k) const { return k >= 0 && k < static_cast<int>(c_.size()) ? c_[k] : 0.0; }

    double operator()(double x) const;

    Polynomial derivative(int order = 1) const;
    /// Antiderivative vanishing at 0.
    Polynomial antiderivative() const;
    /// Antiderivative vanishing at `lower`.
    Polynomial antiderivative_from(double lower) const;
    /// int_lo^hi p(x) dx
    double integral(double lo, double hi) const;

    Polynomial operator+(const Polynomial& o) const;
    Polynomial operator-(const Polynomial& o) const;
    Polynomial operator*(const Polynomial& o) const;
    Polynomial operator*(double s) const;
    Polynomial operator-() const { return *this * -1.0; }

private:
    void trim();
    std::vector<double> c_;
};

/// Action of e^{(s/2) d^2} on a polynomial: sum_j (s/2)^j/j! p^{(2j)}. The sum is
/// finite, so negative s (backward heat flow) is fine.
Polynomial heat_on_poly(double s, const Polynomial& p);

}  // namespace rbm
