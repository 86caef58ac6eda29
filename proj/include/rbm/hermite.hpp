#pragma once

#include <cmath>
#include <utility>
#include <vector>

namespace rbm {

/// A real number stored as sign * exp(log_abs). Zero has sign 0.
struct LogValue {
    double log_abs = -INFINITY;
    int sign = 0;

    double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }
    static LogValue from(double v) {
        if (v == 0.0) return {};
        return {std::log(std::abs(v)), v > 0 ? 1 : -1};
    }
    LogValue operator*(const LogValue& o) const {
        if (sign == 0 || o.sign == 0) return {};
        return {log_abs + o.log_abs, sign * o.sign};
    }
    LogValue scaled(double log_factor) const {
        if (sign == 0) return {};
        return {log_abs + log_factor, sign};
    }
};

/// Probabilists' Hermite polynomial H_k(x), via H_{k+1} = x H_k - k H_{k-1}.
/// Degrees above 150 go through the normalized log-scale recurrence; throws
/// OverflowError when the unnormalized value is not representable.
double hermite(int k, double x);

/// (log|H_k(x)/sqrt(k!)|, sign), stable for large k.
LogValue hermite_normalized_log(int k, double x);

/// Evaluates H_k(x)/sqrt(k!) for all k <= max_degree at one x, with a shared
/// running exponent so that large degrees neither overflow nor underflow.
class HermiteEvaluator {
public:
    explicit HermiteEvaluator(int max_degree);

    int max_degree() const { return max_degree_; }
    /// Fills the workspace for abscissa x; returns log|H_k/sqrt(k!)| and signs via at().
    void evaluate(double x);
    LogValue at(int k) const;

private:
    int max_degree_;
    std::vector<double> mantissa_;
    std::vector<double> log_scale_;
};

/// psi_n(t,x) = t^{-n/2} (2 pi t)^{-1/2} e^{-x^2/2t} H_n(x/sqrt t) for n >= 0.
/// For n = -m < 0 it is the m-fold upper-tail integral
///   int_x^inf (y-x)^{m-1}/(m-1)! (2 pi t)^{-1/2} e^{-y^2/2t} dy,
/// which continues the family under psi_{n-1} = -(d/dx)^{-1} psi_n.
LogValue psi_log(int n, double t, double x);
double psi(int n, double t, double x);

/// psibar_n(t,x) = t^{n/2}/n! H_n(x/sqrt t), n >= 0.
LogValue psibar_log(int n, double t, double x);
double psibar(int n, double t, double x);

/// (psi_n(t,x), psibar_n(t,x)); rejects t <= 0 and n < 0.
std::pair<double, double> psi_pair(int n, double t, double x);

/// Oscillator wavefunction (2 pi)^{-1/4} (n!)^{-1/2} e^{-x^2/4} H_n(x).
double oscillator(int n, double x);

/// Hh_n(x) = int_x^inf (s-x)^n/n! e^{-s^2/2} ds for n >= -1 (Hh_{-1} = e^{-x^2/2}).
double hh_function(int n, double x);

/// Standard normal CDF.
double normal_cdf(double x);

/// Gaussian density with variance `var` at x.
double gaussian(double x, double var);

}  // namespace rbm
