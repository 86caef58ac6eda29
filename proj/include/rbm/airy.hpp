#pragma once

namespace rbm {

/// Airy function Ai(x) for real x.
double airy_ai(double x);
/// Ai'(x).
double airy_ai_prime(double x);

}  // namespace rbm
