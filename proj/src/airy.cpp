#include "rbm/airy.hpp"

#include <boost/math/special_functions/airy.hpp>

namespace rbm {

double airy_ai(double x) { return boost::math::airy_ai(x); }

double airy_ai_prime(double x) { return boost::math::airy_ai_prime(x); }

}  // namespace rbm
