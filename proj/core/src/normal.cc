#include <cmath>
#include <numbers>

#include "baltor/probmodel.h"

namespace baltor {
namespace {

// erf(x) = 2/sqrt(pi) exp(-x^2) sum_n 2^n x^(2n+1) / (2n+1)!!, all terms
// positive so there is no cancellation. Used for 0 <= x < 1.
double ErfSeries(double x) {
  const double two_x2 = 2.0 * x * x;
  double term = x;
  double sum = x;
  for (int n = 1; n < 500; ++n) {
    term *= two_x2 / (2.0 * n + 1.0);
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return 2.0 / std::sqrt(std::numbers::pi) * std::exp(-x * x) * sum;
}

// erfc(x) = exp(-x^2) / sqrt(pi) / (x + (1/2)/(x + (2/2)/(x + (3/2)/(x + ...))))
// evaluated with the modified Lentz method. Used for x >= 1.
double ErfcContinuedFraction(double x) {
  constexpr double kTiny = 1e-300;
  double f = x;
  double c = x;
  double d = 0.0;
  for (int k = 1; k < 5000; ++k) {
    const double a = 0.5 * k;
    d = x + a * d;
    if (d == 0.0) d = kTiny;
    c = x + a / c;
    if (c == 0.0) c = kTiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-x * x) / (std::sqrt(std::numbers::pi) * f);
}

// Complementary error function for x >= 0.
double ErfcNonNegative(double x) {
  if (x > 27.0) return 0.0;
  if (x < 1.0) return 1.0 - ErfSeries(x);
  return ErfcContinuedFraction(x);
}

}  // namespace

// Phi(z) for z < 0 is the lower tail erfc(-z/sqrt 2)/2 computed directly, and
// Phi(z) = 1 - Phi(-z) otherwise, so Phi(z) + Phi(-z) == 1 up to one rounding.
double StdNormalCdf(double z) {
  if (std::isnan(z)) return z;
  const double tail = 0.5 * ErfcNonNegative(std::abs(z) / std::numbers::sqrt2);
  return z < 0.0 ? tail : 1.0 - tail;
}

}  // namespace baltor
