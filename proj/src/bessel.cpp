#include "icefill/bessel.hpp"

#include <cmath>

namespace icefill {
namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Ascending power series sum_k (-1)^k (x^2/4)^k / (k!)^2. Forty terms keep
// the truncation error below 1e-12 up to the switch point x = 12.
double j0_series(double x) {
  const double q = -0.25 * x * x;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 40; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
  }
  return sum;
}

// Hankel asymptotic expansion for large arguments:
//   J0(x) = sqrt(2/(pi x)) (P cos(chi) + Qt sin(chi)),  chi = x - pi/4
// with coefficients a_m = prod_{j<=m} (2j-1)^2 / m!, split into even (P) and
// odd (Qt) sub-series in 1/(8x). Eight terms each; worst absolute error is
// ~2e-12 beyond x = 12 (the sub-series diverge eventually, so more terms
// would hurt, not help).
double j0_asymptotic(double x) {
  const double inv8x = 1.0 / (8.0 * x);
  double a = 1.0;  // a_0
  double p = 0.0, qt = 0.0, power = 1.0;
  double sign_p = 1.0, sign_q = 1.0;
  for (int m = 0; m < 2 * 8; ++m) {
    if (m % 2 == 0) {
      p += sign_p * a * power;
      sign_p = -sign_p;
    } else {
      qt += sign_q * a * power;
      sign_q = -sign_q;
    }
    const double mm = static_cast<double>(m + 1);
    a *= (2.0 * mm - 1.0) * (2.0 * mm - 1.0) / mm;
    power *= inv8x;
  }
  const double chi = x - 0.25 * kPi;
  return std::sqrt(2.0 / (kPi * x)) * (p * std::cos(chi) + qt * std::sin(chi));
}

}  // namespace

double bessel_j0(double x) noexcept {
  const double ax = std::fabs(x);
  return ax < 12.0 ? j0_series(ax) : j0_asymptotic(ax);
}

}  // namespace icefill
