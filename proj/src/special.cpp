#include "loveres/special.hpp"

#include <cmath>
#include <complex>
#include <limits>

namespace loveres {

double sine_integral(double x) {
  const double ax = std::abs(x);
  const double sign = x < 0 ? -1.0 : 1.0;
  if (ax == 0.0) return 0.0;
  if (ax <= 4.0) {
    // alternating power series; terms stay below ~20 in magnitude for ax <= 4
    double term = ax, sum = ax;
    const double x2 = ax * ax;
    for (int n = 1; n < 40; ++n) {
      term *= -x2 / ((2.0 * n) * (2.0 * n + 1.0));
      const double add = term / (2.0 * n + 1.0);
      sum += add;
      if (std::abs(add) < 1e-18 * std::abs(sum)) break;
    }
    return sign * sum;
  }
  // E1(i x) by its continued fraction (modified Lentz); Si = pi/2 + Im E1(ix)
  using C = std::complex<double>;
  const double tiny = 1e-300;
  C b(1.0, ax);
  C c = 1.0 / tiny;
  C d = 1.0 / b;
  C h = d;
  for (int i = 1; i < 1000; ++i) {
    const double a = -double(i) * double(i);
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    const C del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  h *= C(std::cos(ax), -std::sin(ax));
  const double pi_2 = 1.5707963267948966;
  return sign * (pi_2 + h.imag());
}

}  // namespace loveres

namespace loveres {

std::complex<double> expint_e(int n, std::complex<double> z) {
  using C = std::complex<double>;
  constexpr double euler = 0.57721566490153286061;
  constexpr double eps = 1e-16;
  if (n < 1) return {std::numeric_limits<double>::quiet_NaN(), 0.0};
  if (z == C(0.0)) return n == 1 ? C(std::numeric_limits<double>::infinity()) : C(1.0 / (n - 1));
  if (std::abs(z) > 1.0) {
    // continued fraction, modified Lentz
    C b = z + double(n);
    C c = 1e300;
    C d = 1.0 / b;
    C h = d;
    for (int i = 1; i < 10000; ++i) {
      const double an = -double(i) * double(n - 1 + i);
      b += 2.0;
      d = 1.0 / (an * d + b);
      c = b + an / c;
      const C del = c * d;
      h *= del;
      if (std::abs(del - 1.0) < eps) break;
    }
    return h * std::exp(-z);
  }
  C ans = n - 1 != 0 ? C(1.0 / (n - 1)) : -std::log(z) - euler;
  C fact = 1.0;
  for (int i = 1; i < 200; ++i) {
    fact *= -z / double(i);
    C del;
    if (i != n - 1) {
      del = -fact / double(i - n + 1);
    } else {
      double psi = -euler;
      for (int ii = 1; ii <= n - 1; ++ii) psi += 1.0 / ii;
      del = fact * (-std::log(z) + psi);
    }
    ans += del;
    if (std::abs(del) < std::abs(ans) * eps) break;
  }
  return ans;
}

double fourier_tail(int n, double K, double y) {
  using C = std::complex<double>;
  const double pi = 3.14159265358979323846;
  C mi_n = 1.0;  // (-i)^n
  for (int i = 0; i < n; ++i) mi_n *= C(0.0, -1.0);
  const double Kp = std::pow(K, 1 - n);
  if (y == 0.0) {
    if (n == 1) return 0.5;
    return (mi_n * Kp / double(n - 1)).real() / pi;
  }
  return (mi_n * Kp * expint_e(n, C(0.0, -K * std::abs(y)))).real() / pi * (n % 2 == 1 && y < 0 ? -1.0 : 1.0);
}

}  // namespace loveres
