#pragma once

// Closed forms used as independent references by the tests. Nothing here
// calls into the library's numerics.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "loveres/profile.hpp"

namespace oracle {

using C = std::complex<double>;
constexpr double pi = 3.14159265358979323846;

// Constant potential V0 on [0, a]: propagate f = e^{ikx} from x = a back to 0
// through the matched exponentials e^{+-i q x}, q = sqrt(k^2 - V0).
struct Step {
  double V0 = 4.0, a = 1.0, h = 0.0;

  C f0(C k) const {
    const C q = std::sqrt(k * k - V0), E = std::exp(C(0, 1) * k * a);
    return E * (std::cos(q * a) - C(0, 1) * k * sinc(q) * a);
  }
  C fp0(C k) const {
    const C q = std::sqrt(k * k - V0), E = std::exp(C(0, 1) * k * a);
    return E * (q * q * a * sinc(q) + C(0, 1) * k * std::cos(q * a));
  }
  C fh(C k) const { return h * f0(k) + fp0(k); }

  // d/dk by differentiating the closed form, with dq/dk = k/q folded into
  // d/dk sin(qa)/q and d/dk cos(qa).
  C fh_dk(C k) const {
    const C i(0, 1);
    const C q = std::sqrt(k * k - V0), E = std::exp(i * k * a);
    const C c = std::cos(q * a), s_over_q = a * sinc(q);
    // d cos(qa)/dk = -a k sin(qa)/q ; d (sin(qa)/q)/dk = k (a cos(qa) - sin(qa)/q)/q^2
    const C dc = -a * k * s_over_q;
    const C ds = std::abs(q) > 1e-6 ? k * (a * c - s_over_q) / (q * q) : -k * a * a * a / 3.0;
    const C g0 = c - i * k * s_over_q, g1 = q * q * s_over_q + i * k * c;
    const C dg0 = dc - i * s_over_q - i * k * ds;
    const C dg1 = 2.0 * k * s_over_q + q * q * ds + i * c + i * k * dc;
    return E * (i * a * (h * g0 + g1) + h * dg0 + dg1);
  }

 private:
  C sinc(C q) const {  // sin(q a)/(q a)
    const C z = q * a;
    return std::abs(z) < 1e-6 ? 1.0 - z * z / 6.0 : std::sin(z) / z;
  }
};

// Newton on the closed form, for matching computed zeros to oracle roots.
inline C polish(const Step& s, C k, int iters = 50) {
  for (int n = 0; n < iters; ++n) {
    const C step = s.fh(k) / s.fh_dk(k);
    k -= step;
    if (std::abs(step) < 1e-15 * (1.0 + std::abs(k))) break;
  }
  return k;
}

// Marchenko equation with the degenerate kernel G0(y) = c e^{-kappa y} on
// [x, U]: A(x,t) = -c e^{-kappa(x+t)} / (1 + c (e^{-2 kappa x} - e^{-2 kappa U}) / (2 kappa)).
inline double rank_one_A(double c, double kappa, double x, double t, double U) {
  const double d = 1.0 + c * (std::exp(-2 * kappa * x) - std::exp(-2 * kappa * U)) / (2 * kappa);
  return -c * std::exp(-kappa * (x + t)) / d;
}

// mu = mu_I (1 + eps b)^2 with b = (4x(1-x))^8 on [0, 1]; then
// (sqrt mu)''/sqrt mu = eps b''/(1 + eps b) exactly.
struct Bump {
  double mu_I = 2.0, eps = 0.1, x_I = 1.0;

  double b(double x) const { return x >= x_I ? 0.0 : std::pow(u(x), 8); }
  double b1(double x) const { return x >= x_I ? 0.0 : 8.0 * std::pow(u(x), 7) * du(x); }
  double b2(double x) const {
    if (x >= x_I) return 0.0;
    const double U = u(x);
    return 56.0 * std::pow(U, 6) * du(x) * du(x) + 8.0 * std::pow(U, 7) * (-8.0 / (x_I * x_I));
  }
  double mu(double x) const { return mu_I * (1 + eps * b(x)) * (1 + eps * b(x)); }
  double V(double x, double omega) const {
    return eps * b2(x) / (1 + eps * b(x)) - omega * omega / mu(x) + omega * omega / mu_I;
  }
  // h = (1/2) mu'(0)/mu(0) in depth coordinates
  double h() const { return eps * b1(0.0) / (1 + eps * b(0.0)); }

  loveres::ShearProfile profile(int n) const {
    loveres::ShearProfile p;
    p.mu_tail = mu_I;
    p.x_I = x_I;
    for (int i = 0; i <= n + n / 10; ++i) {
      const double x = x_I * i / n;
      p.depth_grid.push_back(x);
      p.mu.push_back(mu(x));
    }
    return p;
  }

 private:
  double u(double x) const { return 4.0 * (x / x_I) * (1.0 - x / x_I); }
  double du(double x) const { return 4.0 * (1.0 - 2.0 * x / x_I) / x_I; }
};

}  // namespace oracle

// Hand-rolled generators for the property tests.
namespace gen {

using C = std::complex<double>;

struct Rng {
  std::mt19937_64 eng;
  explicit Rng(uint64_t seed) : eng(seed) {}
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(eng); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(eng); }
  C complex(double re_lo, double re_hi, double im_lo, double im_hi) {
    return {uniform(re_lo, re_hi), uniform(im_lo, im_hi)};
  }
};

// mu_I (1 + sum_j a_j g_j(x))^2 with smooth bumps g_j = (4 s (1 - s))^6 on
// random subintervals of [0, x_I], s the local coordinate. Always positive.
inline loveres::ShearProfile bump_profile(Rng& r, int n = 1024) {
  loveres::ShearProfile p;
  p.x_I = r.uniform(0.5, 2.0);
  p.mu_tail = r.uniform(0.5, 4.0);
  const int nb = r.integer(1, 3);
  std::vector<double> lo(nb), hi(nb), amp(nb);
  for (int j = 0; j < nb; ++j) {
    lo[j] = r.uniform(0.0, 0.6) * p.x_I;
    hi[j] = lo[j] + r.uniform(0.2, 1.0) * (p.x_I - lo[j]);
    amp[j] = r.uniform(-0.3, 0.3);
  }
  amp[nb - 1] = amp[nb - 1] >= 0 ? amp[nb - 1] + 0.05 : amp[nb - 1] - 0.05;
  hi[nb - 1] = p.x_I;  // reaches the end, so the last cell is nonconstant
  for (int i = 0; i <= n + n / 10; ++i) {
    const double x = p.x_I * i / n;
    double s = 1.0;
    for (int j = 0; j < nb; ++j)
      if (x > lo[j] && x < hi[j]) {
        const double t = (x - lo[j]) / (hi[j] - lo[j]);
        s += amp[j] * std::pow(4 * t * (1 - t), 6);
      }
    p.depth_grid.push_back(x);
    p.mu.push_back(p.mu_tail * s * s);
  }
  return p;
}

// Smooth potential on [0, x_I]: a few Gaussian-like pieces cut off at x_I.
inline loveres::PotentialProfile smooth_potential(Rng& r, int n = 512) {
  const double x_I = r.uniform(0.5, 1.5);
  const int nb = r.integer(1, 3);
  std::vector<double> c(nb), w(nb), a(nb);
  for (int j = 0; j < nb; ++j) {
    c[j] = r.uniform(0.0, x_I);
    w[j] = r.uniform(0.1, 0.5) * x_I;
    a[j] = r.uniform(-6.0, 6.0);
  }
  const double h = r.uniform(-1.0, 1.0);
  return loveres::make_potential(
      x_I, n,
      [&](double x) {
        double v = 0.0;
        for (int j = 0; j < nb; ++j) v += a[j] * std::exp(-(x - c[j]) * (x - c[j]) / (w[j] * w[j]));
        return v;
      },
      h);
}

}  // namespace gen
