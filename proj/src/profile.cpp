#include "loveres/profile.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "loveres/errors.hpp"

namespace loveres {

namespace {

std::string at(double x) {
  std::ostringstream s;
  s.precision(17);
  s << x;
  return s.str();
}

// Fornberg's finite-difference weights at z for derivatives 0..2 on nodes
// x[0..n); row d of the result starts at d * n.
std::vector<double> fd_weights(double z, const double* x, std::size_t n) {
  constexpr int M = 2;
  std::vector<double> c((M + 1) * n, 0.0);
  double c1 = 1.0, c4 = x[0] - z;
  c[0] = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const int mn = std::min<int>(static_cast<int>(i), M);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - z;
    for (std::size_t j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c[k * n + i] = c1 * (k * c[(k - 1) * n + i - 1] - c5 * c[k * n + i - 1]) / c2;
        c[i] = -c1 * c5 * c[i - 1] / c2;
      }
      for (int k = mn; k >= 1; --k) c[k * n + j] = (c4 * c[k * n + j] - k * c[(k - 1) * n + j]) / c3;
      c[j] = c4 * c[j] / c3;
    }
    c1 = c2;
  }
  return c;
}

bool same_as_tail(double mu, double mu_tail, double rel_tol) {
  return std::abs(mu - mu_tail) <= rel_tol * std::abs(mu_tail);
}

}  // namespace

void validate(const ShearProfile& p) {
  if (p.depth_grid.size() != p.mu.size())
    throw DomainError("shear profile: depth_grid and mu differ in length");
  if (!(p.x_I > 0.0)) throw DomainError("shear profile: x_I must be positive");
  if (!(p.mu_tail > 0.0)) throw DomainError("shear profile: mu_tail must be positive");
  if (p.depth_grid.empty() || p.depth_grid.front() != 0.0)
    throw DomainError("shear profile: depth grid must start at 0");
  for (std::size_t i = 1; i < p.depth_grid.size(); ++i)
    if (!(p.depth_grid[i] > p.depth_grid[i - 1]))
      throw DomainError("shear profile: depth grid not strictly increasing at x = " +
                        at(p.depth_grid[i]));
  std::size_t inside = 0;
  for (std::size_t i = 0; i < p.mu.size(); ++i) {
    if (!(p.mu[i] > 0.0)) throw DomainError("non-positive mu at x = " + at(p.depth_grid[i]));
    if (p.depth_grid[i] >= p.x_I) {
      if (!same_as_tail(p.mu[i], p.mu_tail, 1e-12))
        throw InvariantError("shear profile not constant in the tail: mu(" + at(p.depth_grid[i]) +
                             ") != mu_tail");
    } else {
      ++inside;
    }
  }
  if (inside < 3) throw DomainError("shear profile: need at least 3 samples in [0, x_I)");
}

void validate(const PotentialProfile& V) {
  if (V.grid.size() != V.values.size())
    throw DomainError("potential: grid and V differ in length");
  if (V.grid.size() < 2) throw DomainError("potential: need at least 2 samples");
  if (!(V.x_I > 0.0)) throw DomainError("potential: x_I must be positive");
  if (V.grid.front() != 0.0) throw DomainError("potential: grid must start at 0");
  if (std::abs(V.grid.back() - V.x_I) > 1e-12 * V.x_I)
    throw DomainError("potential: grid must end at x_I");
  const double dx = V.x_I / static_cast<double>(V.grid.size() - 1);
  for (std::size_t i = 0; i < V.grid.size(); ++i) {
    if (std::abs(V.grid[i] - dx * static_cast<double>(i)) > 1e-9 * dx)
      throw DomainError("potential: grid is not uniform near x = " + at(V.grid[i]));
    if (!std::isfinite(V.values[i])) throw DomainError("potential: non-finite V at x = " + at(V.grid[i]));
  }
  if (!std::isfinite(V.h)) throw DomainError("potential: non-finite h");
}

ShearInterpolant::ShearInterpolant(const ShearProfile& p) : x_I_(p.x_I), mu_tail_(p.mu_tail) {
  validate(p);
  std::vector<double> x, y;
  for (std::size_t i = 0; i < p.depth_grid.size() && p.depth_grid[i] < p.x_I; ++i) {
    x.push_back(p.depth_grid[i]);
    y.push_back(p.mu[i]);
  }
  x.push_back(p.x_I);
  y.push_back(p.mu_tail);
  const std::size_t n = x.size();
  // stencils may reach past x_I into the constant tail
  std::vector<double> xe = x, ye = y;
  const double gap = x[n - 1] - x[n - 2];
  for (int j = 1; j <= 3; ++j) {
    xe.push_back(p.x_I + j * gap);
    ye.push_back(p.mu_tail);
  }
  std::vector<double> d1(n, 0.0), d2(n, 0.0);
  const std::size_t width = std::min<std::size_t>(7, xe.size());
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const std::size_t lo = std::min(i >= width / 2 ? i - width / 2 : 0, xe.size() - width);
    const auto w = fd_weights(x[i], xe.data() + lo, width);
    for (std::size_t j = 0; j < width; ++j) {
      d1[i] += w[width + j] * (ye[lo + j] - p.mu_tail);
      d2[i] += w[2 * width + j] * (ye[lo + j] - p.mu_tail);
    }
  }
  // d1, d2 stay zero at x_I: the medium is homogeneous from there on
  spline_ = std::make_shared<const Hermite>(std::move(x), std::move(y), std::move(d1), std::move(d2));
}

double ShearInterpolant::value(double x) const { return x >= x_I_ ? mu_tail_ : (*spline_)(x); }
double ShearInterpolant::d1(double x) const { return x >= x_I_ ? 0.0 : spline_->prime(x); }
double ShearInterpolant::d2(double x) const { return x >= x_I_ ? 0.0 : spline_->double_prime(x); }

bool last_cell_nonconstant(const ShearProfile& p, double rel_tol) {
  validate(p);
  // the last cell below x_I: the largest sample strictly inside [0, x_I)
  for (std::size_t i = p.depth_grid.size(); i-- > 0;) {
    if (p.depth_grid[i] < p.x_I) return !same_as_tail(p.mu[i], p.mu_tail, rel_tol);
  }
  return false;
}

double robin_coefficient(const ShearProfile& p) {
  ShearInterpolant mu(p);
  // h = -(1/2) mu_Z(0)/mu(0) with d/dZ = -d/dx
  return 0.5 * mu.d1(0.0) / mu.value(0.0);
}

PotentialProfile calibrate(const ShearProfile& p, double omega, int n_intervals) {
  if (!(omega > 0.0)) throw DomainError("calibrate: omega must be positive");
  if (n_intervals < 2) throw DomainError("calibrate: need at least 2 intervals");
  ShearInterpolant mu(p);
  PotentialProfile V;
  V.x_I = p.x_I;
  V.omega = omega;
  V.h = 0.5 * mu.d1(0.0) / mu.value(0.0);
  const double w2 = omega * omega;
  V.grid.resize(static_cast<std::size_t>(n_intervals) + 1);
  V.values.resize(V.grid.size());
  for (int i = 0; i <= n_intervals; ++i) {
    const double x = i == n_intervals ? p.x_I : p.x_I * i / n_intervals;
    const double m = mu.value(x), m1 = mu.d1(x), m2 = mu.d2(x);
    if (!(m > 0.0)) throw DomainError("interpolated mu is non-positive at x = " + at(x));
    // (sqrt mu)''/sqrt mu = mu''/(2 mu) - mu'^2/(4 mu^2)
    const double curv = m2 / (2.0 * m) - (m1 * m1) / (4.0 * m * m);
    V.grid[i] = x;
    V.values[i] = curv - w2 / m + w2 / p.mu_tail;
  }
  return V;
}

PotentialProfile make_potential(double x_I, int n_intervals, const std::function<double(double)>& fn,
                                double h) {
  if (!(x_I > 0.0) || n_intervals < 1) throw DomainError("make_potential: bad grid");
  PotentialProfile V;
  V.x_I = x_I;
  V.h = h;
  V.grid.resize(static_cast<std::size_t>(n_intervals) + 1);
  V.values.resize(V.grid.size());
  for (int i = 0; i <= n_intervals; ++i) {
    V.grid[i] = i == n_intervals ? x_I : x_I * i / n_intervals;
    V.values[i] = fn(V.grid[i]);
  }
  return V;
}

double l1_norm(const PotentialProfile& V) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < V.values.size(); ++i)
    s += 0.5 * (std::abs(V.values[i]) + std::abs(V.values[i + 1])) * (V.grid[i + 1] - V.grid[i]);
  return s;
}

double integral(const PotentialProfile& V) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < V.values.size(); ++i)
    s += 0.5 * (V.values[i] + V.values[i + 1]) * (V.grid[i + 1] - V.grid[i]);
  return s;
}

double total_variation(const PotentialProfile& V) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < V.values.size(); ++i) s += std::abs(V.values[i + 1] - V.values[i]);
  return s;
}

Complex fourier_transform(const PotentialProfile& V, Complex k) {
  const Complex w = 2.0 * Complex(0, 1) * k;
  Complex total = 0.0;
  for (std::size_t i = 0; i + 1 < V.values.size(); ++i) {
    const double a = V.grid[i], d = V.grid[i + 1] - a;
    const double slope = (V.values[i + 1] - V.values[i]) / d;
    const Complex z = w * d;
    Complex e1, e2;  // \int_0^d e^{ws} ds and \int_0^d s e^{ws} ds
    if (std::abs(z) < 0.5) {
      // z^n/(n+1)! and z^n/(n! (n+2))
      Complex term = 1.0, s1 = 0.0, s2 = 0.0;
      double fact = 1.0;  // n!
      for (int n = 0; n < 20; ++n) {
        s1 += term / (fact * (n + 1));
        s2 += term / (fact * (n + 2));
        term *= z;
        fact *= n + 1;
      }
      e1 = d * s1;
      e2 = d * d * s2;
    } else {
      const Complex ez = std::exp(z);
      e1 = (ez - 1.0) / w;
      e2 = (d * ez - e1) / w;
    }
    total += std::exp(w * a) * (V.values[i] * e1 + slope * e2);
  }
  return total;
}

bool last_cell_nonvanishing(const PotentialProfile& V, double abs_tol) {
  const std::size_t n = V.values.size();
  if (n < 2) return false;
  return std::abs(V.values[n - 1]) > abs_tol || std::abs(V.values[n - 2]) > abs_tol;
}

Complex quasi_momentum(const SheetPoint& p, double omega, double mu_tail) {
  if (!(omega > 0.0) || !(mu_tail > 0.0)) throw DomainError("quasi_momentum: omega, mu_I must be positive");
  const double c2 = omega * omega / mu_tail;
  Complex k = Complex(0, 1) * std::sqrt(p.xi * p.xi - c2);
  if (k.imag() == 0.0) return {std::abs(k.real()), 0.0};
  const bool upper = k.imag() > 0.0;
  if ((p.sheet == Sheet::physical) != upper) k = -k;
  return k;
}

bool on_cut(const SheetPoint& p, double omega, double mu_tail) {
  const double c2 = omega * omega / mu_tail;
  return (Complex(0, 1) * std::sqrt(p.xi * p.xi - c2)).imag() == 0.0;
}

SheetPoint xi_of_k(Complex k, double omega, double mu_tail) {
  if (!(omega > 0.0) || !(mu_tail > 0.0)) throw DomainError("xi_of_k: omega, mu_I must be positive");
  const double c2 = omega * omega / mu_tail;
  Complex xi = std::sqrt(c2 - k * k);
  if (xi.real() < 0.0 || (xi.real() == 0.0 && xi.imag() < 0.0)) xi = -xi;
  return {xi, k.imag() < 0.0 ? Sheet::unphysical : Sheet::physical};
}

}  // namespace loveres
