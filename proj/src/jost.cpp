#include "loveres/jost.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "loveres/errors.hpp"

namespace loveres {

namespace {

constexpr Complex I1(0.0, 1.0);
const double kSqrt3 = std::sqrt(3.0);

// cosh(sqrt d), sinh(sqrt d)/sqrt d and the derivative of the latter in d
struct CoshSinh {
  Complex c, s, sp;
};

CoshSinh cosh_sinh(Complex d, bool need_sp) {
  CoshSinh r;
  if (std::abs(d) < 0.5) {
    // Horner on the Taylor series; 9 terms reach 1e-19 for |d| < 0.5
    static const double inv_even[] = {1.0, 1.0 / 2, 1.0 / 24, 1.0 / 720, 1.0 / 40320,
                                      1.0 / 3628800, 1.0 / 479001600, 1.0 / 87178291200.0,
                                      1.0 / 20922789888000.0, 1.0 / 6402373705728000.0};
    static const double inv_odd[] = {1.0, 1.0 / 6, 1.0 / 120, 1.0 / 5040, 1.0 / 362880,
                                     1.0 / 39916800, 1.0 / 6227020800.0, 1.0 / 1307674368000.0,
                                     1.0 / 355687428096000.0, 1.0 / 121645100408832000.0};
    Complex c = inv_even[9], s = inv_odd[9], sp = 9.0 * inv_odd[9];
    for (int n = 8; n >= 0; --n) {
      c = c * d + inv_even[n];
      s = s * d + inv_odd[n];
      if (n >= 1) sp = sp * d + double(n) * inv_odd[n];
    }
    r.c = c;
    r.s = s;
    r.sp = sp;
    return r;
  }
  const Complex w = std::sqrt(d);
  r.c = std::cosh(w);
  r.s = std::sinh(w) / w;
  if (need_sp) r.sp = (r.c - r.s) / (2.0 * d);
  return r;
}

std::string num(double x) {
  std::ostringstream s;
  s.precision(6);
  s << x;
  return s.str();
}

}  // namespace

JostSolver::JostSolver(PotentialProfile V, JostOptions opts) : V_(std::move(V)), opts_(opts) {
  validate(V_);
  if (!(opts_.k_step > 0.0) || opts_.refine < 1) throw DomainError("jost: bad integrator options");
  const std::size_t n = V_.values.size();
  dx_ = V_.x_I / static_cast<double>(n - 1);
  const std::size_t cells = n - 1;
  const std::size_t order = std::min<std::size_t>(4, n);
  coef_.assign(4 * cells, 0.0);
  std::size_t last_nonzero_cell = 0;
  bool any = false;
  for (std::size_t j = 0; j < cells; ++j) {
    // stencil of `order` samples around cell j, shifted to stay on the grid
    std::ptrdiff_t s0 = static_cast<std::ptrdiff_t>(j) - (order == 4 ? 1 : 0);
    s0 = std::clamp<std::ptrdiff_t>(s0, 0, static_cast<std::ptrdiff_t>(n - order));
    double p[4], c[4];
    for (std::size_t i = 0; i < order; ++i) {
      p[i] = static_cast<double>(s0 + static_cast<std::ptrdiff_t>(i)) - static_cast<double>(j);
      c[i] = V_.values[static_cast<std::size_t>(s0) + i];
    }
    // Newton divided differences, then expand to powers of t
    for (std::size_t lvl = 1; lvl < order; ++lvl)
      for (std::size_t i = order - 1; i >= lvl; --i) c[i] = (c[i] - c[i - 1]) / (p[i] - p[i - lvl]);
    double poly[4] = {0, 0, 0, 0};
    for (std::size_t i = order; i-- > 0;) {
      // poly = poly * (t - p[i]) + c[i]
      double next[4] = {0, 0, 0, 0};
      for (int e = 3; e >= 0; --e) {
        next[e] -= p[i] * poly[e];
        if (e < 3) next[e + 1] += poly[e];
      }
      next[0] += c[i];
      std::copy(next, next + 4, poly);
    }
    bool nonzero = false;
    for (int e = 0; e < 4; ++e) {
      coef_[4 * j + e] = poly[e];
      nonzero = nonzero || poly[e] != 0.0;
    }
    if (nonzero) {
      last_nonzero_cell = j;
      any = true;
    }
  }
  n_cells_ = any ? last_nonzero_cell + 1 : 0;
  x_eff_ = n_cells_ == cells ? V_.x_I : dx_ * static_cast<double>(n_cells_);
  for (double v : V_.values) vmax_ = std::max(vmax_, std::abs(v));
}

double JostSolver::potential_at(std::size_t cell, double t) const {
  const double* a = &coef_[4 * cell];
  return a[0] + t * (a[1] + t * (a[2] + t * a[3]));
}

template <class Observer>
JostSolver::State JostSolver::propagate(Complex k, double x_stop, bool with_dk, Observer&& obs) const {
  State st{1.0, I1 * k, 0.0, I1, 0.0};
  if (x_stop >= x_eff_ || n_cells_ == 0) return st;

  const double rate = std::max(std::abs(k), std::sqrt(vmax_));
  const int m = std::max(1, static_cast<int>(std::ceil(rate * dx_ / opts_.k_step))) * opts_.refine;
  const Complex k2 = k * k;
  const double c1 = 0.5 - kSqrt3 / 6.0, c2 = 0.5 + kSqrt3 / 6.0;

  obs(x_eff_, st.chi);
  for (std::size_t j = n_cells_; j-- > 0;) {
    const double x_lo = dx_ * static_cast<double>(j);
    const double x_top = j + 1 == V_.values.size() - 1 ? V_.x_I : dx_ * static_cast<double>(j + 1);
    if (x_stop >= x_top) break;
    const bool partial = x_stop > x_lo;
    const double span = x_top - (partial ? x_stop : x_lo);
    const int steps = partial ? std::max(1, static_cast<int>(std::ceil(m * span / dx_))) : m;
    const double hs = -span / steps;
    const Complex E = std::exp(-I1 * k * hs);
    const double hs2 = hs * hs;
    for (int s = 0; s < steps; ++s) {
      const double x = x_top + s * hs;
      const double V1 = potential_at(j, (x + c1 * hs - x_lo) / dx_);
      const double V2 = potential_at(j, (x + c2 * hs - x_lo) / dx_);
      const Complex qbar = 0.5 * (V1 + V2) - k2;
      const double d = kSqrt3 / 12.0 * hs2 * (V1 - V2);
      const Complex delta = d * d + hs2 * qbar;
      const CoshSinh cs = cosh_sinh(delta, with_dk);
      const Complex p11 = cs.c + cs.s * d, p12 = cs.s * hs, p21 = cs.s * hs * qbar, p22 = cs.c - cs.s * d;
      const Complex a = p11 * st.chi + p12 * st.chip;
      const Complex b = p21 * st.chi + p22 * st.chip;
      if (with_dk) {
        const Complex ddelta = -2.0 * k * hs2;
        const Complex dc = 0.5 * cs.s * ddelta, ds = cs.sp * ddelta;
        const Complex q11 = dc + ds * d, q12 = ds * hs, q21 = hs * (ds * qbar - 2.0 * k * cs.s),
                      q22 = dc - ds * d;
        const Complex da = q11 * st.chi + q12 * st.chip + p11 * st.dchi + p12 * st.dchip;
        const Complex db = q21 * st.chi + q22 * st.chip + p21 * st.dchi + p22 * st.dchip;
        st.dchi = E * (da - I1 * hs * a);
        st.dchip = E * (db - I1 * hs * b);
      }
      st.chi = E * a;
      st.chip = E * b;
      obs(x + hs, st.chi);
    }
    const double mag = std::max(std::abs(st.chi), std::abs(st.chip));
    if (mag > 1e100) {
      const double inv = 1.0 / mag;
      st.chi *= inv;
      st.chip *= inv;
      st.dchi *= inv;
      st.dchip *= inv;
      st.log_scale += std::log(mag);
    }
  }
  return st;
}

namespace {
struct NoObserver {
  void operator()(double, Complex) const {}
};
}  // namespace

double JostSolver::max_safe_imag() const { return opts_.log_guard / (2.0 * std::max(x_eff_, 1e-300)); }

ScaledJost JostSolver::faddeev_scaled(Complex k) const {
  const State st = propagate(k, 0.0, false, NoObserver{});
  return {st.chi, st.chip - I1 * k * st.chi, st.log_scale};
}

namespace {
double unscale_factor(double log_scale, double mag, double guard, double safe_imag) {
  if (log_scale == 0.0) return 1.0;
  if (log_scale + std::log(std::max(mag, 1e-300)) > guard)
    throw OverflowGuardError("jost: |f| exceeds double range; largest safe |Im k| is about " +
                             num(safe_imag));
  return std::exp(log_scale);
}
}  // namespace

std::pair<Complex, Complex> JostSolver::faddeev(Complex k) const {
  const ScaledJost s = faddeev_scaled(k);
  const double f = unscale_factor(s.log_scale, std::max(std::abs(s.chi0), std::abs(s.chi0_prime)),
                                  opts_.log_guard, max_safe_imag());
  return {s.chi0 * f, s.chi0_prime * f};
}

JostEval JostSolver::evaluate(Complex k) const { return evaluate(k, V_.h); }

JostEval JostSolver::evaluate(Complex k, double h) const {
  const State st = propagate(k, 0.0, true, NoObserver{});
  const double f = unscale_factor(st.log_scale, std::max(std::abs(st.chi), std::abs(st.chip)),
                                  opts_.log_guard, max_safe_imag());
  JostEval e;
  e.k = k;
  e.f0 = st.chi * f;
  e.fp0 = st.chip * f;
  e.fh = h * e.f0 + e.fp0;
  e.fh_dk = (h * st.dchi + st.dchip) * f;
  if (k.imag() == 0.0 && k.real() != 0.0) e.wronskian_residual = wronskian_residual(k.real(), 0.0);
  return e;
}

Complex JostSolver::fh(Complex k) const {
  const State st = propagate(k, 0.0, false, NoObserver{});
  const double f = unscale_factor(st.log_scale, std::max(std::abs(st.chi), std::abs(st.chip)),
                                  opts_.log_guard, max_safe_imag());
  return (V_.h * st.chi + st.chip) * f;
}

Complex JostSolver::fh_dk(Complex k) const {
  const State st = propagate(k, 0.0, true, NoObserver{});
  const double f = unscale_factor(st.log_scale, std::max(std::abs(st.chi), std::abs(st.chip)),
                                  opts_.log_guard, max_safe_imag());
  return (V_.h * st.dchi + st.dchip) * f;
}

std::pair<Complex, Complex> JostSolver::solution(Complex k, double x) const {
  if (x < 0.0) throw DomainError("jost: solution requested at negative depth");
  const State st = propagate(k, x, false, NoObserver{});
  const double f = unscale_factor(st.log_scale, std::max(std::abs(st.chi), std::abs(st.chip)),
                                  opts_.log_guard, max_safe_imag());
  const Complex ph = std::exp(I1 * k * x);
  return {st.chi * f * ph, st.chip * f * ph};
}

double JostSolver::wronskian_residual(double k, double x) const {
  const auto [f, fp] = solution(Complex(k, 0.0), x);
  const auto [g, gp] = solution(Complex(-k, 0.0), x);
  return std::abs(f * gp - fp * g + 2.0 * I1 * k);
}

Complex JostSolver::square_integral(Complex k) const {
  if (!(k.imag() > 0.0)) throw DomainError("jost: square integral needs Im k > 0");
  std::vector<double> xs;
  std::vector<Complex> vals;
  const State st = propagate(k, 0.0, false, [&](double x, Complex chi) {
    xs.push_back(x);
    const Complex f = chi * std::exp(I1 * k * x);
    vals.push_back(f * f);
  });
  if (st.log_scale != 0.0) throw OverflowGuardError("jost: square integral overflow");
  // tail beyond the support: \int_X^inf e^{2ikx} dx
  const Complex tail = -std::exp(2.0 * I1 * k * x_eff_) / (2.0 * I1 * k);
  if (xs.size() < 2) return tail;
  // nodes run from x_eff down to 0 with uniform spacing
  const std::size_t n = xs.size() - 1;
  const double hstep = (xs.front() - xs.back()) / static_cast<double>(n);
  Complex body = 0.0;
  std::size_t start = 0;
  if (n % 2 == 1) {
    if (n >= 3) {
      body += 3.0 * hstep / 8.0 * (vals[0] + 3.0 * vals[1] + 3.0 * vals[2] + vals[3]);
      start = 3;
    } else {
      return tail + 0.5 * hstep * (vals[0] + vals[1]);
    }
  }
  for (std::size_t i = start; i + 2 <= n; i += 2)
    body += hstep / 3.0 * (vals[i] + 4.0 * vals[i + 1] + vals[i + 2]);
  return body + tail;
}

std::pair<Complex, Complex> faddeev_solve(const PotentialProfile& V, Complex k) {
  return JostSolver(V).faddeev(k);
}

JostEval jost_function(const PotentialProfile& V, double h, Complex k) {
  return JostSolver(V).evaluate(k, h);
}

JostEval jost_function(const PotentialProfile& V, Complex k) { return JostSolver(V).evaluate(k); }

Complex jost_derivative(const PotentialProfile& V, double h, Complex k) {
  return JostSolver(V).evaluate(k, h).fh_dk;
}

BoundReport bound_check(const JostSolver& solver, double h, Complex k) {
  const PotentialProfile& V = solver.potential();
  const double nv = l1_norm(V);
  const double a = nv / std::max(1.0, std::abs(k));
  const double growth = std::exp((std::abs(k.imag()) - k.imag()) * V.x_I + a);
  const Complex fh = solver.evaluate(k, h).fh;
  BoundReport r;
  r.k = k;
  r.lhs1 = std::abs(fh - I1 * k);
  // f_h - ik = h f(0,k) + (f'(0,k) - ik): the h f(0,k) part needs its own term
  r.rhs1_literal = nv * growth;
  r.rhs1 = (std::abs(h) + nv) * growth;
  const Complex vhat0 = fourier_transform(V, 0.0), vhatk = fourier_transform(V, k);
  r.lhs2 = std::abs(fh - I1 * k - h + 0.5 * (vhat0 + vhatk));
  r.rhs2 = (std::abs(h) + 0.5 * nv) * a * growth;
  return r;
}

BoundReport bound_check(const PotentialProfile& V, double h, Complex k) {
  return bound_check(JostSolver(V), h, k);
}

ComplexFunction jost_evaluator(std::shared_ptr<const JostSolver> s) {
  return [s](Complex k) { return s->fh(k); };
}

ComplexFunction jost_derivative_evaluator(std::shared_ptr<const JostSolver> s) {
  return [s](Complex k) { return s->fh_dk(k); };
}

}  // namespace loveres
