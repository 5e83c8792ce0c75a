#include <doctest.h>

#include <memory>

#include "loveres/errors.hpp"
#include "loveres/jost.hpp"
#include "oracles.hpp"

using namespace loveres;

namespace {

PotentialProfile zero_potential(double x_I = 1.0, double h = 0.0) {
  return make_potential(x_I, 64, [](double) { return 0.0; }, h);
}

PotentialProfile barrier(double V0 = 4.0, double h = 0.0) {
  return make_potential(1.0, 64, [V0](double) { return V0; }, h);
}

double rel(Complex a, Complex b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("free solution") {
  const JostSolver js(zero_potential(1.0, 1.0));
  gen::Rng rng(1);
  for (int n = 0; n < 20; ++n) {
    const Complex k = rng.complex(-10, 10, -10, 10);
    const auto [chi, chip] = js.faddeev(k);
    CHECK(std::abs(chi - 1.0) < 1e-13);
    const JostEval e = js.evaluate(k);
    CHECK(std::abs(e.fp0 - Complex(0, 1) * k) < 1e-12 * (1 + std::abs(k)));
    CHECK(std::abs(e.fh - (Complex(0, 1) * k + 1.0)) < 1e-12 * (1 + std::abs(k)));
    CHECK(std::abs(e.fh_dk - Complex(0, 1)) < 1e-12);
    CHECK(e.fh == 1.0 * e.f0 + e.fp0);
  }
  const JostSolver j0(zero_potential());
  CHECK(std::abs(j0.fh(Complex(0, 1)) - Complex(0, 1) * Complex(0, 1)) < 1e-14);
}

TEST_CASE("barrier against the closed form") {
  const oracle::Step step{4.0, 1.0, 0.0};
  const JostSolver js(barrier());
  const auto [chi, chip] = js.faddeev(2.0);
  const JostEval e = js.evaluate(2.0);
  CHECK(rel(e.f0, step.f0(2.0)) < 1e-10);
  CHECK(rel(e.fp0, step.fp0(2.0)) < 1e-10);
  CHECK(chi == e.f0);

  gen::Rng rng(2);
  for (int n = 0; n < 20; ++n) {
    const Complex k = rng.complex(-20, 20, -4, 4);
    CHECK(rel(js.fh(k), step.fh(k)) < 1e-9);
  }
  CHECK(rel(js.fh_dk(Complex(0, 1)), step.fh_dk(Complex(0, 1))) < 1e-8);
}

TEST_CASE("well with Robin data against the closed form") {
  const oracle::Step step{-9.0, 1.0, 0.7};
  const JostSolver js(make_potential(1.0, 128, [](double) { return -9.0; }, 0.7));
  gen::Rng rng(4);
  for (int n = 0; n < 20; ++n) {
    const Complex k = rng.complex(-15, 15, -3, 5);
    CHECK(rel(js.fh(k), step.fh(k)) < 1e-9);
    CHECK(rel(js.fh_dk(k), step.fh_dk(k)) < 1e-8);
  }
}

TEST_CASE("Faddeev function bound in both half-planes") {
  const PotentialProfile V = barrier();
  const JostSolver js(V);
  const double nv = l1_norm(V);
  gen::Rng rng(5);
  for (int n = 0; n < 200; ++n) {
    const Complex k = rng.complex(-30, 30, -5, 5);
    const double bound = std::exp(nv / std::max(1.0, std::abs(k))) * std::exp((std::abs(k.imag()) - k.imag()) * V.x_I);
    CHECK(std::abs(js.faddeev(k).first) <= bound * (1 + 1e-12));
  }
}

TEST_CASE("derivative matches central differences") {
  gen::Rng rng(6);
  const auto js = std::make_shared<const JostSolver>(gen::smooth_potential(rng));
  const double d = 1e-5;
  for (int n = 0; n < 50; ++n) {
    const Complex k = rng.complex(-10, 10, -2, 3);
    const Complex fd = (js->fh(k + d) - js->fh(k - d)) / (2 * d);
    CHECK(std::abs(js->fh_dk(k) - fd) < 1e-7 * (1 + std::abs(fd)));
  }
}

TEST_CASE("bounds hold for the barrier") {
  const JostSolver free(zero_potential());
  const BoundReport b0 = bound_check(free, 0.0, Complex(3, -1));
  CHECK(b0.slack1() == b0.rhs1);
  CHECK(b0.slack2() == b0.rhs2);

  const JostSolver js(barrier());
  gen::Rng rng(7);
  for (int n = 0; n < 500; ++n) {
    const double r = rng.uniform(0, 50), t = rng.uniform(-oracle::pi, oracle::pi);
    const BoundReport b = bound_check(js, 0.0, std::polar(r, t));
    CHECK(b.holds());
    CHECK(b.rhs1 == b.rhs1_literal);
  }
  // up the imaginary axis |f_h - ik| stays below ||V|| e^{||V||}
  const double nv = 4.0;
  for (double T : {1.0, 10.0, 100.0, 1000.0})
    CHECK(std::abs(js.fh(Complex(0, T)) + T) <= nv * std::exp(nv));
}

TEST_CASE("Robin term needs its own share of the first bound") {
  const JostSolver js(barrier(0.5, -2.0));
  const BoundReport b = bound_check(js, -2.0, Complex(0, 200));
  CHECK(b.holds());
  CHECK(b.lhs1 > b.rhs1_literal);  // |f_h - ik| -> |h - (1/2) int V| = 2.25, well above ||V|| e^a
}

TEST_CASE("Wronskian and conjugation symmetry over random potentials") {
  gen::Rng rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const PotentialProfile V = gen::smooth_potential(rng);
    const JostSolver js(V);
    for (int n = 0; n < 20; ++n) {
      double k = rng.uniform(-30, 30);
      if (std::abs(k) < 1e-3) k = 0.5;
      CHECK(js.wronskian_residual(k, 0.0) < 1e-9);
      CHECK(js.wronskian_residual(k, 0.5 * V.x_I) < 1e-9);
      const Complex z = rng.complex(-20, 20, -3, 3);
      const Complex f = js.fh(z);
      CHECK(std::abs(js.fh(-std::conj(z)) - std::conj(f)) < 1e-11 * (1 + std::abs(f)));
    }
    const JostEval e = js.evaluate(Complex(1.5, 0.0));
    REQUIRE(e.wronskian_residual.has_value());
    CHECK(*e.wronskian_residual < 1e-9);
    CHECK_FALSE(js.evaluate(Complex(1.5, 0.1)).wronskian_residual.has_value());
  }
}

TEST_CASE("contour integral of f_h vanishes") {
  const JostSolver js(barrier());
  // Gauss-Legendre on each side of [-3,4] x [-2,1.5]; contains zeros, which does not matter
  const double xs[] = {-0.9739065285171717, -0.8650633666889845, -0.6794095682990244, -0.4333953941292472,
                       -0.1488743389816312, 0.1488743389816312,  0.4333953941292472,  0.6794095682990244,
                       0.8650633666889845,  0.9739065285171717};
  const double ws[] = {0.0666713443086881, 0.1494513491505806, 0.2190863625159820, 0.2692667193099963,
                       0.2955242247147529, 0.2955242247147529, 0.2692667193099963, 0.2190863625159820,
                       0.1494513491505806, 0.0666713443086881};
  const Complex corners[] = {{-3, -2}, {4, -2}, {4, 1.5}, {-3, 1.5}};
  Complex sum = 0.0;
  double scale = 0.0;
  for (int side = 0; side < 4; ++side) {
    const Complex a = corners[side], b = corners[(side + 1) % 4];
    for (int p = 0; p < 8; ++p) {  // 8 panels per side
      const Complex pa = a + (b - a) * (p / 8.0), pb = a + (b - a) * ((p + 1) / 8.0);
      for (int i = 0; i < 10; ++i) {
        const Complex z = 0.5 * (pa + pb) + 0.5 * (pb - pa) * xs[i];
        const Complex f = js.fh(z);
        sum += ws[i] * 0.5 * (pb - pa) * f;
        scale += ws[i] * 0.5 * std::abs(pb - pa) * std::abs(f);
      }
    }
  }
  CHECK(std::abs(sum) < 1e-10 * scale);
}

TEST_CASE("fourth-order convergence under step refinement") {
  const PotentialProfile V = make_potential(1.0, 64, [](double x) { return 3 * std::sin(5 * x) + 2; }, 0.3);
  const Complex k(7.0, -0.5);
  auto at = [&](int refine) {
    JostOptions o;
    o.k_step = 0.4;
    o.refine = refine;
    return JostSolver(V, o).fh(k);
  };
  const Complex f1 = at(1), f2 = at(2), f4 = at(4);
  const double ratio = std::abs(f1 - f2) / std::abs(f2 - f4);
  CHECK(ratio > 12.0);
  CHECK(ratio < 20.0);
}

TEST_CASE("overflow guard") {
  const JostSolver js(barrier());
  const double safe = js.max_safe_imag();
  CHECK(safe > 100.0);
  CHECK_NOTHROW(js.fh(Complex(5.0, -0.5 * safe)));
  CHECK_THROWS_AS(js.fh(Complex(5.0, -1.5 * safe)), OverflowGuardError);
}
