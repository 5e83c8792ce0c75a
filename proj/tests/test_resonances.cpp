#include <doctest.h>

#include <algorithm>
#include <memory>

#include "loveres/errors.hpp"
#include "loveres/jost.hpp"
#include "loveres/resonances.hpp"
#include "oracles.hpp"

using namespace loveres;

namespace {

ComplexFunction poly(std::vector<Complex> roots) {
  return [roots](Complex z) {
    Complex p = 1.0;
    for (Complex r : roots) p *= z - r;
    return p;
  };
}

ComplexFunction poly_dk(std::vector<Complex> roots) {
  return [roots](Complex z) {
    Complex s = 0.0;
    for (std::size_t i = 0; i < roots.size(); ++i) {
      Complex p = 1.0;
      for (std::size_t j = 0; j < roots.size(); ++j)
        if (j != i) p *= z - roots[j];
      s += p;
    }
    return s;
  };
}

std::shared_ptr<const JostSolver> solver_for(double V0, double h, int n = 64) {
  return std::make_shared<const JostSolver>(make_potential(1.0, n, [V0](double) { return V0; }, h));
}

}  // namespace

TEST_CASE("argument principle counts polynomial roots") {
  const std::vector<Complex> roots = {{0.3, 0.2}, {-1.1, 0.5}, {2.0, -1.0}, {0.31, 0.2}, {5, 5}};
  const auto f = poly(roots);
  CHECK(count_zeros(f, {-2, 3, -2, 1}) == 4);
  CHECK(count_zeros(f, {-2, 0, -2, 1}) == 1);
  CHECK(count_zeros(f, {10, 11, 10, 11}) == 0);
  // a root on the boundary is handled by perturbing the rectangle
  const CountResult c = count_zeros_detail(f, {2.0, 3.0, -2.0, 0.0});
  CHECK(c.count == (c.rect.contains(roots[2]) ? 1 : 0));
}

TEST_CASE("find_zeros recovers simple and double roots") {
  gen::Rng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Complex> roots;
    for (int i = 0; i < 6; ++i) roots.push_back(rng.complex(-4, 4, -3, 3));
    const ResonanceSet set = find_zeros(poly(roots), poly_dk(roots), {-5, 5, -4, 4}, 1e-12);
    CHECK(set.complete());
    const auto got = set.all_zeros();
    REQUIRE(got.size() == roots.size());
    for (Complex r : roots) {
      double best = 1e300;
      for (Complex g : got) best = std::min(best, std::abs(g - r));
      CHECK(best < 1e-9);
    }
  }
  const std::vector<Complex> dbl = {{1, -1}, {1, -1}, {-2, 0.5}};
  const ResonanceSet set = find_zeros(poly(dbl), poly_dk(dbl), {-3, 3, -3, 3}, 1e-12);
  CHECK(set.total_multiplicity() == 3);
  CHECK(set.region_count == 3);
}

TEST_CASE("free Robin eigenvalue") {
  const auto js = solver_for(0.0, 1.0);
  const auto ev = eigenvalues(*js, 1.0);
  REQUIRE(ev.size() == 1);
  CHECK(std::abs(ev[0] - Complex(0, 1)) < 1e-12);
  CHECK(eigenvalues(*js, 0.0).empty());
  CHECK(eigenvalues(*js, -1.0).empty());
}

TEST_CASE("deep well eigenvalues match the closed form") {
  const oracle::Step step{-50.0, 1.0, 0.0};
  const auto js = solver_for(-50.0, 0.0, 256);
  const auto ev = eigenvalues(*js, 0.0);
  REQUIRE(ev.size() == 3);
  for (std::size_t j = 0; j < ev.size(); ++j) {
    CHECK(ev[j].real() == 0.0);
    CHECK(std::abs(ev[j] - oracle::polish(step, ev[j])) < 1e-10);
    if (j > 0) CHECK(ev[j].imag() < ev[j - 1].imag());
  }
}

TEST_CASE("barrier zeros match oracle roots and are symmetric") {
  const oracle::Step step{4.0, 1.0, 0.0};
  const auto js = solver_for(4.0, 0.0);
  const Rectangle region{-15, 15, -5, 0.5};
  const ResonanceSet set = find_zeros(jost_evaluator(js), jost_derivative_evaluator(js), region, 1e-12);
  CHECK(set.complete());
  CHECK(set.eigenvalues.empty());
  // oracle count by the argument principle on the closed form
  const ComplexFunction of = [&](Complex k) { return step.fh(k); };
  CHECK(count_zeros(of, set.search_region) == set.total_multiplicity());
  const auto zs = set.all_zeros();
  for (Complex z : zs) {
    CHECK(std::abs(z - oracle::polish(step, z)) < 1e-8);
    double best = 1e300;
    for (Complex w : zs) best = std::min(best, std::abs(w + std::conj(z)));
    CHECK(best < 1e-9);
  }
}

TEST_CASE("zero search is independent of the worker count") {
  const auto js = solver_for(4.0, 0.3);
  const Rectangle region{-10, 10, -4, 3};
  FinderOptions one, four;
  one.workers = 1;
  four.workers = 4;
  const auto a = find_zeros(jost_evaluator(js), jost_derivative_evaluator(js), region, 1e-11, one).all_zeros();
  const auto b = find_zeros(jost_evaluator(js), jost_derivative_evaluator(js), region, 1e-11, four).all_zeros();
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("forbidden domain slack is nonnegative") {
  const PotentialProfile V = make_potential(1.0, 64, [](double) { return 4.0; }, 0.0);
  const auto js = std::make_shared<const JostSolver>(V);
  const ResonanceSet set = find_zeros(jost_evaluator(js), jost_derivative_evaluator(js), {-20, 20, -6, 0.5}, 1e-12);
  const ForbiddenReport rep = forbidden_domain_xi(set, 1.0, 1.0, V, 0.0);
  CHECK(rep.c0_violations == 0);
  CHECK(rep.min_c0_slack_k >= 0.0);
  CHECK(rep.min_c0_slack_xi >= 0.0);
  CHECK(rep.entries.size() == set.all_zeros().size());
}

TEST_CASE("Levinson statistics on a synthetic string") {
  // zeros spaced pi apart on a log curve: 2 r / pi of them in the disk for x_I = 1
  std::vector<Complex> z;
  for (int n = 1; n <= 400; ++n) {
    const double re = (n - 0.5) * oracle::pi;
    z.push_back({re, -std::log(1 + re / 2)});
    z.push_back({-re, -std::log(1 + re / 2)});
  }
  const LevinsonReport rep = levinson_statistics(z, 100.0, 1.0, 0.2);
  CHECK(rep.ratio == doctest::Approx(1.0).epsilon(0.05));
  CHECK(rep.outside_fraction < 0.1);
}

TEST_CASE("invalid tolerance is rejected") {
  CHECK_THROWS_AS(find_zeros(poly({1.0}), poly_dk({1.0}), {-1, 2, -1, 1}, 0.0), DomainError);
}
