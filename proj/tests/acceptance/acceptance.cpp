// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cstdio>
#include <functional>
#include <memory>
#include <sstream>
#include <string>

#include "loveres/errors.hpp"
#include "loveres/inversion.hpp"
#include "loveres/resonances.hpp"
#include "oracles.hpp"

using namespace loveres;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream note;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      note << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void criterion(int id, const char* name, double budget_s, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.note << " [exception: " << e.what() << "]";
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.require(dt < budget_s, "runtime budget");
  if (!o.pass) ++failures;
  std::printf("%s %d %s (%.1fs):%s\n", o.pass ? "PASS" : "FAIL", id, name, dt, o.note.str().c_str());
  std::fflush(stdout);
}

std::shared_ptr<const JostSolver> step_solver(double V0, double h, int n = 128) {
  return std::make_shared<const JostSolver>(make_potential(1.0, n, [V0](double) { return V0; }, h));
}

ResonanceSet search(const std::shared_ptr<const JostSolver>& js, const Rectangle& region) {
  FinderOptions fo;
  fo.workers = 4;
  return find_zeros(jost_evaluator(js), jost_derivative_evaluator(js), region, 1e-10, fo);
}

double l1_rel(const PotentialProfile& V, double V0) {
  double err = 0.0;
  for (std::size_t i = 0; i < V.values.size(); ++i) {
    const double w = (i == 0 || i + 1 == V.values.size()) ? 0.5 : 1.0;
    err += w * std::abs(V.values[i] - V0) * V.step();
  }
  return err / (std::abs(V0) * V.x_I);
}

bool symmetric(const std::vector<Complex>& zs, double tol) {
  for (Complex z : zs) {
    double best = 1e300;
    for (Complex w : zs) best = std::min(best, std::abs(w + std::conj(z)));
    if (best > tol * (1 + std::abs(z))) return false;
  }
  return true;
}

}  // namespace

int main() {
  const auto barrier = step_solver(4.0, 0.0);
  const oracle::Step step{4.0, 1.0, 0.0};
  ResonanceSet barrier_zeros;  // shared by 4, 5, 7 and 9

  criterion(1, "free-Robin exactness", 1.0, [&](Outcome& o) {
    const auto js = step_solver(0.0, 1.0, 16);
    double worst = 0.0;
    for (int a = 0; a < 20; ++a)
      for (int b = 0; b < 20; ++b) {
        const Complex k(-10 + 20.0 * a / 19, -10 + 20.0 * b / 19);
        worst = std::max(worst, std::abs(js->fh(k) - (Complex(0, 1) * k + 1.0)));
      }
    o.note << " max|f_h-(ik+1)| " << worst;
    o.require(worst < 1e-10, "f_h");
    const auto ev = eigenvalues(*js, 1.0);
    o.require(ev.size() == 1 && std::abs(ev[0] - Complex(0, 1)) < 1e-12, "eigenvalue at i");
    const auto nc = norming_constants_detail(*js, 1.0, ev);
    o.note << ", m " << nc[0].ratio << " / " << nc[0].integral;
    o.require(std::abs(nc[0].ratio - 0.5) < 1e-10 && std::abs(nc[0].integral - 0.5) < 1e-10, "m = 1/2");
  });

  criterion(2, "barrier oracle", 30.0, [&](Outcome& o) {
    gen::Rng rng(2);
    double worst = 0.0;
    for (int n = 0; n < 100; ++n) {
      const Complex k = rng.complex(-30, 30, -8, 8);
      worst = std::max(worst, std::abs(barrier->fh(k) - step.fh(k)) / std::abs(step.fh(k)));
    }
    o.note << " probe rel " << worst;
    o.require(worst < 1e-9, "probes");
    const Rectangle region{-30, 30, -8, 0};
    const ResonanceSet set = search(barrier, region);
    const ComplexFunction of = [&](Complex k) { return step.fh(k); };
    const int expected = count_zeros(of, set.search_region);
    double zmax = 0.0;
    for (Complex z : set.all_zeros()) zmax = std::max(zmax, std::abs(z - oracle::polish(step, z)));
    o.note << ", " << set.total_multiplicity() << " zeros (oracle count " << expected << "), max dev " << zmax;
    o.require(set.complete() && set.total_multiplicity() == expected, "zero count");
    o.require(zmax < 1e-8, "zeros");
  });

  criterion(3, "Wronskian conservation", 30.0, [&](Outcome& o) {
    gen::Rng rng(3);
    double worst = 0.0;
    const auto smooth = std::make_shared<const JostSolver>(gen::smooth_potential(rng));
    for (const auto& js : {barrier, smooth}) {
      const double x_I = js->potential().x_I;
      for (int n = 0; n < 100; ++n) {
        double k = rng.uniform(-50, 50);
        if (std::abs(k) < 1e-3) k = 1.0;
        worst = std::max({worst, js->wronskian_residual(k, 0.0), js->wronskian_residual(k, 0.5 * x_I)});
      }
    }
    o.note << " max |W + 2ik| " << worst;
    o.require(worst < 1e-9, "Wronskian");
  });

  barrier_zeros = search(barrier, {-110, 110, -8, 0.5});

  criterion(4, "resonance-free region", 60.0, [&](Outcome& o) {
    const ForbiddenReport rep = forbidden_domain_xi(barrier_zeros, 1.0, 1.0, barrier->potential(), 0.0);
    o.note << " " << rep.entries.size() << " zeros, min slack k " << rep.min_c0_slack_k << ", xi "
           << rep.min_c0_slack_xi;
    o.require(barrier_zeros.complete(), "complete zero set");
    o.require(rep.c0_violations == 0 && rep.min_c0_slack_k >= 0 && rep.min_c0_slack_xi >= 0, "slack");
  });

  criterion(5, "Levinson counting", 300.0, [&](Outcome& o) {
    const LevinsonReport rep = levinson_check(barrier_zeros, jost_evaluator(barrier), 100.0, 1.0, 0.2);
    o.note << " N(100) " << rep.count_in_disk << ", ratio " << rep.ratio << ", outside " << rep.outside_fraction;
    o.require(rep.ratio >= 0.9 && rep.ratio <= 1.1, "ratio");
    o.require(rep.outside_fraction < 0.1, "sector");
  });

  criterion(6, "scattering class", 120.0, [&](Outcome& o) {
    struct Case {
      double V0, h;
      int n;
    };
    for (const Case c : {Case{4.0, 0.0, 128}, Case{-3.0, 0.5, 128}, Case{-50.0, 0.0, 256}, Case{0.0, 1.0, 16}}) {
      const ScatteringData d = forward_scattering_data(step_solver(c.V0, c.h, c.n));
      const ClassReport r = validate_scattering_class(d);
      o.note << " (V0 " << c.V0 << ": N " << d.N << ", increment " << r.increment << ", implied N " << r.implied_N << ", unimod "
             << r.unimodularity_residual << ")";
      o.require(r.condition1 && r.unimodularity_residual < 1e-8, "condition (1)");
      o.require(r.condition3 && std::abs(r.implied_N - d.N) < 1e-6, "condition (3)");
    }
  });

  criterion(7, "inverse round trip", 600.0, [&](Outcome& o) {
    double err[2];
    int i = 0;
    for (double R : {50.0, 100.0}) {
      InvertOptions opt;
      opt.R = R;
      const InversionResult r = invert(barrier_zeros, 1.0, opt);
      err[i++] = l1_rel(r.V, 4.0);
      o.note << " L1 rel R=" << R << ": " << err[i - 1] << ",";
    }
    o.require(err[1] < err[0], "error decreases with R");
    const InversionResult f = invert(std::vector<Complex>{{0, 1}}, 1.0);
    double worst = 0.0;
    for (double v : f.V.values) worst = std::max(worst, std::abs(v));
    o.note << " free Robin Linf " << worst;
    o.require(worst < 1e-4, "free Robin");
  });

  criterion(8, "shear recovery", 1.0, [&](Outcome& o) {
    const oracle::Bump bump;
    const ShearProfile p = bump.profile(1024);
    const PotentialProfile V1 = calibrate(p, 1.0, 1024), V2 = calibrate(p, 2.0, 1024);
    const ShearProfile back = recover_shear(V1, V2, 1.0, 2.0, bump.mu_I);
    double worst = 0.0;
    for (std::size_t i = 0; i < back.depth_grid.size(); ++i)
      worst = std::max(worst, std::abs(back.mu[i] - bump.mu(back.depth_grid[i])));
    o.note << " max |mu - mu_rec| " << worst;
    o.require(worst < 1e-10, "pointwise");
  });

  criterion(9, "symmetry and simplicity", 120.0, [&](Outcome& o) {
    const auto well = step_solver(-50.0, 0.0, 256);
    const double top = eigenvalue_search_height(well->potential(), 0.0);
    const ResonanceSet ws = search(well, {-30, 30, -8, top});
    o.require(symmetric(barrier_zeros.all_zeros(), 1e-9) && symmetric(ws.all_zeros(), 1e-9), "k -> -conj k");
    double min_deriv = 1e300;
    for (const Zero& z : ws.eigenvalues) {
      o.require(std::abs(z.k.real()) <= 1e-10 * std::abs(z.k) && z.multiplicity == 1, "eigenvalue on i R_+ and simple");
      min_deriv = std::min(min_deriv, std::abs(well->fh_dk(z.k)));
    }
    o.require(ws.eigenvalues.size() == 3, "three eigenvalues");
    o.require(min_deriv > 1e-3, "derivative bounded away from 0");
    const auto nc = norming_constants_detail(*well, 0.0, eigenvalues(*well, 0.0));
    for (const auto& c : nc) o.require(c.derivative_sign > 0 && c.partner_sign < 0, "sign ladder");
    o.note << " " << ws.eigenvalues.size() << " eigenvalues, min |f'| " << min_deriv << ", barrier set "
           << barrier_zeros.total_multiplicity() << " zeros";
  });

  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
