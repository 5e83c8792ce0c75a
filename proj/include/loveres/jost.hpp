#pragma once

#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "loveres/profile.hpp"
#include "loveres/types.hpp"

namespace loveres {

struct JostOptions {
  double k_step = 0.1;   // bound on max(|k|, sqrt(max|V|)) * step
  int refine = 1;        // substep multiplier, for convergence studies
  double log_guard = 700.0;  // largest representable log-magnitude of f
};

struct JostEval {
  Complex k;
  Complex f0;     // f(0,k)
  Complex fp0;    // f'(0,k)
  Complex fh;     // h f0 + fp0
  Complex fh_dk;  // d/dk fh
  std::optional<double> wronskian_residual;  // |W(f, f(.,-k)) + 2ik|, real k only
};

// Scaled integration result: value = mantissa * exp(log_scale).
struct ScaledJost {
  Complex chi0, chi0_prime;  // chi(0,k), chi'(0,k) before applying exp(log_scale)
  double log_scale = 0.0;
};

// Jost solution machinery for one potential. The potential is interpolated
// by local cubics through its samples; the ODE is integrated backward from
// the end of the support with a fourth-order Magnus step in the variables
// chi = f e^{-ikx}, chi_p = f' e^{-ikx}. Immutable and reentrant.
class JostSolver {
 public:
  explicit JostSolver(PotentialProfile V, JostOptions opts = {});

  const PotentialProfile& potential() const { return V_; }
  double h() const { return V_.h; }

  JostEval evaluate(Complex k) const;          // uses V.h
  JostEval evaluate(Complex k, double h) const;
  Complex fh(Complex k) const;                 // value only, cheaper
  Complex fh_dk(Complex k) const;

  // (chi(0,k), chi'(0,k)); throws OverflowGuardError when not representable.
  std::pair<Complex, Complex> faddeev(Complex k) const;
  ScaledJost faddeev_scaled(Complex k) const;

  // f(x,k), f'(x,k) for 0 <= x.
  std::pair<Complex, Complex> solution(Complex k, double x) const;

  // \int_0^inf f(x,k)^2 dx for Im k > 0 (Simpson on the integration nodes
  // plus the exact exponential tail).
  Complex square_integral(Complex k) const;

  // |W(f(.,k), f(.,-k)) + 2ik| at depth x.
  double wronskian_residual(double k, double x) const;

  // Largest |Im k| (lower half plane) for which f is representable.
  double max_safe_imag() const;

  // End of the numerical support: beyond it the interpolated V vanishes.
  double effective_support() const { return x_eff_; }

  struct Workspace;

 private:
  struct State {
    Complex chi, chip, dchi, dchip;
    double log_scale = 0.0;
  };
  template <class Observer>
  State propagate(Complex k, double x_stop, bool with_dk, Observer&& obs) const;
  double potential_at(std::size_t cell, double t) const;

  PotentialProfile V_;
  JostOptions opts_;
  std::vector<double> coef_;  // 4 cubic coefficients per cell, local t in [0,1]
  std::size_t n_cells_ = 0;   // cells actually integrated
  double dx_ = 0.0, x_eff_ = 0.0, vmax_ = 0.0;
};

// Free-function interface.
std::pair<Complex, Complex> faddeev_solve(const PotentialProfile& V, Complex k);
JostEval jost_function(const PotentialProfile& V, double h, Complex k);
JostEval jost_function(const PotentialProfile& V, Complex k);
Complex jost_derivative(const PotentialProfile& V, double h, Complex k);

struct BoundReport {
  Complex k;
  double lhs1 = 0, rhs1 = 0, lhs2 = 0, rhs2 = 0;
  double rhs1_literal = 0;  // without the |h| term; equals rhs1 when h = 0
  double slack1() const { return rhs1 - lhs1; }
  double slack2() const { return rhs2 - lhs2; }
  bool holds() const { return slack1() >= 0.0 && slack2() >= 0.0; }
};

// First- and second-order Jost function bounds at k.
BoundReport bound_check(const PotentialProfile& V, double h, Complex k);
BoundReport bound_check(const JostSolver& solver, double h, Complex k);

// Evaluators bound to a shared solver (for the zero finder and friends).
ComplexFunction jost_evaluator(std::shared_ptr<const JostSolver> s);
ComplexFunction jost_derivative_evaluator(std::shared_ptr<const JostSolver> s);

}  // namespace loveres
