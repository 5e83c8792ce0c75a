#pragma once

#include <vector>

#include "loveres/profile.hpp"
#include "loveres/scattering.hpp"

namespace loveres {

struct MarchenkoOptions {
  double margin_frac = 0.1;   // upper limit 2 x_I - x + margin
  double cond_limit = 1e12;
  unsigned workers = 0;       // 0: LOVE_RES_WORKERS or 1
};

struct MarchenkoRow {
  double x = 0.0;
  std::vector<double> t;
  std::vector<double> A;     // A(x, t_j)
  double condition = 1.0;    // 1-norm condition estimate
  double residual = 0.0;     // relative residual of the discrete system
};

// Trapezoid Nystrom solve of A(x,t) = -G0(x+t) - \int_x^U G0(t+s) A(x,s) ds
// for x on the kernel grid (x is rounded to the nearest grid point).
MarchenkoRow solve_marchenko(const MarchenkoKernel& kernel, double x, const MarchenkoOptions& opts = {});

struct MarchenkoSolution {
  std::vector<double> x_grid;
  std::vector<double> diag;               // A(x,x)
  std::vector<double> condition_numbers;
  std::vector<double> residuals;
  std::vector<double> V_recovered;        // -2 d/dx A(x,x)
  double x_I = 1.0;
  double step = 0.0;
  double tail_coeff = 0.0;
  double support_residual = 0.0;          // max |V_recovered| beyond x_I
  double max_condition = 1.0;
};

MarchenkoSolution solve_marchenko_all(const MarchenkoKernel& kernel, const MarchenkoOptions& opts = {});

// -2 d/dx of uniformly sampled data: fourth-order central stencil inside,
// second-order near and at the ends.
std::vector<double> minus_twice_derivative(const std::vector<double>& a, double step);

// Potential on [0, x_I]; h is recovered from A(0,0) and the tail coefficient
// of S (f_h = ik + h - A(0,0) + O(1/k)).
PotentialProfile recover_potential(const MarchenkoSolution& sol);

}  // namespace loveres
