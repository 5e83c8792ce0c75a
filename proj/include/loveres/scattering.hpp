#pragma once

#include <optional>
#include <string>
#include <vector>

#include "loveres/jost.hpp"
#include "loveres/types.hpp"

namespace loveres {

struct ScatteringData {
  ComplexFunction S;             // scattering function on the real axis
  std::vector<Complex> k_bound;  // eigenvalues i kappa_j, decreasing kappa
  std::vector<double> m;         // norming constants, m_j > 0
  int N = 0;
  // coefficient c1 of S(k) - 1 = c1/(ik) + (c1^2/2)/(ik)^2 + ... for large real k
  double tail_coeff = 0.0;
  std::optional<double> x_I;
};

// S(k) = -f_h(-k)/f_h(k). The evaluator throws ClassViolationError when
// |f_h(k)| at real k is below real_zero_tol * (1 + |k|).
ComplexFunction scattering_function(ComplexFunction fh, double real_zero_tol = 1e-12);

struct NormingConstant {
  double ratio = 0.0;     // -i fh'(k_j)/fh(-k_j)
  double integral = 0.0;  // \int_0^inf f(x,k_j)^2 dx
  double rel_diff = 0.0;
  double derivative_sign = 0.0;  // i (-1)^j fh'(k_j), expected > 0
  double partner_sign = 0.0;     // (-1)^j fh(-k_j), expected < 0
};

// Both routes for every eigenvalue; mismatch beyond tol throws InconsistencyError.
std::vector<NormingConstant> norming_constants_detail(const JostSolver& solver, double h,
                                                      const std::vector<Complex>& eigenvalues,
                                                      double tol = 1e-6);
std::vector<double> norming_constants(const PotentialProfile& V, double h,
                                      const std::vector<Complex>& eigenvalues, double tol = 1e-6);

// Eigenvalues, norming constants, S and its tail coefficient from a potential.
ScatteringData forward_scattering_data(std::shared_ptr<const JostSolver> solver);

struct KernelOptions {
  double x_I = 1.0;
  int points_per_xI = 256;   // y-grid density
  double margin_frac = 0.1;  // grid covers [0, 2 x_I + margin]
  double K_max = 0.0;        // 0: 400 / x_I
  double dk = 0.0;           // 0: automatic
  double support_tol = 1e-4;
  bool fit_oscillatory = true;  // fit the e^{+-2ik x_I}/k^2 part of S - 1 near K_max
  int max_tail_terms = 40;
};

struct MarchenkoKernel {
  std::vector<double> y;
  std::vector<double> G;
  std::vector<double> G0;
  double step = 0.0;
  double x_I = 1.0;
  double K_max = 0.0;
  double decay_certificate = 0.0;  // max |G0| on [2 x_I, 2 x_I + margin]
  bool support_ok = true;
  double tail_coeff = 0.0;
  std::vector<Complex> oscillatory_coeffs;  // fitted e^{2ikx_I}, e^{-2ikx_I} (1/k^2), 1/k^3 and 1/k^4 terms
  std::string sign_convention = "G0 = G + sum_j e^{-kappa_j y}/m_j (Robin, plus sign)";

  double G0_at(std::size_t i) const { return i < G0.size() ? G0[i] : 0.0; }
};

// Fourier integral of S - 1 with the bound-state poles removed analytically
// and the 1/k, 1/k^2 tails integrated in closed form beyond K_max.
MarchenkoKernel build_G0(const ScatteringData& data, const KernelOptions& opts);

// G from the residue form -sum_j e^{i k_j x}/m_j (valid for x > 2 x_I).
double G_residue_form(const ScatteringData& data, double x);

struct ClassReport {
  // condition (1)
  double unimodularity_residual = 0.0;  // max ||S(k)| - 1|
  double conjugate_residual = 0.0;      // max |S(k) - conj S(-k)|
  double inverse_residual = 0.0;        // max |S(k) S(-k) - 1|
  bool condition1 = false;
  // condition (2), measured only
  double decay_constant_low = 0.0;   // max |k||S(k)-1| on [K/4, K/2]
  double decay_constant_high = 0.0;  // same on [K/2, K]
  bool condition2_decay = false;
  // condition (3)
  Complex S0;
  bool degenerate_S0 = false;  // S(0) = +1
  double increment = 0.0;      // (1/2 pi i)[log(-S(0+)) - log(-S(+inf))]
  double literal_rhs = 0.0;    // N + (S(0)+1)/4, as stated for the class
  double literal_residual = 0.0;
  // big-arc corrected relation: increment = N - 1/2 + (S(0)+1)/4
  double implied_N = 0.0;
  bool condition3 = false;
  int N = 0;
  bool passed() const { return condition1 && condition3; }
};

struct ClassOptions {
  double K = 0.0;  // sampling window; 0: 100 / x_I (or 100)
  int samples = 2000;
  double tol = 1e-8;
};

ClassReport validate_scattering_class(const ScatteringData& data, const ClassOptions& opts = {});

}  // namespace loveres
