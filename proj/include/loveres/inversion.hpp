#pragma once

#include <string>
#include <vector>

#include "loveres/marchenko.hpp"
#include "loveres/profile.hpp"
#include "loveres/resonances.hpp"
#include "loveres/scattering.hpp"

namespace loveres {

struct HadamardOptions {
  // Real-axis window of the asymptotic fit; 0 picks [R/8, R/2].
  double fit_lo = 0.0;
  double fit_hi = 0.0;
  int samples = 400;
  int inverse_terms = 6;          // asymptotic (ik)^{-n} terms
  double symmetry_tol = 1e-6;     // relative, for k -> -conj k pairing
  double calibration_tol = 0.05;  // max fit residual in log f
  // Support radius. When set, e^{2ikx_I}(ik)^{-m} terms (m = 2..) are fitted
  // as nuisance parameters so the oscillation of f does not bias c.
  double x_I = 0.0;
  int oscillatory_terms = 3;
  // Continue the resonance string beyond R from its fitted asymptotic law.
  bool complete_tail = true;
  int min_string = 8;       // fewest resonances with Re k > 0 needed for the law
  double phantom_far = 20;  // phantoms up to phantom_far * R, analytic beyond
  // With a completed string and known x_I, snap arg f0 to a multiple of pi
  // (found with c = i x_I, the type of the completed product) and fit only Im c.
  bool fix_exponent = true;
};

struct CalibrationReport {
  double fit_lo = 0.0;
  double fit_hi = 0.0;
  double residual_re = 0.0;  // max misfit of Re log(f/ik) on the window
  double residual_im = 0.0;
  std::vector<double> probe_T;         // heights on i R_+
  std::vector<double> probe_residual;  // |f(ik)/(ik) - 1| at k = iT
  double f0_imag = 0.0;
};

// Asymptotic law of the resonance string used for the completion:
// Re k_n = spacing n + a0 + a1/(n+1) + a2/(n+1)^2, Im k_n = p0 + p1 ln Re k_n + p2 / Re k_n.
struct TailCompletion {
  bool used = false;
  double spacing = 0.0;
  double a0 = 0.0, a1 = 0.0, a2 = 0.0;
  double p0 = 0.0, p1 = 0.0, p2 = 0.0;
  int phantoms = 0;
  double far = 0.0;
  Complex linear = 0.0;    // log of the product beyond `far`: linear k + quadratic k^2
  double quadratic = 0.0;
};

// f(k) = f0 exp(c k) prod_{|k_n| <= R} (1 - k/k_n) x completion, where the
// completion is the continued string up to `far` and its analytic remainder.
class HadamardJost {
 public:
  std::vector<Complex> zeros;     // input zeros with |k_n| <= R, repeated by multiplicity
  std::vector<Complex> phantoms;  // continued string beyond R
  double R = 0.0;
  Complex f0 = 1.0;
  Complex exp_coeff = 0.0;  // c = i beta
  double b1 = 0.0;          // f ~ ik + b1 + O(1/k)
  TailCompletion completion;
  CalibrationReport calibration;

  Complex operator()(Complex k) const;
  Complex derivative(Complex k) const;
  // sum_n [log(k_n - k) - log k_n] over zeros and phantoms; continuous along the real axis
  Complex log_product(Complex k) const;
  Complex exponent(Complex k) const;  // c k plus the analytic remainder
  Complex linear_coeff() const { return exp_coeff + completion.linear; }
};

// Zeros of the set closed under k -> -conj k within symmetry_tol.
void check_symmetry(const std::vector<Complex>& zeros, double tol);

HadamardJost hadamard_jost(const ResonanceSet& zeros, double R, const HadamardOptions& opts = {});
HadamardJost hadamard_jost(const std::vector<Complex>& zeros, double R, const HadamardOptions& opts = {});

// S(k) = -f(-k)/f(k) and m_j = -i f'(k_j)/f(-k_j) from the calibrated product.
ScatteringData scattering_from_zeros(const HadamardJost& jost, double x_I);
ScatteringData scattering_from_zeros(const ResonanceSet& zeros, double x_I, double R = 0.0,
                                     const HadamardOptions& opts = {});

// The closed products for S and m_j, with the exponent taken from the
// calibration (e^{-2i x_I k} and e^{-2 kappa_j x_I} when c = i x_I) and the
// completed string included.
struct ExplicitProducts {
  std::vector<double> m;
  double max_S_diff = 0.0;      // against the calibrated route on [0, fit_lo]
  double literal_S_diff = 0.0;  // bare truncated product with e^{-2i x_I k}; O(k ln R / R)
  double max_m_rel_diff = 0.0;
};
ExplicitProducts explicit_products(const HadamardJost& jost, const ScatteringData& data, double x_I);

// Condition II of the Jost class on the zeros in C_+: on i R_+, simple,
// strictly decreasing moduli and (-1)^n f(-k_n) < 0.
struct EigenClassReport {
  int N = 0;
  double max_real_part = 0.0;
  std::vector<double> partner_values;  // (-1)^n f(-k_n)
  bool on_axis = true;
  bool ordered = true;
  bool signs = true;
  bool passed() const { return on_axis && ordered && signs; }
};
EigenClassReport check_eigen_class(const HadamardJost& jost, double axis_tol = 1e-8);

struct InvertOptions {
  double R = 0.0;  // 0: max(max |k_n|, 100 / x_I)
  HadamardOptions hadamard;
  KernelOptions kernel;  // x_I and K_max are filled in by invert
  MarchenkoOptions marchenko;
  ClassOptions class_check;
};

struct InversionDiagnostics {
  double R = 0.0;
  int zeros_used = 0;
  CalibrationReport calibration;
  Complex f0 = 0.0;
  Complex exp_coeff = 0.0;
  EigenClassReport eigen_class;
  ClassReport class_report;
  std::vector<double> norming_constants;
  ExplicitProducts explicit_check;
  double kernel_K_max = 0.0;
  double decay_certificate = 0.0;
  bool support_ok = false;
  double max_condition = 0.0;
  double support_residual = 0.0;
  double h_recovered = 0.0;
};

struct InversionResult {
  PotentialProfile V;
  InversionDiagnostics diagnostics;
  ScatteringData data;
  MarchenkoKernel kernel;
  MarchenkoSolution solution;
};

// Zeros -> calibrated product -> S, m_j -> G0 -> Marchenko -> V, h.
// Errors carry the failing stage name.
InversionResult invert(const ResonanceSet& zeros, double x_I, const InvertOptions& opts = {});
InversionResult invert(const std::vector<Complex>& zeros, double x_I, const InvertOptions& opts = {});

// mu = mu_I (w1^2 - w2^2) / (w1^2 - w2^2 - mu_I (V1 - V2)) pointwise.
ShearProfile recover_shear(const PotentialProfile& V1, const PotentialProfile& V2, double omega1, double omega2,
                           double mu_tail, double singular_tol = 1e-12);

}  // namespace loveres
