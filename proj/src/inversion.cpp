#include "loveres/inversion.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "loveres/errors.hpp"

namespace loveres {

namespace {
constexpr Complex I1(0.0, 1.0);

std::string num(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

// Least squares with unit-scaled columns already applied by the caller.
Eigen::VectorXd solve_ls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double& max_residual) {
  Eigen::VectorXd x = A.colPivHouseholderQr().solve(b);
  max_residual = (A * x - b).cwiseAbs().maxCoeff();
  return x;
}

template <class F>
auto staged(const char* stage, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (Error& e) {
    if (e.stage().empty()) e.set_stage(stage);
    throw;
  }
}
}  // namespace

Complex HadamardJost::log_product(Complex k) const {
  Complex s = 0.0;
  for (Complex kn : zeros) s += std::log(kn - k) - std::log(kn);
  for (Complex kn : phantoms) s += std::log(kn - k) - std::log(kn);
  return s;
}

Complex HadamardJost::exponent(Complex k) const {
  return linear_coeff() * k + completion.quadratic * k * k;
}

Complex HadamardJost::operator()(Complex k) const {
  Complex p = 1.0;
  for (Complex kn : zeros) p *= 1.0 - k / kn;
  for (Complex kn : phantoms) p *= 1.0 - k / kn;
  return f0 * std::exp(exponent(k)) * p;
}

Complex HadamardJost::derivative(Complex k) const {
  // product rule term by term so the value at a zero stays finite
  Complex p = 1.0, dp = 0.0;
  for (Complex kn : zeros) {
    const Complex fac = 1.0 - k / kn;
    dp = dp * fac - p / kn;
    p *= fac;
  }
  Complex q = 1.0, lq = 0.0;  // phantoms are never hit; log-derivative is safe
  for (Complex kn : phantoms) {
    q *= 1.0 - k / kn;
    lq += 1.0 / (k - kn);
  }
  const Complex dE = linear_coeff() + 2.0 * completion.quadratic * k;
  return f0 * std::exp(exponent(k)) * q * ((dE + lq) * p + dp);
}

void check_symmetry(const std::vector<Complex>& zeros, double tol) {
  std::vector<bool> used(zeros.size(), false);
  for (std::size_t i = 0; i < zeros.size(); ++i) {
    if (used[i]) continue;
    const Complex mirror = -std::conj(zeros[i]);
    const double scale = tol * std::max(1.0, std::abs(zeros[i]));
    // a zero on i R pairs with itself
    if (std::abs(mirror - zeros[i]) <= scale) {
      used[i] = true;
      continue;
    }
    std::size_t best = zeros.size();
    double best_d = scale;
    for (std::size_t j = 0; j < zeros.size(); ++j) {
      if (used[j] || j == i) continue;
      const double d = std::abs(zeros[j] - mirror);
      if (d <= best_d) {
        best_d = d;
        best = j;
      }
    }
    if (best == zeros.size()) {
      std::ostringstream s;
      s.precision(12);
      s << "zero set is not closed under k -> -conj(k): no partner for " << zeros[i].real()
        << (zeros[i].imag() < 0 ? " - " : " + ") << std::abs(zeros[i].imag()) << "i";
      throw SymmetryError(s.str());
    }
    used[i] = used[best] = true;
  }
}

namespace {

// Fit the outer half of the resonance string (Re k > 0, Im k < 0) and
// continue it up to far; the remainder beyond far enters through the first
// two Taylor coefficients of its log product, by quadrature over the law.
void complete_string(HadamardJost& J, const HadamardOptions& o) {
  std::vector<Complex> q;
  for (Complex z : J.zeros)
    if (z.real() > 0.0 && z.imag() < 0.0) q.push_back(z);
  if (static_cast<int>(q.size()) < o.min_string) return;
  std::sort(q.begin(), q.end(), [](Complex a, Complex b) { return a.real() < b.real(); });
  const int m = static_cast<int>(q.size()), first = m / 2, nf = m - first;

  TailCompletion& t = J.completion;
  const bool known = o.x_I > 0.0;
  Eigen::MatrixXd A(nf, known ? 3 : 4), B(nf, 3);
  Eigen::VectorXd ra(nf), rb(nf);
  for (int i = first; i < m; ++i) {
    const double x = q[i].real(), n1 = i + 1.0;
    if (known) {
      A.row(i - first) << 1.0, 1.0 / n1, 1.0 / (n1 * n1);
      ra[i - first] = x - kPi / o.x_I * i;
    } else {
      A.row(i - first) << 1.0, 1.0 / n1, 1.0 / (n1 * n1), static_cast<double>(i);
      ra[i - first] = x;
    }
    B.row(i - first) << 1.0, std::log(x), 1.0 / x;
    rb[i - first] = q[i].imag();
  }
  const Eigen::VectorXd ca = A.colPivHouseholderQr().solve(ra);
  const Eigen::VectorXd cb = B.colPivHouseholderQr().solve(rb);
  t.spacing = known ? kPi / o.x_I : ca[3];
  if (!(t.spacing > 0.0)) return;
  t.a0 = ca[0];
  t.a1 = ca[1];
  t.a2 = ca[2];
  t.p0 = cb[0];
  t.p1 = cb[1];
  t.p2 = cb[2];
  auto im_law = [&t](double x) { return t.p0 + t.p1 * std::log(x) + t.p2 / x; };

  t.far = o.phantom_far * J.R;
  const double last = q.back().real();
  for (int n = m;; ++n) {
    const double n1 = n + 1.0;
    const double x = t.spacing * n + t.a0 + t.a1 / n1 + t.a2 / (n1 * n1);
    if (x > t.far) break;
    if (x <= last) continue;
    const double y = std::min(im_law(x), -1e-12);
    J.phantoms.emplace_back(x, y);
    J.phantoms.emplace_back(-x, y);
  }
  t.phantoms = static_cast<int>(J.phantoms.size());

  // log prod_{far}^inf (1 - k/k_n)(1 + k/conj k_n) = -k s1 - k^2 s2 / 2 + ...
  // with s1 = sum 1/k_n + 1/(-conj k_n), s2 likewise, density 1/spacing.
  const int nq = 4000;
  const double u0 = std::log(t.far), u1 = u0 + 40.0;
  Complex s1 = 0.0;
  double s2 = 0.0;
  for (int i = 0; i < nq; ++i) {
    const double u = u0 + (u1 - u0) * (i + 0.5) / nq;
    const double x = std::exp(u), w = x * (u1 - u0) / nq / t.spacing;
    const Complex kn(x, std::min(im_law(x), 0.0));
    s1 += w * (1.0 / kn - 1.0 / std::conj(kn));
    s2 += w * 2.0 * std::real(1.0 / (kn * kn));
  }
  t.linear = -s1;
  t.quadratic = -0.5 * s2;
  t.used = true;
}

}  // namespace

HadamardJost hadamard_jost(const std::vector<Complex>& all, double R, const HadamardOptions& o) {
  if (!(R > 0.0)) throw DomainError("hadamard_jost: truncation radius must be positive");
  for (Complex z : all)
    if (std::abs(z) == 0.0 || std::abs(z.imag()) == 0.0)
      throw ClassViolationError("hadamard_jost: zero on the real axis at k = " + num(z.real()));
  check_symmetry(all, o.symmetry_tol);

  HadamardJost J;
  J.R = R;
  for (Complex z : all)
    if (std::abs(z) <= R) J.zeros.push_back(z);
  if (o.complete_tail) complete_string(J, o);

  const double hi = o.fit_hi > 0.0 ? o.fit_hi : 0.5 * R;
  const double lo = o.fit_lo > 0.0 ? o.fit_lo : 0.25 * hi;
  const int ninv = o.inverse_terms;
  const int nosc = o.x_I > 0.0 ? o.oscillatory_terms : 0;
  const bool fixed = o.fix_exponent && J.completion.used && o.x_I > 0.0;
  if (!(lo > 0.0 && lo < hi) || ninv < 1 || nosc < 0 || o.samples < 3 + ninv + 2 * nosc)
    throw DomainError("hadamard_jost: bad calibration window");
  if (fixed) J.exp_coeff = Complex(0.0, o.x_I);

  // log f0 + c k - sum_n b_n (ik)^{-n} - osc = log(ik) - L(k) - remainder(k)
  // on [lo, hi], real and imaginary parts as separate rows. Columns are
  // scaled by k/hi and powers of lo/k. The fixed variant first fits with
  // c = i x_I only to find arg f0, then holds arg f0 at the nearest multiple
  // of pi and refits Im c. The refit soaks up the linear drift of the
  // completion, which otherwise shows up as a phase error in S growing like k.
  const int ns = o.samples;
  std::vector<Complex> L(ns);
  std::vector<double> ks(ns);
  for (int s = 0; s < ns; ++s) {
    ks[s] = lo + (hi - lo) * s / (ns - 1);
    L[s] = J.log_product(Complex(ks[s], 0.0));
  }
  auto fit = [&](bool with_theta, bool with_c, double theta, double& res_re, double& res_im) {
    const int ncol = 1 + (with_theta ? 1 : 0) + (with_c ? 1 : 0) + ninv + 2 * nosc;
    Eigen::MatrixXd A(2 * ns, ncol);
    Eigen::VectorXd b(2 * ns);
    std::vector<Complex> col(ncol);
    for (int s = 0; s < ns; ++s) {
      const double k = ks[s];
      int c = 0;
      col[c++] = 1.0;
      if (with_theta) col[c++] = I1;
      if (with_c) col[c++] = I1 * (k / hi);
      const Complex iv = lo / Complex(0.0, k);  // lo/(ik)
      for (int n = 1; n <= ninv; ++n) col[c++] = -std::pow(iv, n);
      if (nosc > 0) {
        const Complex e = std::exp(Complex(0.0, 2.0 * k * o.x_I));
        for (int m = 2; m < 2 + nosc; ++m) {
          const Complex t = -e * std::pow(iv, m);
          col[c++] = t;
          col[c++] = I1 * t;
        }
      }
      for (int j = 0; j < ncol; ++j) {
        A(2 * s, j) = col[j].real();
        A(2 * s + 1, j) = col[j].imag();
      }
      Complex rhs = Complex(std::log(k), 0.5 * kPi) - L[s] - J.completion.linear * k - J.completion.quadratic * k * k;
      if (!with_c) rhs -= J.exp_coeff * k;
      if (!with_theta) rhs -= I1 * theta;
      b[2 * s] = rhs.real();
      b[2 * s + 1] = rhs.imag();
    }
    double res = 0.0;
    Eigen::VectorXd x = solve_ls(A, b, res);
    const Eigen::VectorXd resid = A * x - b;
    res_re = res_im = 0.0;
    for (int s = 0; s < ns; ++s) {
      res_re = std::max(res_re, std::abs(resid[2 * s]));
      res_im = std::max(res_im, std::abs(resid[2 * s + 1]));
    }
    return x;
  };

  double res_re = 0.0, res_im = 0.0;
  Eigen::VectorXd x = fit(true, !fixed, 0.0, res_re, res_im);
  int first_b = fixed ? 2 : 3;
  if (fixed) {
    const double theta = kPi * std::round(x[1] / kPi);
    const Eigen::VectorXd x2 = fit(false, true, theta, res_re, res_im);
    J.f0 = std::exp(Complex(x2[0], theta));
    J.exp_coeff = Complex(0.0, x2[1] / hi);
    J.b1 = x2[2] * lo;
  } else {
    J.f0 = std::exp(Complex(x[0], x[1]));
    J.exp_coeff = Complex(0.0, x[2] / hi);
    J.b1 = x[first_b] * lo;
  }

  CalibrationReport& c = J.calibration;
  c.fit_lo = lo;
  c.fit_hi = hi;
  c.residual_re = res_re;
  c.residual_im = res_im;
  c.f0_imag = J.f0.imag();
  // probe heights 50/x_I and 100/x_I when the support is known
  const double t1 = o.x_I > 0.0 ? 50.0 / o.x_I : lo, t2 = o.x_I > 0.0 ? 100.0 / o.x_I : hi;
  for (double T : {t1, t2}) {
    c.probe_T.push_back(T);
    c.probe_residual.push_back(std::abs(J(Complex(0.0, T)) / (-T) - 1.0));  // ik = -T
  }
  const double worst = std::max(res_re, res_im);
  if (!(worst <= o.calibration_tol)) {
    double reach = 0.0;
    for (Complex z : J.zeros) reach = std::max(reach, std::abs(z));
    throw CalibrationError("hadamard_jost: calibration residual " + num(worst) + " exceeds " +
                           num(o.calibration_tol) + " on [" + num(lo) + ", " + num(hi) + "] (R = " + num(R) +
                           ", zeros reach |k| = " + num(reach) + "; the set must be complete up to R)");
  }
  return J;
}

HadamardJost hadamard_jost(const ResonanceSet& zeros, double R, const HadamardOptions& opts) {
  return hadamard_jost(zeros.all_zeros(), R, opts);
}

ScatteringData scattering_from_zeros(const HadamardJost& J, double x_I) {
  if (!(x_I > 0.0)) throw DomainError("scattering_from_zeros: x_I must be positive");
  ScatteringData d;
  d.x_I = x_I;
  d.tail_coeff = -2.0 * J.b1;

  // S = -f(-k)/f(k); f0 and the even part of the exponent cancel
  std::vector<Complex> zeros = J.zeros;
  zeros.insert(zeros.end(), J.phantoms.begin(), J.phantoms.end());
  const Complex c2 = 2.0 * J.linear_coeff();  // E(k) - E(-k) = 2 (c + remainder) k
  d.S = [zeros, c2](Complex k) {
    Complex p = 1.0;
    for (Complex kn : zeros) p *= (kn + k) / (kn - k);
    return -std::exp(-c2 * k) * p;
  };

  std::vector<Complex> bound;
  for (Complex z : J.zeros)
    if (z.imag() > 0.0) bound.push_back(z);
  std::sort(bound.begin(), bound.end(), [](Complex a, Complex b) { return a.imag() > b.imag(); });
  for (std::size_t j = 0; j < bound.size(); ++j) {
    const Complex kj = bound[j];
    Complex p = I1 / (2.0 * kj) * std::exp(c2 * kj);
    bool skipped = false;
    for (Complex kn : zeros) {
      if (!skipped && kn == kj) {
        skipped = true;
        continue;
      }
      if (std::abs(kn + kj) == 0.0)
        throw ClassViolationError("scattering_from_zeros: -k_j is also a zero for k_j = i" + num(kj.imag()));
      p *= (kn - kj) / (kn + kj);
    }
    if (!(p.real() > 0.0) || !std::isfinite(p.real()))
      throw ClassViolationError("scattering_from_zeros: norming constant m = " + num(p.real()) +
                                " is not positive at k = i" + num(kj.imag()));
    d.k_bound.push_back(Complex(0.0, kj.imag()));
    d.m.push_back(p.real());
  }
  d.N = static_cast<int>(d.k_bound.size());
  return d;
}

ScatteringData scattering_from_zeros(const ResonanceSet& zeros, double x_I, double R, const HadamardOptions& opts) {
  if (R <= 0.0) {
    for (Complex z : zeros.all_zeros()) R = std::max(R, std::abs(z));
    R = std::max(R * (1.0 + 1e-12), 100.0 / x_I);
  }
  HadamardOptions ho = opts;
  if (ho.x_I <= 0.0) ho.x_I = x_I;
  return scattering_from_zeros(hadamard_jost(zeros, R, ho), x_I);
}

ExplicitProducts explicit_products(const HadamardJost& J, const ScatteringData& data, double x_I) {
  ExplicitProducts e;
  std::vector<Complex> all = J.zeros;
  all.insert(all.end(), J.phantoms.begin(), J.phantoms.end());
  const int n = 200;
  for (int i = 1; i <= n; ++i) {
    const double k = J.calibration.fit_lo * i / n;
    const Complex S = data.S(Complex(k, 0.0));
    Complex lit = -std::exp(Complex(0.0, -2.0 * x_I * k));
    for (Complex kn : J.zeros) lit *= (kn + k) / (kn - k);
    // the exponent carries c and the even/odd split of the analytic remainder
    Complex p = -std::exp(J.exponent(-k) - J.exponent(k));
    for (Complex kn : all) p *= (kn + k) / (kn - k);
    e.max_S_diff = std::max(e.max_S_diff, std::abs(p - S));
    e.literal_S_diff = std::max(e.literal_S_diff, std::abs(lit - S));
  }
  for (std::size_t j = 0; j < data.k_bound.size(); ++j) {
    const double kappa = data.k_bound[j].imag();
    const Complex kj = data.k_bound[j];
    Complex p = std::exp(J.exponent(kj) - J.exponent(-kj)) / (2.0 * kappa);
    std::size_t self = 0;
    for (std::size_t n = 1; n < all.size(); ++n)
      if (std::abs(all[n] - kj) < std::abs(all[self] - kj)) self = n;
    for (std::size_t n = 0; n < all.size(); ++n)
      if (n != self) p *= (all[n] - kj) / (all[n] + kj);
    e.m.push_back(p.real());
    e.max_m_rel_diff = std::max(e.max_m_rel_diff, std::abs(p.real() - data.m[j]) / data.m[j]);
  }
  return e;
}

EigenClassReport check_eigen_class(const HadamardJost& J, double axis_tol) {
  EigenClassReport rep;
  std::vector<Complex> up;
  for (Complex z : J.zeros)
    if (z.imag() > 0.0) up.push_back(z);
  std::sort(up.begin(), up.end(), [](Complex a, Complex b) { return std::abs(a) > std::abs(b); });
  rep.N = static_cast<int>(up.size());
  for (std::size_t n = 0; n < up.size(); ++n) {
    rep.max_real_part = std::max(rep.max_real_part, std::abs(up[n].real()));
    if (std::abs(up[n].real()) > axis_tol * std::max(1.0, std::abs(up[n]))) rep.on_axis = false;
    if (n > 0 && !(std::abs(up[n]) < std::abs(up[n - 1]))) rep.ordered = false;
    const double sgn = (n % 2 == 0) ? -1.0 : 1.0;  // (-1)^n with n counted from 1
    const double v = sgn * J(-Complex(0.0, up[n].imag())).real();
    rep.partner_values.push_back(v);
    if (!(v < 0.0)) rep.signs = false;
  }
  return rep;
}

InversionResult invert(const std::vector<Complex>& zeros, double x_I, const InvertOptions& o) {
  if (!(x_I > 0.0)) throw DomainError("invert: x_I must be positive");
  InversionResult out;
  InversionDiagnostics& dg = out.diagnostics;

  double R = o.R;
  if (R <= 0.0) {
    for (Complex z : zeros) R = std::max(R, std::abs(z));
    R = std::max(R * (1.0 + 1e-12), 100.0 / x_I);
  }
  dg.R = R;

  const HadamardJost J = staged("calibration", [&] {
    HadamardOptions ho = o.hadamard;
    if (ho.x_I <= 0.0) ho.x_I = x_I;
    return hadamard_jost(zeros, R, ho);
  });
  dg.zeros_used = static_cast<int>(J.zeros.size());
  dg.calibration = J.calibration;
  dg.f0 = J.f0;
  dg.exp_coeff = J.exp_coeff;

  dg.eigen_class = staged("class-check", [&] {
    EigenClassReport rep = check_eigen_class(J);
    if (!rep.on_axis) throw ClassViolationError("invert: a zero in the upper half-plane is off i R_+");
    if (!rep.ordered) throw ClassViolationError("invert: eigenvalues are not simple");
    if (!rep.signs) throw ClassViolationError("invert: eigenvalues violate the sign alternation of f(-k_n)");
    return rep;
  });

  const ScatteringData data = staged("scattering", [&] { return scattering_from_zeros(J, x_I); });
  dg.norming_constants = data.m;
  staged("scattering", [&] {
    ClassOptions co = o.class_check;
    if (co.K <= 0.0) co.K = J.calibration.fit_hi;
    dg.class_report = validate_scattering_class(data, co);
    dg.explicit_check = explicit_products(J, data, x_I);
    return 0;
  });

  const MarchenkoKernel ker = staged("kernel", [&] {
    KernelOptions ko = o.kernel;
    ko.x_I = x_I;
    if (ko.K_max <= 0.0) ko.K_max = J.calibration.fit_hi;
    return build_G0(data, ko);
  });
  dg.kernel_K_max = ker.K_max;
  dg.decay_certificate = ker.decay_certificate;
  dg.support_ok = ker.support_ok;

  const MarchenkoSolution sol = staged("marchenko", [&] { return solve_marchenko_all(ker, o.marchenko); });
  dg.max_condition = sol.max_condition;
  dg.support_residual = sol.support_residual;

  out.V = staged("recovery", [&] { return recover_potential(sol); });
  dg.h_recovered = out.V.h;
  out.data = data;
  out.kernel = ker;
  out.solution = sol;
  return out;
}

InversionResult invert(const ResonanceSet& zeros, double x_I, const InvertOptions& opts) {
  return invert(zeros.all_zeros(), x_I, opts);
}

ShearProfile recover_shear(const PotentialProfile& V1, const PotentialProfile& V2, double omega1, double omega2,
                           double mu_tail, double singular_tol) {
  if (omega1 == omega2) throw DomainError("recover_shear: requires omega1 != omega2");
  if (!(omega1 > 0.0 && omega2 > 0.0)) throw DomainError("recover_shear: frequencies must be positive");
  if (!(mu_tail > 0.0)) throw DomainError("recover_shear: mu_tail must be positive");
  if (V1.grid != V2.grid || V1.values.size() != V2.values.size())
    throw DomainError("recover_shear: potentials must share a grid");
  const double dw = omega1 * omega1 - omega2 * omega2;
  ShearProfile p;
  p.depth_grid = V1.grid;
  p.mu_tail = mu_tail;
  p.x_I = V1.x_I;
  p.mu.resize(V1.values.size());
  for (std::size_t i = 0; i < V1.values.size(); ++i) {
    const double dv = V1.values[i] - V2.values[i];
    if (dv == 0.0) {
      p.mu[i] = mu_tail;
      continue;
    }
    const double den = dw - mu_tail * dv;
    if (std::abs(den) <= singular_tol * std::abs(dw))
      throw SingularRecoveryError("recover_shear: vanishing denominator at x = " + num(V1.grid[i]));
    p.mu[i] = mu_tail * dw / den;
  }
  return p;
}

}  // namespace loveres
