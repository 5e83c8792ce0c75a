#include "loveres/scattering.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <functional>
#include <sstream>
#include <cmath>

#include "loveres/errors.hpp"
#include "loveres/resonances.hpp"
#include "loveres/special.hpp"

namespace loveres {

namespace {
constexpr Complex I1(0.0, 1.0);

std::string num(double x) {
  std::ostringstream s;
  s.precision(10);
  s << x;
  return s.str();
}
}  // namespace

ComplexFunction scattering_function(ComplexFunction fh, double real_zero_tol) {
  return [fh = std::move(fh), real_zero_tol](Complex k) {
    const Complex a = fh(k);
    if (k.imag() == 0.0 && std::abs(a) <= real_zero_tol * (1.0 + std::abs(k)))
      throw ClassViolationError("scattering: f_h vanishes on the real axis near k = " + num(k.real()));
    return -fh(-k) / a;
  };
}

std::vector<NormingConstant> norming_constants_detail(const JostSolver& solver, double h,
                                                      const std::vector<Complex>& eigenvalues, double tol) {
  std::vector<NormingConstant> out;
  for (std::size_t j = 0; j < eigenvalues.size(); ++j) {
    const Complex k = eigenvalues[j];
    if (!(k.imag() > 0.0)) throw DomainError("norming constants: eigenvalue must lie in the upper half plane");
    const JostEval e = solver.evaluate(k, h);
    const JostEval em = solver.evaluate(-k, h);
    if (!(std::abs(e.fh_dk) > 1e-12 * (1.0 + std::abs(e.fh_dk) + std::abs(em.fh))))
      throw InconsistencyError("norming constants: vanishing derivative at k = i" + num(k.imag()));
    NormingConstant c;
    const Complex ratio = -I1 * e.fh_dk / em.fh;
    c.ratio = ratio.real();
    // f(x, k_j) is real for k_j on the positive imaginary axis
    c.integral = solver.square_integral(k).real();
    c.rel_diff = std::abs(c.ratio - c.integral) / std::max(std::abs(c.ratio), 1e-300);
    const double sgn = (j + 1) % 2 == 0 ? 1.0 : -1.0;  // (-1)^j with j counted from 1
    c.derivative_sign = (sgn * I1 * e.fh_dk).real();
    c.partner_sign = sgn * em.fh.real();
    if (!(c.rel_diff <= tol))
      throw InconsistencyError("norming constants disagree at k = i" + num(k.imag()) + ": ratio " +
                               num(c.ratio) + " vs integral " + num(c.integral));
    out.push_back(c);
  }
  return out;
}

std::vector<double> norming_constants(const PotentialProfile& V, double h,
                                      const std::vector<Complex>& eigenvalues, double tol) {
  std::vector<double> m;
  for (const auto& c : norming_constants_detail(JostSolver(V), h, eigenvalues, tol)) m.push_back(c.ratio);
  return m;
}

ScatteringData forward_scattering_data(std::shared_ptr<const JostSolver> solver) {
  ScatteringData d;
  const double h = solver->h();
  d.k_bound = eigenvalues(*solver, h);
  d.N = static_cast<int>(d.k_bound.size());
  d.m = norming_constants(solver->potential(), h, d.k_bound);
  d.tail_coeff = integral(solver->potential()) - 2.0 * h;
  d.x_I = solver->potential().x_I;
  d.S = [solver](Complex k) {
    const Complex f = solver->fh(k);
    if (k.imag() == 0.0) {
      if (std::abs(f) <= 1e-12 * (1.0 + std::abs(k)))
        throw ClassViolationError("scattering: f_h vanishes on the real axis near k = " + num(k.real()));
      return -std::conj(f) / f;  // f_h(-k) = conj f_h(k) on the real axis
    }
    return -solver->fh(-k) / f;
  };
  return d;
}

double G_residue_form(const ScatteringData& data, double x) {
  double g = 0.0;
  for (std::size_t j = 0; j < data.k_bound.size(); ++j) g -= std::exp(-data.k_bound[j].imag() * x) / data.m[j];
  return g;
}

MarchenkoKernel build_G0(const ScatteringData& data, const KernelOptions& o) {
  if (!(o.x_I > 0.0) || o.points_per_xI < 4 || o.margin_frac < 0.0)
    throw DomainError("build_G0: bad kernel grid options");
  if (data.m.size() != data.k_bound.size()) throw DomainError("build_G0: m and k_bound differ in length");
  for (double m : data.m)
    if (!(m > 0.0)) throw ClassViolationError("build_G0: non-positive norming constant");

  MarchenkoKernel ker;
  ker.x_I = o.x_I;
  ker.step = o.x_I / o.points_per_xI;
  ker.K_max = o.K_max > 0.0 ? o.K_max : 400.0 / o.x_I;
  ker.tail_coeff = data.tail_coeff;
  const int ny = static_cast<int>(std::ceil((2.0 + o.margin_frac) * o.points_per_xI - 1e-9)) + 1;
  ker.y.resize(ny);
  for (int i = 0; i < ny; ++i) ker.y[i] = ker.step * i;

  double dk = o.dk > 0.0 ? o.dk : 0.02 / o.x_I;
  for (Complex kj : data.k_bound) dk = std::min(dk, 0.1 * kj.imag());
  int nk = static_cast<int>(std::ceil(ker.K_max / dk));
  if (nk % 2) ++nk;
  dk = ker.K_max / nk;

  // remainder after removing the bound-state poles i/(m_j (k - k_j))
  std::vector<Complex> rem(nk + 1);
  for (int i = 0; i <= nk; ++i) {
    const double k = dk * i;
    Complex r = data.S(Complex(k, 0.0)) - 1.0;
    for (std::size_t j = 0; j < data.k_bound.size(); ++j) r -= I1 / (data.m[j] * (k - data.k_bound[j]));
    rem[i] = r * (i == 0 || i == nk ? 1.0 : (i % 2 ? 4.0 : 2.0)) * (dk / 3.0);
  }
  // Tail of rem = S - 1 - P as sum_n r_n (ik)^{-n}: the first two orders of
  // S - 1 follow from c1, the pole sum P contributes at every order.
  double kappa_max = 0.0;
  for (Complex kj : data.k_bound) kappa_max = std::max(kappa_max, kj.imag());
  const double K = ker.K_max;
  if (kappa_max > 0.5 * K) throw DomainError("build_G0: K_max must exceed twice the largest kappa");
  const double c1 = data.tail_coeff;
  std::vector<double> r(1, 0.0);  // r[n], n >= 1
  for (int n = 1; n <= o.max_tail_terms; ++n) {
    double pole = 0.0;
    for (std::size_t j = 0; j < data.m.size(); ++j) pole += std::pow(data.k_bound[j].imag(), n - 1) / data.m[j];
    double rn = (n % 2 == 1 ? 1.0 : -1.0) * pole;
    if (n == 1) rn += c1;
    if (n == 2) rn += 0.5 * c1 * c1;
    r.push_back(rn);
    if (n > 2 && std::abs(rn) * std::pow(K, 1 - n) < 1e-17) break;
  }
  const std::size_t nterms = r.size() - 1;
  auto series = [&](double k) {
    const Complex u = 1.0 / Complex(0.0, k);
    Complex acc = 0.0, un = u;
    for (std::size_t n = 1; n <= nterms; ++n, un *= u) acc += r[n] * un;
    return acc;
  };

  // second-order terms oscillating like e^{+-2ik x_I}, plus corrections to the
  // 1/k^3 and 1/k^4 orders (only the pole part of those is known), fitted on [K/2, K]
  Complex osc_p = 0.0, osc_q = 0.0, osc_s = 0.0, osc_t = 0.0;
  if (o.fit_oscillatory) {
    std::vector<int> idx;
    for (int i = nk / 2; i <= nk; i += std::max(1, nk / 2000)) idx.push_back(i);
    Eigen::MatrixXcd A(idx.size(), 4);
    Eigen::VectorXcd b(idx.size());
    for (std::size_t row = 0; row < idx.size(); ++row) {
      const int i = idx[row];
      const double k = dk * i;
      const double w = i == 0 || i == nk ? 1.0 : (i % 2 ? 4.0 : 2.0);
      const Complex u = 1.0 / Complex(0.0, k);
      const Complex e = std::exp(Complex(0.0, 2.0 * k * o.x_I));
      // scale rows by k^2 so every order weighs alike
      A(row, 0) = e * u * u * k * k;
      A(row, 1) = u * u / e * k * k;
      A(row, 2) = u * u * u * k * k;
      A(row, 3) = u * u * u * u * k * k;
      b[row] = (rem[i] / (w * dk / 3.0) - series(k)) * k * k;
    }
    const Eigen::VectorXcd c = A.colPivHouseholderQr().solve(b);
    osc_p = c[0];
    osc_q = c[1];
    osc_s = c[2];
    osc_t = c[3];
  }
  ker.oscillatory_coeffs = {osc_p, osc_q, osc_s, osc_t};

  ker.G0.resize(ny);
  ker.G.resize(ny);
  for (int iy = 0; iy < ny; ++iy) {
    const double y = ker.y[iy];
    double acc = 0.0;
    for (int i = 0; i <= nk; ++i) {
      const double ph = dk * i * y;
      acc += rem[i].real() * std::cos(ph) - rem[i].imag() * std::sin(ph);
    }
    double tail = 0.0;
    for (std::size_t n = 1; n <= nterms; ++n) tail += r[n] * fourier_tail(static_cast<int>(n), K, y);
    tail += osc_p.real() * fourier_tail(2, K, y + 2.0 * o.x_I) + osc_q.real() * fourier_tail(2, K, y - 2.0 * o.x_I) +
            osc_s.real() * fourier_tail(3, K, y) + osc_t.real() * fourier_tail(4, K, y);
    ker.G0[iy] = acc / kPi + tail;
    double bound = 0.0;
    for (std::size_t j = 0; j < data.k_bound.size(); ++j) bound += std::exp(-data.k_bound[j].imag() * y) / data.m[j];
    ker.G[iy] = ker.G0[iy] - bound;
  }

  ker.decay_certificate = 0.0;
  for (int iy = 0; iy < ny; ++iy)
    if (ker.y[iy] >= 2.0 * o.x_I - 1e-12 * o.x_I)
      ker.decay_certificate = std::max(ker.decay_certificate, std::abs(ker.G0[iy]));
  ker.support_ok = ker.decay_certificate <= o.support_tol;
  return ker;
}

ClassReport validate_scattering_class(const ScatteringData& data, const ClassOptions& o) {
  ClassReport rep;
  rep.N = data.N;
  const double K = o.K > 0.0 ? o.K : 100.0 / data.x_I.value_or(1.0);
  const int n = std::max(10, o.samples);

  for (int i = 1; i <= n; ++i) {
    const double k = K * i / n;
    const Complex s = data.S(Complex(k, 0.0)), sm = data.S(Complex(-k, 0.0));
    rep.unimodularity_residual = std::max({rep.unimodularity_residual, std::abs(std::abs(s) - 1.0),
                                           std::abs(std::abs(sm) - 1.0)});
    rep.conjugate_residual = std::max(rep.conjugate_residual, std::abs(s - std::conj(sm)));
    rep.inverse_residual = std::max(rep.inverse_residual, std::abs(s * sm - 1.0));
    const double c = k * std::abs(s - 1.0);
    if (k >= 0.25 * K && k <= 0.5 * K) rep.decay_constant_low = std::max(rep.decay_constant_low, c);
    if (k > 0.5 * K) rep.decay_constant_high = std::max(rep.decay_constant_high, c);
  }
  rep.condition1 = rep.unimodularity_residual < o.tol && rep.conjugate_residual < o.tol &&
                   rep.inverse_residual < o.tol;
  rep.condition2_decay = rep.decay_constant_high <= 1.5 * rep.decay_constant_low + 1e-12;

  // continuous argument of -S along (0, K], bisecting large jumps
  const double k0 = 1e-9 * std::max(1.0, K);
  rep.S0 = data.S(Complex(k0, 0.0));
  rep.degenerate_S0 = std::abs(rep.S0 - 1.0) < 1e-6;
  auto arg_mS = [&](double k) { return std::arg(-data.S(Complex(k, 0.0))); };
  const double phi0 = arg_mS(k0);
  double phi = phi0;
  const int coarse = std::max(1000, static_cast<int>(20.0 * K * data.x_I.value_or(1.0)));
  double ka = k0, pa = phi0;
  std::function<double(double, double, double, double, int)> seg = [&](double a, double fa, double b, double fb,
                                                                       int depth) {
    double d = fb - fa;
    while (d > kPi) d -= 2 * kPi;
    while (d <= -kPi) d += 2 * kPi;
    if (std::abs(d) < 0.3 || depth > 40) return d;
    const double m = 0.5 * (a + b), fm = arg_mS(m);
    return seg(a, fa, m, fm, depth + 1) + seg(m, fm, b, fb, depth + 1);
  };
  for (int i = 1; i <= coarse; ++i) {
    const double kb = k0 + (K - k0) * i / coarse;
    const double pb = arg_mS(kb);
    phi += seg(ka, pa, kb, pb, 0);
    ka = kb;
    pa = pb;
  }
  // beyond K: S -> 1, so -S approaches -1 along the short way
  const double phi_inf = phi - std::arg(data.S(Complex(K, 0.0)));
  rep.increment = (phi0 - phi_inf) / (2 * kPi);
  const double s0 = rep.S0.real();
  rep.literal_rhs = data.N + 0.25 * (s0 + 1.0);
  rep.literal_residual = rep.increment - rep.literal_rhs;
  rep.implied_N = rep.increment + 0.5 - 0.25 * (s0 + 1.0);
  rep.condition3 = std::abs(rep.implied_N - std::round(rep.implied_N)) < 1e-6 &&
                   static_cast<int>(std::lround(rep.implied_N)) == data.N;
  return rep;
}

}  // namespace loveres
