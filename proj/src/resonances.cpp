#include "loveres/resonances.hpp"

#include <algorithm>
#include <atomic>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

#include "loveres/errors.hpp"

namespace loveres {

namespace {

struct BoundaryHit {};

double wrap(double a) {
  while (a > kPi) a -= 2 * kPi;
  while (a <= -kPi) a += 2 * kPi;
  return a;
}

// Argument-principle winding over a rectangle boundary by phase tracking.
class Winder {
 public:
  Winder(const ComplexFunction& f, const CountOptions& o) : f_(f), o_(o) {}

  int count(const Rectangle& r) {
    if (!(r.re_max > r.re_min) || !(r.im_max > r.im_min)) throw DomainError("count_zeros: empty rectangle");
    min_len_ = o_.guard * std::max(1.0, r.diameter());
    const Complex z[4] = {{r.re_min, r.im_min}, {r.re_max, r.im_min}, {r.re_max, r.im_max}, {r.re_min, r.im_max}};
    Complex fz[4];
    for (int i = 0; i < 4; ++i) fz[i] = eval(z[i]);
    double total = 0.0;
    for (int i = 0; i < 4; ++i) total += edge(z[i], fz[i], z[(i + 1) % 4], fz[(i + 1) % 4]);
    const double w = total / (2 * kPi);
    const long n = std::lround(w);
    if (std::abs(w - static_cast<double>(n)) > 0.25 || n < 0) throw BoundaryHit{};
    return static_cast<int>(n);
  }

  long evaluations() const { return evals_; }

 private:
  Complex eval(Complex z) {
    ++evals_;
    const Complex v = f_(z);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()) || v == Complex(0.0)) throw BoundaryHit{};
    return v;
  }

  double segment(Complex a, Complex fa, Complex b, Complex fb, int depth) {
    const double d = wrap(std::arg(fb) - std::arg(fa));
    if (std::abs(d) <= o_.max_phase_step) return d;
    if (std::abs(b - a) < min_len_ || depth > 200) throw BoundaryHit{};
    const Complex m = 0.5 * (a + b);
    const Complex fm = eval(m);
    return segment(a, fa, m, fm, depth + 1) + segment(m, fm, b, fb, depth + 1);
  }

  double edge(Complex a, Complex fa, Complex b, Complex fb) {
    const int n = std::max(4, static_cast<int>(std::ceil(std::abs(b - a) / o_.max_spacing)));
    double total = 0.0;
    Complex p = a, fp = fa;
    for (int i = 1; i <= n; ++i) {
      const Complex q = i == n ? b : a + (b - a) * (static_cast<double>(i) / n);
      const Complex fq = i == n ? fb : eval(q);
      total += segment(p, fp, q, fq, 0);
      p = q;
      fp = fq;
    }
    return total;
  }

  const ComplexFunction& f_;
  const CountOptions& o_;
  double min_len_ = 0.0;
  long evals_ = 0;
};

Rectangle perturbed(const Rectangle& r, int attempt) {
  // grow outward by small, deliberately incommensurate amounts
  const double s = 1e-3 * (attempt + 1) * std::max(1e-3, std::min(r.width(), r.height()));
  return {r.re_min - 0.731 * s, r.re_max + 1.187 * s, r.im_min - 0.913 * s, r.im_max + 0.577 * s};
}

}  // namespace

CountResult count_zeros_detail(const ComplexFunction& f, const Rectangle& rect, const CountOptions& opts) {
  Winder w(f, opts);
  Rectangle r = rect;
  for (int attempt = 0; attempt <= opts.max_perturbations; ++attempt) {
    try {
      CountResult res;
      res.count = w.count(r);
      res.rect = r;
      res.perturbations = attempt;
      res.evaluations = w.evaluations();
      return res;
    } catch (const BoundaryHit&) {
      r = perturbed(rect, attempt);
    }
  }
  throw BoundaryDegeneracyError("count_zeros: zero on or near the rectangle boundary after " +
                                std::to_string(opts.max_perturbations) + " perturbations");
}

int count_zeros(const ComplexFunction& f, const Rectangle& rect, const CountOptions& opts) {
  return count_zeros_detail(f, rect, opts).count;
}

std::vector<Complex> ResonanceSet::all_zeros() const {
  std::vector<Complex> out;
  for (const auto* list : {&eigenvalues, &resonances})
    for (const Zero& z : *list)
      for (int m = 0; m < z.multiplicity; ++m) out.push_back(z.k);
  return out;
}

int ResonanceSet::total_multiplicity() const {
  int n = 0;
  for (const auto* list : {&eigenvalues, &resonances})
    for (const Zero& z : *list) n += z.multiplicity;
  return n;
}

unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("LOVE_RES_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<unsigned>(std::min<long>(v, 256));
  }
  return 1;
}

namespace {

struct Box {
  Rectangle r;
  int count;
};

struct BoxOutput {
  std::vector<Zero> zeros;
  std::vector<Rectangle> unresolved;
};

class Finder {
 public:
  Finder(const ComplexFunction& f, const ComplexFunction& df, double tol, const FinderOptions& o)
      : f_(f), df_(df), tol_(tol), o_(o) {}

  int count(const Rectangle& r) const {
    Winder w(f_, o_.count);
    return w.count(r);
  }

  bool terminal(const Box& b) const {
    return b.count == 0 || (b.count == 1 && b.r.diameter() < o_.box_diameter) ||
           b.r.diameter() < o_.min_box * std::max(1.0, std::abs(b.r.center()));
  }

  // Split into two children whose counts add up; false if no split works.
  bool split(const Box& b, Box& lo, Box& hi) const {
    static const double fractions[] = {0.5, 0.5713, 0.4187, 0.6331, 0.3547};
    const bool vertical_cut = b.r.width() >= b.r.height();
    for (double t : fractions) {
      Rectangle a = b.r, c = b.r;
      if (vertical_cut) {
        const double x = b.r.re_min + t * b.r.width();
        a.re_max = x;
        c.re_min = x;
      } else {
        const double y = b.r.im_min + t * b.r.height();
        a.im_max = y;
        c.im_min = y;
      }
      try {
        const int na = count(a), nc = count(c);
        if (na + nc == b.count) {
          lo = {a, na};
          hi = {c, nc};
          return true;
        }
      } catch (const BoundaryHit&) {
      }
    }
    return false;
  }

  void process(const Box& b, BoxOutput& out) const {
    if (b.count == 0) return;
    if (b.r.diameter() < o_.min_box * std::max(1.0, std::abs(b.r.center()))) {
      cluster(b, out);
      return;
    }
    if (b.count == 1 && b.r.diameter() < o_.box_diameter) {
      refine(b, out);
      return;
    }
    Box lo, hi;
    if (!split(b, lo, hi)) {
      out.unresolved.push_back(b.r);
      return;
    }
    process(lo, out);
    process(hi, out);
  }

 private:
  Zero make_zero(Complex z) const {
    Zero r;
    r.k = z;
    r.residual = std::abs(f_(z));
    r.derivative_abs = std::abs(df_(z));
    return r;
  }

  void cluster(const Box& b, BoxOutput& out) const {
    Zero z = make_zero(b.r.center());
    z.multiplicity = b.count;
    z.degenerate = b.count > 1;
    out.zeros.push_back(z);
  }

  bool newton(const Box& b, Complex& z) const {
    z = b.r.center();
    const double pad = std::max(tol_, 1e-12 * std::abs(z));
    for (int it = 0; it < o_.max_newton; ++it) {
      const Complex fz = f_(z), dz = df_(z);
      if (dz == Complex(0.0)) return false;
      const Complex step = fz / dz;
      z -= step;
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
      if (!b.r.contains(z, 0.5 * b.r.diameter())) return false;
      if (std::abs(step) <= std::max(1e-2 * tol_, 4e-16 * std::abs(z))) return b.r.contains(z, pad);
    }
    return false;
  }

  bool muller(const Box& b, Complex& z) const {
    const double d = b.r.diameter();
    Complex x0 = b.r.center() - 0.1 * d, x1 = b.r.center() + Complex(0, 0.1 * d), x2 = b.r.center();
    Complex f0 = f_(x0), f1 = f_(x1), f2 = f_(x2);
    const double pad = std::max(tol_, 1e-12 * std::abs(x2));
    for (int it = 0; it < 200; ++it) {
      const Complex h1 = x1 - x0, h2 = x2 - x1;
      const Complex d1 = (f1 - f0) / h1, d2 = (f2 - f1) / h2;
      const Complex a = (d2 - d1) / (h2 + h1);
      const Complex bb = a * h2 + d2;
      const Complex disc = std::sqrt(bb * bb - 4.0 * f2 * a);
      const Complex den = std::abs(bb + disc) > std::abs(bb - disc) ? bb + disc : bb - disc;
      if (den == Complex(0.0)) return false;
      const Complex step = -2.0 * f2 / den;
      x0 = x1;
      f0 = f1;
      x1 = x2;
      f1 = f2;
      x2 = x2 + step;
      if (!std::isfinite(x2.real()) || !std::isfinite(x2.imag())) return false;
      f2 = f_(x2);
      if (std::abs(step) <= std::max(1e-2 * tol_, 4e-16 * std::abs(x2)) || f2 == Complex(0.0)) {
        z = x2;
        return b.r.contains(z, pad);
      }
    }
    return false;
  }

  void refine(const Box& b, BoxOutput& out) const {
    Complex z;
    if (newton(b, z) || muller(b, z)) {
      out.zeros.push_back(make_zero(z));
      return;
    }
    out.unresolved.push_back(b.r);
  }

  const ComplexFunction& f_;
  const ComplexFunction& df_;
  double tol_;
  const FinderOptions& o_;
};

bool by_position(const Zero& a, const Zero& b) {
  if (a.k.real() != b.k.real()) return a.k.real() < b.k.real();
  return a.k.imag() < b.k.imag();
}

}  // namespace

ResonanceSet find_zeros(const ComplexFunction& fh, const ComplexFunction& fh_dk, const Rectangle& region,
                        double tol, const FinderOptions& opts) {
  if (!(tol > 0.0)) throw DomainError("find_zeros: tol must be positive");
  const CountResult root = count_zeros_detail(fh, region, opts.count);
  ResonanceSet out;
  out.search_region = root.rect;
  out.region_count = root.count;
  out.tol = tol;

  Finder finder(fh, fh_dk, tol, opts);
  // Fixed breadth-first decomposition, independent of the worker count, so
  // that results do not depend on scheduling.
  std::vector<Box> frontier{{root.rect, root.count}};
  std::vector<Rectangle> unresolved;
  for (int level = 0; level < 4; ++level) {
    std::vector<Box> next;
    bool changed = false;
    for (const Box& b : frontier) {
      if (b.count == 0) continue;
      if (finder.terminal(b)) {
        next.push_back(b);
        continue;
      }
      Box lo, hi;
      if (finder.split(b, lo, hi)) {
        next.push_back(lo);
        next.push_back(hi);
        changed = true;
      } else {
        unresolved.push_back(b.r);
      }
    }
    frontier.swap(next);
    if (!changed) break;
  }

  std::vector<BoxOutput> results(frontier.size());
  const unsigned workers = std::min<unsigned>(resolve_workers(opts.workers),
                                              static_cast<unsigned>(std::max<std::size_t>(1, frontier.size())));
  std::atomic<std::size_t> next_box{0};
  auto work = [&] {
    for (std::size_t i; (i = next_box.fetch_add(1)) < frontier.size();) finder.process(frontier[i], results[i]);
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  std::vector<Zero> zeros;
  for (auto& r : results) {
    zeros.insert(zeros.end(), r.zeros.begin(), r.zeros.end());
    unresolved.insert(unresolved.end(), r.unresolved.begin(), r.unresolved.end());
  }
  for (Zero& z : zeros) {
    z.near_real = std::abs(z.k.imag()) < opts.axis_tol;
    z.near_origin = std::abs(z.k) < opts.origin_margin;
    if (z.k.imag() > opts.axis_tol)
      out.eigenvalues.push_back(z);
    else
      out.resonances.push_back(z);
  }
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end(),
            [](const Zero& a, const Zero& b) { return std::abs(a.k) > std::abs(b.k); });
  std::sort(out.resonances.begin(), out.resonances.end(), by_position);
  out.unresolved = std::move(unresolved);
  return out;
}

double eigenvalue_search_height(const PotentialProfile& V, double h) {
  double vmin = 0.0;
  for (double v : V.values) vmin = std::min(vmin, v);
  const double d3 = l1_norm(V) + std::abs(h) + 1.0;
  // variational bound: kappa^2 <= max(-V) + max(h, 0)^2
  const double var = std::sqrt(-vmin + std::max(h, 0.0) * std::max(h, 0.0)) + 1.0;
  return std::max(d3, var);
}

std::vector<Complex> eigenvalues(const JostSolver& solver, double h) {
  const PotentialProfile& V = solver.potential();
  const double t_max = eigenvalue_search_height(V, h);
  const double t_min = 1e-3;
  auto g = [&](double t) { return solver.evaluate(Complex(0, t), h).fh.real(); };

  const ComplexFunction fz = [&](Complex k) { return solver.evaluate(k, h).fh; };
  const int expected = count_zeros(fz, Rectangle{-0.5, 0.5, 0.5 * t_min, t_max});

  std::vector<std::pair<double, double>> brackets;
  for (int n = std::max(200, static_cast<int>(40 * t_max)); n <= (1 << 20); n *= 2) {
    brackets.clear();
    double t0 = t_min, g0 = g(t0);
    for (int i = 1; i <= n; ++i) {
      const double t1 = t_min + (t_max - t_min) * i / n;
      const double g1 = g(t1);
      if (g1 == 0.0 || (g0 < 0.0) != (g1 < 0.0)) brackets.emplace_back(t0, t1);
      t0 = t1;
      g0 = g1;
    }
    if (static_cast<int>(brackets.size()) >= expected) break;
  }

  std::vector<Complex> out;
  for (auto [a, b] : brackets) {
    double t;
    const double ga = g(a), gb = g(b);
    if (gb == 0.0) {
      t = b;
    } else {
      boost::uintmax_t iters = 200;
      auto [lo, hi] = boost::math::tools::toms748_solve(g, a, b, ga, gb,
                                                        boost::math::tools::eps_tolerance<double>(50), iters);
      t = 0.5 * (lo + hi);
    }
    // polish: d/dt f_h(it) = i f_h'(it), real on the axis
    for (int it = 0; it < 4; ++it) {
      const JostEval e = solver.evaluate(Complex(0, t), h);
      const double d = (Complex(0, 1) * e.fh_dk).real();
      if (d == 0.0) break;
      const double step = e.fh.real() / d;
      if (std::abs(step) > b - a) break;
      t -= step;
      if (std::abs(step) < 1e-16 * t) break;
    }
    out.emplace_back(0.0, t);
  }
  std::sort(out.begin(), out.end(), [](Complex a, Complex b) { return a.imag() > b.imag(); });
  return out;
}

std::vector<Complex> eigenvalues(const PotentialProfile& V, double h) { return eigenvalues(JostSolver(V), h); }

LevinsonReport levinson_statistics(const std::vector<Complex>& zeros, double r, double x_I, double delta) {
  LevinsonReport rep;
  for (Complex z : zeros) {
    if (std::abs(z) > r) continue;
    ++rep.count_in_disk;
    const double a = std::abs(std::arg(z));
    if (std::min(a, kPi - a) >= delta) ++rep.outside_sector;
  }
  rep.ratio = rep.count_in_disk * kPi / (2.0 * x_I * r);
  rep.outside_fraction = rep.count_in_disk ? double(rep.outside_sector) / rep.count_in_disk : 0.0;
  return rep;
}

LevinsonReport levinson_check(const ResonanceSet& set, const ComplexFunction& fh, double r, double x_I,
                              double delta, const CountOptions& opts) {
  if (!(r > 0.0) || !(x_I > 0.0)) throw DomainError("levinson_check: r and x_I must be positive");
  const Rectangle sq{-r, r, -r, r};
  const CountResult c = count_zeros_detail(fh, sq, opts);
  const std::vector<Complex> zeros = set.all_zeros();
  int in_square = 0;
  for (Complex z : zeros)
    if (c.rect.contains(z)) ++in_square;
  if (in_square != c.count)
    throw CompletenessError("levinson_check: set has " + std::to_string(in_square) +
                            " zeros in the covering square, argument principle counts " +
                            std::to_string(c.count));
  LevinsonReport rep = levinson_statistics(zeros, r, x_I, delta);
  rep.verified_square_count = c.count;
  return rep;
}

ForbiddenReport forbidden_domain_xi(const ResonanceSet& set, double omega, double mu_tail,
                                    const PotentialProfile& V, double h) {
  ForbiddenReport rep;
  const double nv = l1_norm(V);
  // V' measured as total variation, including the drop to zero at x_I
  const double dv = total_variation(V) + std::abs(V.values.back());
  const double v0 = std::abs(V.values.front());
  rep.C0 = nv * std::exp(nv);
  rep.C1_k = (nv * nv + 2 * std::abs(h) * nv + 0.25 * (v0 + dv)) * std::exp(nv);
  rep.C1_xi = 1.5 * nv * nv + 2 * std::abs(h) * nv + 0.25 * (v0 + dv) * std::exp(nv);
  rep.min_c0_slack_k = rep.min_c0_slack_xi = std::numeric_limits<double>::infinity();
  const double inf = std::numeric_limits<double>::infinity();
  for (Complex k : set.all_zeros()) {
    ForbiddenEntry e;
    e.k = k;
    e.xi = xi_of_k(k, omega, mu_tail).xi;
    const double gk = std::exp(2 * std::abs(k.imag()) * V.x_I);
    const double gx = std::exp(2 * std::abs(e.xi.real()) * V.x_I);
    e.c0_slack_k = rep.C0 * gk - std::abs(k);
    e.c0_slack_xi = rep.C0 * gx - std::abs(e.xi);
    e.c1_slack_k = std::abs(k) > 1 ? rep.C1_k * gk - std::norm(k) : inf;
    e.c1_slack_xi = std::abs(e.xi) > 1 ? rep.C1_xi * gx - std::norm(e.xi) : inf;
    e.asymptotic_dev = std::abs(k + Complex(0, 1) * e.xi);
    rep.min_c0_slack_k = std::min(rep.min_c0_slack_k, e.c0_slack_k);
    rep.min_c0_slack_xi = std::min(rep.min_c0_slack_xi, e.c0_slack_xi);
    if (e.c0_slack_k < 0 || e.c0_slack_xi < 0) ++rep.c0_violations;
    if (e.c1_slack_k < 0 || e.c1_slack_xi < 0) ++rep.c1_violations;
    rep.entries.push_back(e);
  }
  // the ten largest |xi| among lower-half-plane zeros
  std::vector<const ForbiddenEntry*> res;
  for (const auto& e : rep.entries)
    if (e.k.imag() < 0) res.push_back(&e);
  std::sort(res.begin(), res.end(), [](auto* a, auto* b) { return std::abs(a->xi) > std::abs(b->xi); });
  const double c2 = omega * omega / mu_tail;
  for (std::size_t i = 0; i < std::min<std::size_t>(10, res.size()); ++i) {
    const double scaled = res[i]->asymptotic_dev * std::abs(res[i]->xi) / c2;
    rep.asymptotic_scaled.push_back(scaled);
    if (!(scaled <= 1.0)) rep.asymptotic_ok = false;
  }
  return rep;
}

}  // namespace loveres
