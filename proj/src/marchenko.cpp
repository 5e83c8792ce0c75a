#include "loveres/marchenko.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "loveres/errors.hpp"
#include "loveres/resonances.hpp"

namespace loveres {

MarchenkoRow solve_marchenko(const MarchenkoKernel& kernel, double x, const MarchenkoOptions& opts) {
  if (!(kernel.step > 0.0)) throw DomainError("marchenko: kernel has no grid");
  const double d = kernel.step;
  const long ix = std::lround(x / d);
  if (ix < 0) throw DomainError("marchenko: x must be nonnegative");
  MarchenkoRow row;
  row.x = d * ix;
  const double upper = 2.0 * kernel.x_I - row.x + opts.margin_frac * kernel.x_I;
  const long n = upper < row.x ? 0 : static_cast<long>(std::floor((upper - row.x) / d + 1e-9)) + 1;
  if (n <= 0) return row;

  row.t.resize(n);
  for (long j = 0; j < n; ++j) row.t[j] = row.x + d * j;
  Eigen::MatrixXd M(n, n);
  Eigen::VectorXd b(n);
  for (long j = 0; j < n; ++j) {
    b[j] = -kernel.G0_at(static_cast<std::size_t>(2 * ix + j));
    for (long l = 0; l < n; ++l) {
      const double w = (l == 0 || l == n - 1) && n > 1 ? 0.5 * d : d;
      M(j, l) = w * kernel.G0_at(static_cast<std::size_t>(2 * ix + j + l)) + (j == l ? 1.0 : 0.0);
    }
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
  const double rc = lu.rcond();
  row.condition = rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
  if (!(row.condition <= opts.cond_limit))
    throw DegenerateDataError("marchenko: system at x = " + std::to_string(row.x) +
                              " is ill-conditioned (cond ~ " + std::to_string(row.condition) + ")");
  const Eigen::VectorXd a = lu.solve(b);
  const double bn = b.lpNorm<Eigen::Infinity>();
  row.residual = (M * a - b).lpNorm<Eigen::Infinity>() / (bn > 0.0 ? bn : 1.0);
  row.A.assign(a.data(), a.data() + n);
  return row;
}

std::vector<double> minus_twice_derivative(const std::vector<double>& a, double step) {
  const std::size_t n = a.size();
  std::vector<double> v(n, 0.0);
  if (n < 3) return v;
  for (std::size_t i = 0; i < n; ++i) {
    double da;
    if (i == 0)
      da = (-3.0 * a[0] + 4.0 * a[1] - a[2]) / (2.0 * step);
    else if (i == n - 1)
      da = (3.0 * a[n - 1] - 4.0 * a[n - 2] + a[n - 3]) / (2.0 * step);
    else if (i == 1 || i == n - 2 || n < 5)
      da = (a[i + 1] - a[i - 1]) / (2.0 * step);
    else
      da = (-a[i + 2] + 8.0 * a[i + 1] - 8.0 * a[i - 1] + a[i - 2]) / (12.0 * step);
    v[i] = -2.0 * da;
  }
  return v;
}

MarchenkoSolution solve_marchenko_all(const MarchenkoKernel& kernel, const MarchenkoOptions& opts) {
  MarchenkoSolution sol;
  sol.x_I = kernel.x_I;
  sol.step = kernel.step;
  sol.tail_coeff = kernel.tail_coeff;
  const long m = std::lround((kernel.x_I * (1.0 + opts.margin_frac)) / kernel.step);
  const std::size_t count = static_cast<std::size_t>(m) + 1;
  sol.x_grid.resize(count);
  sol.diag.assign(count, 0.0);
  sol.condition_numbers.assign(count, 1.0);
  sol.residuals.assign(count, 0.0);

  std::vector<std::string> errors(count);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      try {
        const MarchenkoRow r = solve_marchenko(kernel, kernel.step * static_cast<double>(i), opts);
        sol.x_grid[i] = r.x;
        sol.diag[i] = r.A.empty() ? 0.0 : r.A.front();
        sol.condition_numbers[i] = r.condition;
        sol.residuals[i] = r.residual;
      } catch (const Error& e) {
        errors[i] = e.what();
      }
    }
  };
  const unsigned workers = std::min<unsigned>(resolve_workers(opts.workers), static_cast<unsigned>(count));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (!e.empty()) throw DegenerateDataError(e);

  sol.V_recovered = minus_twice_derivative(sol.diag, kernel.step);
  for (std::size_t i = 0; i < count; ++i) {
    sol.max_condition = std::max(sol.max_condition, sol.condition_numbers[i]);
    if (sol.x_grid[i] > kernel.x_I * (1.0 + 1e-12) + kernel.step)
      sol.support_residual = std::max(sol.support_residual, std::abs(sol.V_recovered[i]));
  }
  return sol;
}

PotentialProfile recover_potential(const MarchenkoSolution& sol) {
  PotentialProfile V;
  V.x_I = sol.x_I;
  const long n = std::lround(sol.x_I / sol.step);
  if (n < 1 || static_cast<std::size_t>(n) >= sol.x_grid.size())
    throw DomainError("recover_potential: solution grid does not cover [0, x_I]");
  for (long i = 0; i <= n; ++i) {
    V.grid.push_back(i == n ? sol.x_I : sol.step * static_cast<double>(i));
    V.values.push_back(sol.V_recovered[i]);
  }
  V.h = sol.diag.front() - 0.5 * sol.tail_coeff;
  return V;
}

}  // namespace loveres
