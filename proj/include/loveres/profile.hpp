#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include <boost/math/interpolators/quintic_hermite.hpp>

#include "loveres/types.hpp"

namespace loveres {

// Density-normalized shear modulus on a depth grid (x = depth, x >= 0).
// Samples at or beyond x_I must equal mu_tail.
struct ShearProfile {
  std::vector<double> depth_grid;
  std::vector<double> mu;
  double mu_tail = 1.0;
  double x_I = 1.0;
};

// Real potential on a uniform grid over [0, x_I], zero beyond, with the
// Robin coefficient of u'(0) + h u(0) = 0.
struct PotentialProfile {
  std::vector<double> grid;
  std::vector<double> values;
  double x_I = 1.0;
  double h = 0.0;
  std::optional<double> omega;

  double step() const { return grid.size() > 1 ? grid[1] - grid[0] : x_I; }
};

enum class Sheet { physical, unphysical };

struct SheetPoint {
  Complex xi;
  Sheet sheet = Sheet::physical;
};

// Throws DomainError / InvariantError when the profile is unusable.
void validate(const ShearProfile& p);
void validate(const PotentialProfile& V);

// Twice-differentiable interpolant of mu: quintic Hermite on [0, x_I] with
// nodal mu', mu'' from 7-point finite differences, constant beyond.
class ShearInterpolant {
 public:
  explicit ShearInterpolant(const ShearProfile& p);
  double value(double x) const;
  double d1(double x) const;
  double d2(double x) const;
  double x_I() const { return x_I_; }
  double mu_tail() const { return mu_tail_; }

 private:
  using Hermite = boost::math::interpolators::quintic_hermite<std::vector<double>>;
  std::shared_ptr<const Hermite> spline_;
  double x_I_, mu_tail_;
};

// Some sample in the last grid cell below x_I differs from mu_tail by more
// than rel_tol * mu_tail.
bool last_cell_nonconstant(const ShearProfile& p, double rel_tol = 1e-12);

double robin_coefficient(const ShearProfile& p);

// V = (sqrt mu)''/sqrt mu - omega^2/mu + omega^2/mu_I on n_intervals+1 uniform points.
PotentialProfile calibrate(const ShearProfile& p, double omega, int n_intervals = 2048);

// Uniform sampling helper for synthetic potentials.
PotentialProfile make_potential(double x_I, int n_intervals, const std::function<double(double)>& V,
                                double h);

// Trapezoid L1 norm of V over [0, x_I].
double l1_norm(const PotentialProfile& V);
// Trapezoid integral of V.
double integral(const PotentialProfile& V);
// Total variation of the samples, used in place of the L1 norm of V'.
double total_variation(const PotentialProfile& V);
// \int_0^{x_I} e^{2ikt} V(t) dt with V piecewise linear between samples,
// integrated exactly on each cell (reduces to the trapezoid rule at k = 0).
Complex fourier_transform(const PotentialProfile& V, Complex k);
// Potential family membership: nonvanishing in the last cell.
bool last_cell_nonvanishing(const PotentialProfile& V, double abs_tol = 0.0);

// k_omega(xi) = +-i sqrt(xi^2 - omega^2/mu_I), sign fixed by the sheet.
// Real results (xi on a cut) are returned with Re k >= 0.
Complex quasi_momentum(const SheetPoint& p, double omega, double mu_tail);
bool on_cut(const SheetPoint& p, double omega, double mu_tail);
// Inverse map; xi is returned with Re xi >= 0 (the map is even in xi).
// Real k is assigned to the physical sheet.
SheetPoint xi_of_k(Complex k, double omega, double mu_tail);

}  // namespace loveres
