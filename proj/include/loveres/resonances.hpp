#pragma once

#include <vector>

#include "loveres/jost.hpp"
#include "loveres/types.hpp"

namespace loveres {

struct CountOptions {
  double max_spacing = 0.1;     // initial spacing of boundary samples
  double max_phase_step = 0.6;  // adjacent samples further apart in arg f get bisected
  double guard = 1e-9;          // shortest segment, relative to the rectangle diameter
  int max_perturbations = 6;
};

struct CountResult {
  int count = 0;
  Rectangle rect;        // the rectangle actually used (after any perturbation)
  int perturbations = 0;
  long evaluations = 0;
};

// Number of zeros (with multiplicity) inside rect by the argument principle.
int count_zeros(const ComplexFunction& f, const Rectangle& rect, const CountOptions& opts = {});
CountResult count_zeros_detail(const ComplexFunction& f, const Rectangle& rect,
                               const CountOptions& opts = {});

struct Zero {
  Complex k;
  double residual = 0.0;        // |f(k)|
  double derivative_abs = 0.0;  // |f'(k)|
  int multiplicity = 1;
  bool degenerate = false;      // cluster not split (reported with multiplicity)
  bool near_real = false;
  bool near_origin = false;
};

struct ResonanceSet {
  std::vector<Zero> eigenvalues;  // Im k > 0, by decreasing |k|
  std::vector<Zero> resonances;   // Im k <= 0, by (Re k, Im k)
  std::vector<Rectangle> unresolved;
  Rectangle search_region;
  int region_count = 0;           // argument-principle count over search_region
  double tol = 0.0;

  std::vector<Complex> all_zeros() const;  // each zero repeated by multiplicity
  int total_multiplicity() const;
  bool complete() const { return unresolved.empty() && total_multiplicity() == region_count; }
};

struct FinderOptions {
  CountOptions count;
  double box_diameter = 0.5;  // subdivide until a single-zero box is this small
  double min_box = 1e-7;      // smaller multi-zero boxes are reported as clusters
  double origin_margin = 1e-3;
  double axis_tol = 1e-8;     // |Im k| below this is flagged near_real
  int max_newton = 60;
  unsigned workers = 0;       // 0: LOVE_RES_WORKERS or 1
};

ResonanceSet find_zeros(const ComplexFunction& fh, const ComplexFunction& fh_dk, const Rectangle& region,
                        double tol, const FinderOptions& opts = {});

// Worker count: explicit request, else LOVE_RES_WORKERS, else 1.
unsigned resolve_workers(unsigned requested);

// Eigenvalues i t_j, t_1 > t_2 > ... > 0, from sign changes of f_h(it).
std::vector<Complex> eigenvalues(const JostSolver& solver, double h);
std::vector<Complex> eigenvalues(const PotentialProfile& V, double h);
double eigenvalue_search_height(const PotentialProfile& V, double h);

struct LevinsonReport {
  int count_in_disk = 0;   // zeros with |k| <= r
  double ratio = 0.0;      // count * pi / (2 x_I r)
  int outside_sector = 0;  // zeros with |k| <= r farther than delta from the real axis in angle
  double outside_fraction = 0.0;
  int verified_square_count = 0;
};

LevinsonReport levinson_check(const ResonanceSet& set, const ComplexFunction& fh, double r, double x_I,
                              double delta = 0.2, const CountOptions& opts = {});
// Same statistics on a bare list, without the completeness verification.
LevinsonReport levinson_statistics(const std::vector<Complex>& zeros, double r, double x_I, double delta);

struct ForbiddenEntry {
  Complex k, xi;
  double c0_slack_k = 0.0;   // C0 e^{2|Im k| x_I} - |k|
  double c0_slack_xi = 0.0;  // C0 e^{2|Re xi| x_I} - |xi|
  double c1_slack_k = 0.0;   // C1 e^{2|Im k| x_I} - |k|^2   (|k| > 1 only, else +inf)
  double c1_slack_xi = 0.0;
  double asymptotic_dev = 0.0;  // |k + i xi|
};

struct ForbiddenReport {
  std::vector<ForbiddenEntry> entries;
  double C0 = 0.0, C1_k = 0.0, C1_xi = 0.0;
  double min_c0_slack_k = 0.0, min_c0_slack_xi = 0.0;
  int c0_violations = 0, c1_violations = 0;
  // largest |xi| entries: |k + i xi| * |xi| / c^2 should stay O(1)
  std::vector<double> asymptotic_scaled;
  bool asymptotic_ok = true;
};

ForbiddenReport forbidden_domain_xi(const ResonanceSet& set, double omega, double mu_tail,
                                    const PotentialProfile& V, double h);

}  // namespace loveres
