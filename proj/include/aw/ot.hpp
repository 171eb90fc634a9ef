#pragma once

#include <functional>
#include <vector>

#include "aw/common.hpp"

namespace aw {

/// Finitely supported probability measure; only the weights are kept here,
/// support points live with the caller.
struct DiscreteMeasure {
  std::vector<double> weights;

  int size() const { return static_cast<int>(weights.size()); }
  /// Throws if weights are negative or do not sum to 1 within 1e-12.
  void check() const;
};

/// Solution of a discrete transportation problem.
struct TransportPlan {
  int rows = 0;
  int cols = 0;
  std::vector<double> mass;  // row-major rows x cols
  double objective = 0.0;

  double at(int i, int j) const { return mass[static_cast<std::size_t>(i) * cols + j]; }
  double& at(int i, int j) { return mass[static_cast<std::size_t>(i) * cols + j]; }
  std::vector<double> row_sums() const;
  std::vector<double> col_sums() const;
};

/// Exact minimizer of sum_ij plan_ij * cost_ij over couplings of mu and nu.
///
/// Transportation simplex with Bland-style pivoting: the entering cell is the
/// lowest-index one with negative reduced cost, the leaving cell the
/// lowest-index minimizer on the cycle. The returned plan is a vertex of the
/// transportation polytope (at most n+m-1 positive entries) and identical
/// across runs. Zero-weight rows/columns are stripped before solving.
///
/// cost is row-major n x m; entries must be finite.
TransportPlan solve_ot(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                       const std::vector<double>& cost);

/// p-Wasserstein distance between two weighted point sets, given a distance
/// callback d(i, j) between support points. Requires p >= 1.
double wasserstein_p(const DiscreteMeasure& a, const DiscreteMeasure& b,
                     const std::function<double(int, int)>& point_dist, double p);

/// Convenience overload for point sets in R^d.
double wasserstein_p(const std::vector<std::pair<double, Vec>>& a,
                     const std::vector<std::pair<double, Vec>>& b, double p);

}  // namespace aw
