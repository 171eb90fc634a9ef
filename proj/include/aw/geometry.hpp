#pragma once

#include <vector>

#include "aw/distance.hpp"

namespace aw {

/// Geodesic family built from one optimal bicausal coupling: atoms are the
/// coupled leaf pairs with the plan's masses, values are the convex
/// combinations (1-u)X + uY, and the filtration is the pairwise product of
/// the two tree filtrations.
struct InterpolationFamily {
  double p = 2.0;
  double distance = 0.0;
  BicausalCoupling plan;

  FilteredProcess at(double u) const;
};

/// Requires p > 1 and u in [0,1].
InterpolationFamily make_interpolation(const FilteredProcess& x, const FilteredProcess& y,
                                       double p);
FilteredProcess interpolate(const FilteredProcess& x, const FilteredProcess& y, double p,
                            double u);

struct SpeedReport {
  struct Entry {
    double u = 0.0, v = 0.0;
    double measured = 0.0, expected = 0.0;
  };
  std::vector<Entry> checks;
  std::vector<Entry> violations;

  bool ok() const { return violations.empty(); }
};

/// Verifies AW_p(Z^u, Z^v) = |u-v| AW_p(X,Y) over all sampled pairs, within
/// tol * (1 + AW_p(X,Y)).
SpeedReport check_constant_speed(const InterpolationFamily& family,
                                 const std::vector<double>& samples, double tol = 1e-8);

struct BarycenterProblem {
  std::vector<FilteredProcess> inputs;
  std::vector<double> weights;  // convex
  double p = 2.0;
};

struct BarycenterResult {
  FilteredProcess process;
  double objective = 0.0;
  std::vector<double> trace;  // objective after each iteration, non-increasing
};

/// Fixed-skeleton Fréchet iteration: the candidate keeps init's canonical
/// tree structure and only its node values move. Each step recomputes the
/// optimal couplings to every input and replaces each node value by the
/// barycentric projection of the coupled input values (the weighted mean for
/// p = 2, a per-coordinate golden-section minimizer otherwise). Stops when
/// the objective decrease drops below tol or after max_iters.
BarycenterResult barycenter(const BarycenterProblem& problem, const FilteredProcess& init,
                            int max_iters = 50, double tol = 1e-10);

/// Binomial model with 2^steps atoms: X_1 = s0 and X_{t+1} = X_t * up or
/// X_t * down with probability p_up / 1 - p_up, carrying its generated
/// filtration. The risk-neutral choice p_up = (1-down)/(up-down) makes it a
/// martingale.
FilteredProcess crr_model(int steps, double s0, double up, double down, double p_up);

}  // namespace aw
