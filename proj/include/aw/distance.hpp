#pragma once

#include <map>
#include <vector>

#include "aw/nested.hpp"
#include "aw/ot.hpp"

namespace aw {

/// Factorized bicausal transport plan between two canonical trees: a time-1
/// plan between the root laws plus, per matched node pair on the optimal
/// support, a plan coupling the two child laws (entries are conditional
/// probabilities). kernels[t] holds the plans for pairs at level t+1's
/// parents, keyed by (node in x, node in y) at level t.
struct BicausalCoupling {
  double p = 2.0;
  double cost_pow = 0.0;  // optimal value of E[sum_t d^p]
  CanonicalTree x, y;
  TransportPlan root;
  std::vector<std::map<std::pair<int, int>, TransportPlan>> kernels;  // size horizon-1

  /// Node-pair masses per level implied by root and kernels.
  std::vector<std::map<std::pair<int, int>, double>> pair_masses() const;
  /// E[sum_t d^p] of this plan computed from its flattened masses.
  double cost_from_masses() const;
};

struct AdaptedDistanceResult {
  double value = 0.0;
  BicausalCoupling plan;
};

/// Adapted p-Wasserstein distance between two filtered processes, computed by
/// backward dynamic programming over their canonical trees, together with an
/// optimal bicausal coupling in factorized form. Requires equal horizon and
/// dim and p >= 1. Representative choice does not affect the value.
AdaptedDistanceResult adapted_distance(const FilteredProcess& x, const FilteredProcess& y,
                                       double p);

/// Same DP on explicit trees, skipping canonicalization. Intended for callers
/// that maintain their own tree skeleton (barycenter iteration).
AdaptedDistanceResult adapted_distance_trees(const CanonicalTree& tx, const CanonicalTree& ty,
                                             double p);

/// Joint law on the product of two finite sample spaces.
struct RawCoupling {
  int rows = 0;
  int cols = 0;
  std::vector<double> mass;  // row-major

  double at(int i, int j) const { return mass[static_cast<std::size_t>(i) * cols + j]; }
  double& at(int i, int j) { return mass[static_cast<std::size_t>(i) * cols + j]; }
};

enum class CausalDirection { XtoY, YtoX, Both };

/// Exact finite-space causality check: for every t and every indicator of an
/// F_t^Y-cell, the conditional expectation given the full X-atom must equal
/// the one given the atom's F_t^X-cell (within tol). Throws if the marginals
/// of pi do not match the processes.
bool is_causal(const RawCoupling& pi, const FilteredProcess& x, const FilteredProcess& y,
               CausalDirection dir, double tol = 1e-10);

/// A factorized plan flattened to an explicit coupling between the two
/// canonical tree processes (atoms = leaves, in tree order).
struct FlattenResult {
  RawCoupling coupling;
  FilteredProcess x, y;
};

FlattenResult flatten(const BicausalCoupling& plan);

/// Adapted distance between path laws via their plain processes.
double aw_between_laws(const PathLaw& mu, const PathLaw& nu, double p);

}  // namespace aw
