#pragma once

#include <string>
#include <vector>

#include "aw/common.hpp"

namespace aw {

/// A finite filtered stochastic process: probability weights on a finite
/// sample space, an adapted R^d-valued path per atom, and a filtration given
/// as refining partitions (one dense cell id per atom and time).
///
/// The time index runs 1..horizon; filtration[t-1] is the partition at time
/// t. F_0 is the trivial partition by convention and is not stored.
struct FilteredProcess {
  int horizon = 0;
  int dim = 0;
  std::vector<double> atom_probs;
  std::vector<Path> paths;                   // paths[atom][t-1] in R^dim
  std::vector<std::vector<int>> filtration;  // filtration[t-1][atom]

  int atom_count() const { return static_cast<int>(atom_probs.size()); }
  int cell_of(int t, int atom) const { return filtration[t - 1][atom]; }
  int cell_count(int t) const;
  /// Atoms grouped by their F_t-cell, cells in increasing id order.
  std::vector<std::vector<int>> cells(int t) const;
  double cell_prob(int t, int cell) const;
  const Vec& value(int atom, int t) const { return paths[atom][t - 1]; }
};

struct ValidationReport {
  std::vector<std::string> violations;
  int pruned_atoms = 0;

  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

/// Checks the structural invariants, pruning zero-probability atoms first
/// (the pruning is recorded in the report, not treated as a violation).
/// Cell ids are re-densified. A valid process yields an empty report.
ValidationReport validate(FilteredProcess& proc);

/// Non-mutating variant; true iff a copy validates with no violations.
bool is_valid(const FilteredProcess& proc);

/// Weighted list of paths; duplicates merged, weights sum to 1.
struct PathLaw {
  int horizon = 0;
  int dim = 0;
  std::vector<std::pair<double, Path>> support;

  void merge_duplicates();
};

PathLaw path_law(const FilteredProcess& proc);

/// The process carrying exactly its own generated filtration: two atoms share
/// an F_t-cell iff their paths agree on times 1..t exactly.
FilteredProcess plain_process(const PathLaw& law);

/// Full-information embedding: every F_t separates all distinct paths.
FilteredProcess full_info_process(const PathLaw& law);

/// Extends two processes on a common finite space (equal probabilities and
/// paths) by an independent fair coin V revealed at time 1 or never.
/// The result has horizon+1 steps, path (0, X), and for t >= 2 the filtration
/// pastes x's cells on {V=0} and y's cells on {V=1}; at t = 1 the filtration
/// is sigma(V) when reveal_coin_at_1 is set and trivial otherwise.
FilteredProcess independent_coin_extension(const FilteredProcess& x, const FilteredProcess& y,
                                           bool reveal_coin_at_1);

}  // namespace aw
