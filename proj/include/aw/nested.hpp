#pragma once

#include <vector>

#include "aw/process.hpp"

namespace aw {

/// Element of the recursive canonical space: current value plus a finite law
/// over next-time elements. Atoms at the terminal time have no children.
/// In canonical form children are deduplicated and sorted by compare().
struct NestedAtom {
  Vec value;
  std::vector<std::pair<double, NestedAtom>> children;

  int horizon() const;  // remaining time steps including this one
};

/// Strict total order on nested atoms: value, then child count, then children
/// (atom before weight), recursively. Used for canonical sorting and hashing-
/// free equality; returns <0, 0, >0.
int compare(const NestedAtom& a, const NestedAtom& b);

/// Sorts and merges children recursively (exact equality).
void canonicalize(NestedAtom& atom);

/// Law of the time-1 information state; canonical form is deduplicated,
/// sorted, and has weights summing to 1.
struct NestedDistribution {
  int horizon = 0;
  int dim = 0;
  std::vector<std::pair<double, NestedAtom>> atoms;
};

void canonicalize(NestedDistribution& nd);
int compare(const NestedDistribution& a, const NestedDistribution& b);

/// Computes the information process of a valid filtered process by backward
/// recursion. Entry [t-1][c] is the (canonical) state shared by all atoms of
/// the F_t-cell c; per-atom lookup goes through proc.filtration.
std::vector<std::vector<NestedAtom>> information_process(const FilteredProcess& proc);

/// Pushforward of the atom probabilities through the time-1 information
/// state, canonicalized. This is the complete invariant of the process: two
/// processes at adapted distance zero have identical nested distributions.
NestedDistribution nested_distribution(const FilteredProcess& proc);

/// Recursive equality. tol = 0 tests exact canonical equality; tol > 0
/// certifies closeness via the nested W_p distance (see distance module) to
/// avoid non-transitive per-level comparisons.
bool nested_equal(const NestedDistribution& a, const NestedDistribution& b, double tol,
                  double p = 1.0);
bool nested_equal(const NestedAtom& a, const NestedAtom& b, double tol, double p = 1.0);

/// Law of the coordinate path obtained by chaining child laws.
PathLaw unfold(const NestedDistribution& nd);

/// Explicit tree representation of a nested distribution. Node indices are
/// dense per level; a node's weight is its conditional probability within its
/// parent (for roots, the unconditional probability).
struct CanonicalTree {
  struct Node {
    Vec value;
    double weight = 0.0;
    int parent = -1;
    std::vector<int> children;  // indices into the next level
  };

  int horizon = 0;
  int dim = 0;
  std::vector<std::vector<Node>> levels;  // levels[t-1]

  static CanonicalTree build(const NestedDistribution& nd);
  NestedDistribution to_nested() const;
  /// Tree process: atoms are the leaves, F_t-cells the level-t nodes.
  FilteredProcess to_process() const;
  /// Absolute mass of each node at a level (product of weights to the root).
  std::vector<double> node_mass(int t) const;
  /// The nested atom a node represents.
  NestedAtom subtree(int t, int node) const;
  int leaf_count() const { return static_cast<int>(levels.back().size()); }
  /// Root-to-leaf node chain of a leaf.
  std::vector<int> leaf_chain(int leaf) const;
};

/// The tree-structured process whose nested distribution is nd (exactly).
FilteredProcess canonical_process(const NestedDistribution& nd);

/// Per atom, per time: the index of the tree node matching the atom's
/// information state. The tree must be built from nested_distribution(proc).
std::vector<std::vector<int>> assign_tree_nodes(const FilteredProcess& proc,
                                                const CanonicalTree& tree);

}  // namespace aw
