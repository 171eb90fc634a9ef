#include "aw/nested.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "aw/ot.hpp"

namespace aw {

int NestedAtom::horizon() const {
  return children.empty() ? 1 : 1 + children.front().second.horizon();
}

int compare(const NestedAtom& a, const NestedAtom& b) {
  if (int c = compare_vec(a.value, b.value); c != 0) return c;
  if (a.children.size() != b.children.size())
    return a.children.size() < b.children.size() ? -1 : 1;
  for (std::size_t i = 0; i < a.children.size(); ++i) {
    if (int c = compare(a.children[i].second, b.children[i].second); c != 0) return c;
    if (a.children[i].first != b.children[i].first)
      return a.children[i].first < b.children[i].first ? -1 : 1;
  }
  return 0;
}

void canonicalize(NestedAtom& atom) {
  for (auto& [w, child] : atom.children) canonicalize(child);
  std::sort(atom.children.begin(), atom.children.end(),
            [](const auto& a, const auto& b) {
              if (int c = compare(a.second, b.second); c != 0) return c < 0;
              return a.first < b.first;
            });
  std::vector<std::pair<double, NestedAtom>> merged;
  for (auto& [w, child] : atom.children) {
    if (w <= 0.0) continue;
    if (!merged.empty() && compare(merged.back().second, child) == 0)
      merged.back().first += w;
    else
      merged.emplace_back(w, std::move(child));
  }
  atom.children = std::move(merged);
}

void canonicalize(NestedDistribution& nd) {
  NestedAtom holder;  // reuse the child-merging logic at the root level
  holder.children = std::move(nd.atoms);
  for (auto& [w, a] : holder.children) canonicalize(a);
  std::sort(holder.children.begin(), holder.children.end(),
            [](const auto& a, const auto& b) {
              if (int c = compare(a.second, b.second); c != 0) return c < 0;
              return a.first < b.first;
            });
  std::vector<std::pair<double, NestedAtom>> merged;
  for (auto& [w, a] : holder.children) {
    if (w <= 0.0) continue;
    if (!merged.empty() && compare(merged.back().second, a) == 0)
      merged.back().first += w;
    else
      merged.emplace_back(w, std::move(a));
  }
  nd.atoms = std::move(merged);
}

int compare(const NestedDistribution& a, const NestedDistribution& b) {
  if (a.atoms.size() != b.atoms.size()) return a.atoms.size() < b.atoms.size() ? -1 : 1;
  for (std::size_t i = 0; i < a.atoms.size(); ++i) {
    if (int c = compare(a.atoms[i].second, b.atoms[i].second); c != 0) return c;
    if (a.atoms[i].first != b.atoms[i].first)
      return a.atoms[i].first < b.atoms[i].first ? -1 : 1;
  }
  return 0;
}

std::vector<std::vector<NestedAtom>> information_process(const FilteredProcess& proc) {
  const int N = proc.horizon;
  std::vector<std::vector<NestedAtom>> table(N);
  for (int t = N; t >= 1; --t) {
    const auto cells = proc.cells(t);
    table[t - 1].resize(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      NestedAtom& atom = table[t - 1][c];
      atom.value = proc.value(cells[c].front(), t);
      if (t < N) {
        // Conditional law over the F_{t+1}-subcells of this cell.
        const double pc = proc.cell_prob(t, static_cast<int>(c));
        std::vector<int> sub;  // subcell ids in first-occurrence order
        for (int a : cells[c]) {
          const int s = proc.cell_of(t + 1, a);
          if (std::find(sub.begin(), sub.end(), s) == sub.end()) sub.push_back(s);
        }
        for (int s : sub)
          atom.children.emplace_back(proc.cell_prob(t + 1, s) / pc, table[t][s]);
        canonicalize(atom);
      }
    }
  }
  return table;
}

NestedDistribution nested_distribution(const FilteredProcess& proc) {
  if (!is_valid(proc)) throw std::invalid_argument("nested_distribution: invalid process");
  const auto ip = information_process(proc);
  NestedDistribution nd;
  nd.horizon = proc.horizon;
  nd.dim = proc.dim;
  const auto cells = proc.cells(1);
  for (std::size_t c = 0; c < cells.size(); ++c)
    nd.atoms.emplace_back(proc.cell_prob(1, static_cast<int>(c)), ip[0][c]);
  canonicalize(nd);
  return nd;
}

PathLaw unfold(const NestedDistribution& nd) {
  PathLaw law;
  law.horizon = nd.horizon;
  law.dim = nd.dim;
  Path prefix;
  const std::function<void(const NestedAtom&, double)> walk = [&](const NestedAtom& atom,
                                                                  double mass) {
    prefix.push_back(atom.value);
    if (atom.children.empty()) {
      law.support.emplace_back(mass, prefix);
    } else {
      for (const auto& [w, child] : atom.children) walk(child, mass * w);
    }
    prefix.pop_back();
  };
  for (const auto& [w, atom] : nd.atoms) walk(atom, w);
  law.merge_duplicates();
  std::sort(law.support.begin(), law.support.end(),
            [](const auto& a, const auto& b) { return compare_path(a.second, b.second) < 0; });
  return law;
}

CanonicalTree CanonicalTree::build(const NestedDistribution& nd) {
  CanonicalTree tree;
  tree.horizon = nd.horizon;
  tree.dim = nd.dim;
  tree.levels.resize(nd.horizon);
  const std::function<int(const NestedAtom&, double, int, int)> add =
      [&](const NestedAtom& atom, double weight, int t, int parent) {
        Node node;
        node.value = atom.value;
        node.weight = weight;
        node.parent = parent;
        const int idx = static_cast<int>(tree.levels[t].size());
        tree.levels[t].push_back(std::move(node));
        for (const auto& [w, child] : atom.children) {
          const int ci = add(child, w, t + 1, idx);
          tree.levels[t][idx].children.push_back(ci);
        }
        return idx;
      };
  for (const auto& [w, atom] : nd.atoms) add(atom, w, 0, -1);
  return tree;
}

NestedDistribution CanonicalTree::to_nested() const {
  NestedDistribution nd;
  nd.horizon = horizon;
  nd.dim = dim;
  for (std::size_t r = 0; r < levels[0].size(); ++r)
    nd.atoms.emplace_back(levels[0][r].weight, subtree(1, static_cast<int>(r)));
  return nd;
}

NestedAtom CanonicalTree::subtree(int t, int node) const {
  NestedAtom atom;
  atom.value = levels[t - 1][node].value;
  for (int c : levels[t - 1][node].children)
    atom.children.emplace_back(levels[t][c].weight, subtree(t + 1, c));
  return atom;
}

std::vector<double> CanonicalTree::node_mass(int t) const {
  std::vector<double> mass;
  if (t == 1) {
    for (const Node& n : levels[0]) mass.push_back(n.weight);
    return mass;
  }
  const std::vector<double> up = node_mass(t - 1);
  for (const Node& n : levels[t - 1]) mass.push_back(up[n.parent] * n.weight);
  return mass;
}

std::vector<int> CanonicalTree::leaf_chain(int leaf) const {
  std::vector<int> chain(horizon);
  int node = leaf;
  for (int t = horizon; t >= 1; --t) {
    chain[t - 1] = node;
    node = levels[t - 1][node].parent;
  }
  return chain;
}

FilteredProcess CanonicalTree::to_process() const {
  FilteredProcess proc;
  proc.horizon = horizon;
  proc.dim = dim;
  proc.filtration.assign(horizon, {});
  const std::vector<double> mass = node_mass(horizon);
  for (int leaf = 0; leaf < leaf_count(); ++leaf) {
    const std::vector<int> chain = leaf_chain(leaf);
    proc.atom_probs.push_back(mass[leaf]);
    Path path;
    for (int t = 1; t <= horizon; ++t) path.push_back(levels[t - 1][chain[t - 1]].value);
    proc.paths.push_back(std::move(path));
    for (int t = 1; t <= horizon; ++t) proc.filtration[t - 1].push_back(chain[t - 1]);
  }
  ValidationReport r = validate(proc);
  if (!r.ok()) throw std::logic_error("canonical tree produced invalid process: " + r.to_string());
  return proc;
}

FilteredProcess canonical_process(const NestedDistribution& nd) {
  return CanonicalTree::build(nd).to_process();
}

namespace {

// d^p on Z_t, evaluated by recursion: value term plus W_p^p of the child laws.
double z_cost_pow(const NestedAtom& a, const NestedAtom& b, double p) {
  double c = dist_pow(a.value, b.value, p);
  if (a.children.empty() && b.children.empty()) return c;
  if (a.children.empty() || b.children.empty())
    throw std::invalid_argument("nested_equal: horizon mismatch");
  DiscreteMeasure mu, nu;
  for (const auto& [w, atom] : a.children) mu.weights.push_back(w);
  for (const auto& [w, atom] : b.children) nu.weights.push_back(w);
  std::vector<double> cost;
  cost.reserve(a.children.size() * b.children.size());
  for (const auto& [wa, ca] : a.children)
    for (const auto& [wb, cb] : b.children) cost.push_back(z_cost_pow(ca, cb, p));
  return c + solve_ot(mu, nu, cost).objective;
}

}  // namespace

bool nested_equal(const NestedAtom& a, const NestedAtom& b, double tol, double p) {
  if (a.horizon() != b.horizon()) throw std::invalid_argument("nested_equal: horizon mismatch");
  if (tol <= 0.0) {
    NestedAtom ca = a, cb = b;
    canonicalize(ca);
    canonicalize(cb);
    return compare(ca, cb) == 0;
  }
  return std::pow(z_cost_pow(a, b, p), 1.0 / p) <= tol;
}

bool nested_equal(const NestedDistribution& a, const NestedDistribution& b, double tol, double p) {
  if (a.horizon != b.horizon) throw std::invalid_argument("nested_equal: horizon mismatch");
  if (tol <= 0.0) {
    NestedDistribution ca = a, cb = b;
    canonicalize(ca);
    canonicalize(cb);
    return compare(ca, cb) == 0;
  }
  DiscreteMeasure mu, nu;
  for (const auto& [w, atom] : a.atoms) mu.weights.push_back(w);
  for (const auto& [w, atom] : b.atoms) nu.weights.push_back(w);
  std::vector<double> cost;
  cost.reserve(a.atoms.size() * b.atoms.size());
  for (const auto& [wa, aa] : a.atoms)
    for (const auto& [wb, ab] : b.atoms) cost.push_back(z_cost_pow(aa, ab, p));
  return std::pow(solve_ot(mu, nu, cost).objective, 1.0 / p) <= tol;
}

std::vector<std::vector<int>> assign_tree_nodes(const FilteredProcess& proc,
                                                const CanonicalTree& tree) {
  if (proc.horizon != tree.horizon || proc.dim != tree.dim)
    throw std::invalid_argument("assign_tree_nodes: horizon/dim mismatch");
  const auto ip = information_process(proc);
  std::vector<std::vector<int>> assign(proc.atom_count(), std::vector<int>(proc.horizon, -1));
  for (int a = 0; a < proc.atom_count(); ++a) {
    int node = -1;
    for (int t = 1; t <= proc.horizon; ++t) {
      const NestedAtom& state = ip[t - 1][proc.cell_of(t, a)];
      int found = -1;
      if (t == 1) {
        for (std::size_t r = 0; r < tree.levels[0].size(); ++r)
          if (compare(tree.subtree(1, static_cast<int>(r)), state) == 0) {
            found = static_cast<int>(r);
            break;
          }
      } else {
        for (int c : tree.levels[t - 2][node].children)
          if (compare(tree.subtree(t, c), state) == 0) {
            found = c;
            break;
          }
      }
      if (found < 0)
        throw std::invalid_argument("assign_tree_nodes: tree does not represent the process");
      assign[a][t - 1] = node = found;
    }
  }
  return assign;
}

}  // namespace aw
