#include "aw/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace aw {

namespace {

const Vec& nearest(const std::vector<Vec>& points, const Vec& x) {
  if (points.empty()) throw std::invalid_argument("quantize: empty grid level");
  int best = 0;
  double best_d = dist(points[0], x);
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double d = dist(points[i], x);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(i);
    }
  }
  return points[best];
}

void check_grid(const FilteredProcess& proc, const QuantizationGrid& grid) {
  if (static_cast<int>(grid.levels.size()) != proc.horizon)
    throw std::invalid_argument("quantize: grid must have one level per time step");
  for (const auto& level : grid.levels) {
    if (level.empty()) throw std::invalid_argument("quantize: empty grid level");
    for (const Vec& pt : level)
      if (static_cast<int>(pt.size()) != proc.dim)
        throw std::invalid_argument("quantize: grid point dimension mismatch");
  }
}

}  // namespace

FilteredProcess quantize(const FilteredProcess& proc, const QuantizationGrid& grid) {
  check_grid(proc, grid);
  CanonicalTree tree = CanonicalTree::build(nested_distribution(proc));
  for (int t = 0; t < tree.horizon; ++t)
    for (auto& node : tree.levels[t]) node.value = nearest(grid.levels[t], node.value);
  NestedDistribution nd = tree.to_nested();
  canonicalize(nd);  // merge children that collapsed onto the same point
  return canonical_process(nd);
}

double quantize_diagonal_bound(const FilteredProcess& proc, const QuantizationGrid& grid,
                               double p) {
  check_grid(proc, grid);
  if (p < 1.0) throw std::invalid_argument("quantize_diagonal_bound: requires p >= 1");
  double cost = 0.0;
  for (int a = 0; a < proc.atom_count(); ++a)
    for (int t = 1; t <= proc.horizon; ++t)
      cost += proc.atom_probs[a] *
              dist_pow(proc.value(a, t), nearest(grid.levels[t - 1], proc.value(a, t)), p);
  return std::pow(cost, 1.0 / p);
}

QuantizationGrid covering_grid(const FilteredProcess& proc, double radius) {
  if (radius < 0.0) throw std::invalid_argument("covering_grid: negative radius");
  QuantizationGrid grid;
  grid.levels.resize(proc.horizon);
  for (int t = 1; t <= proc.horizon; ++t) {
    auto& level = grid.levels[t - 1];
    for (int a = 0; a < proc.atom_count(); ++a) {
      const Vec& x = proc.value(a, t);
      bool covered = false;
      for (const Vec& c : level)
        if (dist(c, x) <= radius) {
          covered = true;
          break;
        }
      if (!covered) level.push_back(x);
    }
  }
  return grid;
}

FilteredProcess adapted_empirical(const std::vector<std::pair<double, Path>>& samples,
                                  const QuantizationGrid& grid) {
  if (samples.empty()) throw std::invalid_argument("adapted_empirical: no samples");
  PathLaw law;
  law.horizon = static_cast<int>(samples.front().second.size());
  law.dim = static_cast<int>(samples.front().second.front().size());
  double total = 0.0;
  for (const auto& [w, path] : samples) total += w;
  for (const auto& [w, path] : samples) law.support.emplace_back(w / total, path);
  law.merge_duplicates();
  return quantize(plain_process(law), grid);
}

BlockPartition singleton_blocks(const BicausalCoupling& plan) {
  // Distinct atoms get distinct blocks; equal atoms across the two sides
  // share one (they are the same element of the canonical space).
  BlockPartition bp;
  const int N = plan.x.horizon;
  bp.x_blocks.resize(N);
  bp.y_blocks.resize(N);
  for (int t = 0; t < N; ++t) {
    std::vector<NestedAtom> reps;
    const auto label = [&](const CanonicalTree& tree, int node) {
      const NestedAtom atom = tree.subtree(t + 1, node);
      for (std::size_t r = 0; r < reps.size(); ++r)
        if (compare(reps[r], atom) == 0) return static_cast<int>(r);
      reps.push_back(atom);
      return static_cast<int>(reps.size()) - 1;
    };
    for (std::size_t i = 0; i < plan.x.levels[t].size(); ++i)
      bp.x_blocks[t].push_back(label(plan.x, static_cast<int>(i)));
    for (std::size_t j = 0; j < plan.y.levels[t].size(); ++j)
      bp.y_blocks[t].push_back(label(plan.y, static_cast<int>(j)));
  }
  return bp;
}

BlockPartition level_blocks(const BicausalCoupling& plan) {
  BlockPartition bp;
  const int N = plan.x.horizon;
  bp.x_blocks.resize(N);
  bp.y_blocks.resize(N);
  for (int t = 0; t < N; ++t) {
    bp.x_blocks[t].assign(plan.x.levels[t].size(), 0);
    bp.y_blocks[t].assign(plan.y.levels[t].size(), 0);
  }
  return bp;
}

namespace {

// d_{Z_t}(a, b) by recursion; used only to build diameter blocks.
double nested_atom_dist(const NestedAtom& a, const NestedAtom& b, double p) {
  double c = dist_pow(a.value, b.value, p);
  if (!a.children.empty() || !b.children.empty()) {
    DiscreteMeasure mu, nu;
    for (const auto& [w, atom] : a.children) mu.weights.push_back(w);
    for (const auto& [w, atom] : b.children) nu.weights.push_back(w);
    std::vector<double> cost;
    for (const auto& [wa, ca] : a.children)
      for (const auto& [wb, cb] : b.children)
        cost.push_back(std::pow(nested_atom_dist(ca, cb, p), p));
    c += solve_ot(mu, nu, cost).objective;
  }
  return std::pow(c, 1.0 / p);
}

}  // namespace

BlockPartition diameter_blocks(const BicausalCoupling& plan, double eps) {
  BlockPartition bp;
  const int N = plan.x.horizon;
  bp.x_blocks.resize(N);
  bp.y_blocks.resize(N);
  for (int t = 0; t < N; ++t) {
    std::vector<NestedAtom> members;  // one entry per assigned node
    std::vector<int> member_block;
    std::vector<std::vector<NestedAtom>> blocks;
    const auto label = [&](const CanonicalTree& tree, int node) {
      const NestedAtom atom = tree.subtree(t + 1, node);
      for (std::size_t b = 0; b < blocks.size(); ++b) {
        bool fits = true;
        for (const NestedAtom& other : blocks[b])
          if (nested_atom_dist(atom, other, plan.p) > eps) {
            fits = false;
            break;
          }
        if (fits) {
          blocks[b].push_back(atom);
          return static_cast<int>(b);
        }
      }
      blocks.push_back({atom});
      return static_cast<int>(blocks.size()) - 1;
    };
    for (std::size_t i = 0; i < plan.x.levels[t].size(); ++i)
      bp.x_blocks[t].push_back(label(plan.x, static_cast<int>(i)));
    for (std::size_t j = 0; j < plan.y.levels[t].size(); ++j)
      bp.y_blocks[t].push_back(label(plan.y, static_cast<int>(j)));
  }
  return bp;
}

BicausalCoupling block_approximate(const BicausalCoupling& plan, const BlockPartition& blocks) {
  const int N = plan.x.horizon;
  if (static_cast<int>(blocks.x_blocks.size()) != N ||
      static_cast<int>(blocks.y_blocks.size()) != N)
    throw std::invalid_argument("block_approximate: partition level count mismatch");
  for (int t = 0; t < N; ++t)
    if (blocks.x_blocks[t].size() != plan.x.levels[t].size() ||
        blocks.y_blocks[t].size() != plan.y.levels[t].size())
      throw std::invalid_argument("block_approximate: partition size mismatch");

  BicausalCoupling out;
  out.p = plan.p;
  out.x = plan.x;
  out.y = plan.y;
  out.kernels.resize(N > 0 ? N - 1 : 0);

  // Root level: blocked weights spread within blocks by the conditional laws.
  std::map<std::pair<int, int>, double> w1;
  std::map<int, double> mass_a, mass_b;
  for (std::size_t i = 0; i < plan.x.levels[0].size(); ++i)
    mass_a[blocks.x_blocks[0][i]] += plan.x.levels[0][i].weight;
  for (std::size_t j = 0; j < plan.y.levels[0].size(); ++j)
    mass_b[blocks.y_blocks[0][j]] += plan.y.levels[0][j].weight;
  for (int i = 0; i < plan.root.rows; ++i)
    for (int j = 0; j < plan.root.cols; ++j)
      if (plan.root.at(i, j) > 0.0)
        w1[{blocks.x_blocks[0][i], blocks.y_blocks[0][j]}] += plan.root.at(i, j);

  out.root.rows = plan.root.rows;
  out.root.cols = plan.root.cols;
  out.root.mass.assign(plan.root.mass.size(), 0.0);
  for (int i = 0; i < out.root.rows; ++i) {
    for (int j = 0; j < out.root.cols; ++j) {
      const auto it = w1.find({blocks.x_blocks[0][i], blocks.y_blocks[0][j]});
      if (it == w1.end()) continue;
      out.root.at(i, j) = it->second * plan.x.levels[0][i].weight /
                          mass_a[blocks.x_blocks[0][i]] * plan.y.levels[0][j].weight /
                          mass_b[blocks.y_blocks[0][j]];
    }
  }

  // Descend the support of the blocked plan; block weights for a matched
  // history come from the original kernel, for an unmatched one from the
  // independent kernel.
  std::vector<std::pair<int, int>> frontier;
  for (int i = 0; i < out.root.rows; ++i)
    for (int j = 0; j < out.root.cols; ++j)
      if (out.root.at(i, j) > 0.0) frontier.emplace_back(i, j);

  for (int t = 0; t + 1 < N; ++t) {
    std::vector<std::pair<int, int>> next;
    for (const auto& [i, j] : frontier) {
      const auto& ci = plan.x.levels[t][i].children;
      const auto& cj = plan.y.levels[t][j].children;
      std::map<std::pair<int, int>, double> w;
      const auto orig = plan.kernels[t].find({i, j});
      if (orig != plan.kernels[t].end()) {
        for (std::size_t a = 0; a < ci.size(); ++a)
          for (std::size_t b = 0; b < cj.size(); ++b) {
            const double m = orig->second.at(static_cast<int>(a), static_cast<int>(b));
            if (m > 0.0)
              w[{blocks.x_blocks[t + 1][ci[a]], blocks.y_blocks[t + 1][cj[b]]}] += m;
          }
      } else {
        for (std::size_t a = 0; a < ci.size(); ++a)
          for (std::size_t b = 0; b < cj.size(); ++b)
            w[{blocks.x_blocks[t + 1][ci[a]], blocks.y_blocks[t + 1][cj[b]]}] +=
                plan.x.levels[t + 1][ci[a]].weight * plan.y.levels[t + 1][cj[b]].weight;
      }
      std::map<int, double> ma, mb;
      for (int c : ci) ma[blocks.x_blocks[t + 1][c]] += plan.x.levels[t + 1][c].weight;
      for (int c : cj) mb[blocks.y_blocks[t + 1][c]] += plan.y.levels[t + 1][c].weight;
      // Marginal identities of the block weights against the two child laws.
      for (const auto& [key, weight] : w) {
        if (ma.find(key.first) == ma.end() || mb.find(key.second) == mb.end())
          throw std::invalid_argument("block_approximate: marginal identity violation");
      }

      TransportPlan kt;
      kt.rows = static_cast<int>(ci.size());
      kt.cols = static_cast<int>(cj.size());
      kt.mass.assign(ci.size() * cj.size(), 0.0);
      for (std::size_t a = 0; a < ci.size(); ++a) {
        for (std::size_t b = 0; b < cj.size(); ++b) {
          const auto it = w.find({blocks.x_blocks[t + 1][ci[a]], blocks.y_blocks[t + 1][cj[b]]});
          if (it == w.end()) continue;
          const double m = it->second * plan.x.levels[t + 1][ci[a]].weight /
                           ma[blocks.x_blocks[t + 1][ci[a]]] *
                           plan.y.levels[t + 1][cj[b]].weight / mb[blocks.y_blocks[t + 1][cj[b]]];
          kt.at(static_cast<int>(a), static_cast<int>(b)) = m;
          if (m > 0.0) next.emplace_back(ci[a], cj[b]);
        }
      }
      out.kernels[t].emplace(std::make_pair(i, j), std::move(kt));
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    frontier = std::move(next);
  }
  out.cost_pow = out.cost_from_masses();
  return out;
}

RawCoupling pullback_coupling(const BicausalCoupling& plan, const FilteredProcess& x,
                              const FilteredProcess& y) {
  const auto chains_x = assign_tree_nodes(x, plan.x);
  const auto chains_y = assign_tree_nodes(y, plan.y);
  const int N = plan.x.horizon;

  RawCoupling out;
  out.rows = x.atom_count();
  out.cols = y.atom_count();
  out.mass.assign(static_cast<std::size_t>(out.rows) * out.cols, 0.0);
  for (int a = 0; a < out.rows; ++a) {
    for (int b = 0; b < out.cols; ++b) {
      // Product of the plan's conditional transitions along the chain pair,
      // relative to the product of the two marginal transitions.
      double density = 1.0;
      const int r1 = chains_x[a][0], r2 = chains_y[b][0];
      const double root_mass = plan.root.at(r1, r2);
      if (root_mass <= 0.0) continue;
      density *= root_mass / (plan.x.levels[0][r1].weight * plan.y.levels[0][r2].weight);
      bool dropped = false;
      for (int t = 0; t + 1 < N && !dropped; ++t) {
        const auto key = std::make_pair(chains_x[a][t], chains_y[b][t]);
        const auto it = plan.kernels[t].find(key);
        if (it == plan.kernels[t].end()) {
          dropped = true;
          break;
        }
        const auto& ci = plan.x.levels[t][key.first].children;
        const auto& cj = plan.y.levels[t][key.second].children;
        const int ai = static_cast<int>(std::find(ci.begin(), ci.end(), chains_x[a][t + 1]) -
                                        ci.begin());
        const int bj = static_cast<int>(std::find(cj.begin(), cj.end(), chains_y[b][t + 1]) -
                                        cj.begin());
        const double m = it->second.at(ai, bj);
        if (m <= 0.0) {
          dropped = true;
          break;
        }
        density *= m / (plan.x.levels[t + 1][chains_x[a][t + 1]].weight *
                        plan.y.levels[t + 1][chains_y[b][t + 1]].weight);
      }
      if (!dropped) out.at(a, b) = x.atom_probs[a] * y.atom_probs[b] * density;
    }
  }
  return out;
}

}  // namespace aw
