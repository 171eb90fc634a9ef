#include "aw/distance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aw {

namespace {

using CostTable = std::vector<double>;  // row-major |X_t| x |Y_t|

DiscreteMeasure child_law(const CanonicalTree& tree, int t, int node) {
  DiscreteMeasure m;
  for (int c : tree.levels[t].at(node).children) m.weights.push_back(tree.levels[t + 1][c].weight);
  return m;
}

// cost tables per level: costs[t][i*|Y_t|+j] = d^p_{Z_{t+1}}(node i, node j).
std::vector<CostTable> level_costs(const CanonicalTree& tx, const CanonicalTree& ty, double p) {
  const int N = tx.horizon;
  std::vector<CostTable> costs(N);
  for (int t = N - 1; t >= 0; --t) {
    const auto& lx = tx.levels[t];
    const auto& ly = ty.levels[t];
    const int m = static_cast<int>(ly.size());
    costs[t].assign(lx.size() * ly.size(), 0.0);
    parallel_for(static_cast<int>(lx.size()), [&](int i) {
      for (int j = 0; j < m; ++j) {
        double c = dist_pow(lx[i].value, ly[j].value, p);
        if (t + 1 < N) {
          const auto& ci = lx[i].children;
          const auto& cj = ly[j].children;
          DiscreteMeasure mu = child_law(tx, t, i), nu = child_law(ty, t, j);
          std::vector<double> sub(ci.size() * cj.size());
          for (std::size_t a = 0; a < ci.size(); ++a)
            for (std::size_t b = 0; b < cj.size(); ++b)
              sub[a * cj.size() + b] =
                  costs[t + 1][static_cast<std::size_t>(ci[a]) * ty.levels[t + 1].size() + cj[b]];
          c += solve_ot(mu, nu, sub).objective;
        }
        costs[t][static_cast<std::size_t>(i) * m + j] = c;
      }
    });
  }
  return costs;
}

}  // namespace

std::vector<std::map<std::pair<int, int>, double>> BicausalCoupling::pair_masses() const {
  const int N = x.horizon;
  std::vector<std::map<std::pair<int, int>, double>> masses(N);
  for (int i = 0; i < root.rows; ++i)
    for (int j = 0; j < root.cols; ++j)
      if (root.at(i, j) > 0.0) masses[0][{i, j}] += root.at(i, j);
  for (int t = 0; t + 1 < N; ++t) {
    for (const auto& [pair, mass] : masses[t]) {
      const auto it = kernels[t].find(pair);
      if (it == kernels[t].end()) continue;
      const auto& ci = x.levels[t][pair.first].children;
      const auto& cj = y.levels[t][pair.second].children;
      for (std::size_t a = 0; a < ci.size(); ++a)
        for (std::size_t b = 0; b < cj.size(); ++b) {
          const double m = mass * it->second.at(static_cast<int>(a), static_cast<int>(b));
          if (m > 0.0) masses[t + 1][{ci[a], cj[b]}] += m;
        }
    }
  }
  return masses;
}

double BicausalCoupling::cost_from_masses() const {
  const auto masses = pair_masses();
  double total = 0.0;
  for (int t = 0; t < x.horizon; ++t)
    for (const auto& [pair, mass] : masses[t])
      total += mass * dist_pow(x.levels[t][pair.first].value, y.levels[t][pair.second].value, p);
  return total;
}

AdaptedDistanceResult adapted_distance_trees(const CanonicalTree& tx, const CanonicalTree& ty,
                                             double p) {
  if (tx.horizon != ty.horizon || tx.dim != ty.dim)
    throw std::invalid_argument("adapted_distance: horizon/dim mismatch");
  if (p < 1.0) throw std::invalid_argument("adapted_distance: requires p >= 1");
  const int N = tx.horizon;
  const auto costs = level_costs(tx, ty, p);

  BicausalCoupling plan;
  plan.p = p;
  plan.x = tx;
  plan.y = ty;
  plan.kernels.resize(N > 0 ? N - 1 : 0);

  DiscreteMeasure mu, nu;
  for (const auto& node : tx.levels[0]) mu.weights.push_back(node.weight);
  for (const auto& node : ty.levels[0]) nu.weights.push_back(node.weight);
  plan.root = solve_ot(mu, nu, costs[0]);
  plan.cost_pow = plan.root.objective;

  // Collect the child plans along the optimal support, top-down.
  std::vector<std::pair<int, int>> frontier;
  for (int i = 0; i < plan.root.rows; ++i)
    for (int j = 0; j < plan.root.cols; ++j)
      if (plan.root.at(i, j) > 0.0) frontier.emplace_back(i, j);
  for (int t = 0; t + 1 < N; ++t) {
    std::vector<std::pair<int, int>> next;
    for (const auto& [i, j] : frontier) {
      const auto& ci = tx.levels[t][i].children;
      const auto& cj = ty.levels[t][j].children;
      std::vector<double> sub(ci.size() * cj.size());
      for (std::size_t a = 0; a < ci.size(); ++a)
        for (std::size_t b = 0; b < cj.size(); ++b)
          sub[a * cj.size() + b] =
              costs[t + 1][static_cast<std::size_t>(ci[a]) * ty.levels[t + 1].size() + cj[b]];
      TransportPlan k = solve_ot(child_law(tx, t, i), child_law(ty, t, j), sub);
      for (int a = 0; a < k.rows; ++a)
        for (int b = 0; b < k.cols; ++b)
          if (k.at(a, b) > 0.0) next.emplace_back(ci[a], cj[b]);
      plan.kernels[t].emplace(std::make_pair(i, j), std::move(k));
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    frontier = std::move(next);
  }

  AdaptedDistanceResult res;
  res.value = std::pow(plan.cost_pow, 1.0 / p);
  res.plan = std::move(plan);
  return res;
}

AdaptedDistanceResult adapted_distance(const FilteredProcess& x, const FilteredProcess& y,
                                       double p) {
  if (x.horizon != y.horizon || x.dim != y.dim)
    throw std::invalid_argument("adapted_distance: horizon/dim mismatch");
  const CanonicalTree tx = CanonicalTree::build(nested_distribution(x));
  const CanonicalTree ty = CanonicalTree::build(nested_distribution(y));
  return adapted_distance_trees(tx, ty, p);
}

bool is_causal(const RawCoupling& pi, const FilteredProcess& x, const FilteredProcess& y,
               CausalDirection dir, double tol) {
  if (pi.rows != x.atom_count() || pi.cols != y.atom_count())
    throw std::invalid_argument("is_causal: coupling dimension mismatch");
  std::vector<double> px(pi.rows, 0.0), py(pi.cols, 0.0);
  for (int i = 0; i < pi.rows; ++i)
    for (int j = 0; j < pi.cols; ++j) {
      if (pi.at(i, j) < -tol) throw std::invalid_argument("is_causal: negative mass");
      px[i] += pi.at(i, j);
      py[j] += pi.at(i, j);
    }
  for (int i = 0; i < pi.rows; ++i)
    if (std::abs(px[i] - x.atom_probs[i]) > 1e-10)
      throw std::invalid_argument("is_causal: row marginal mismatch");
  for (int j = 0; j < pi.cols; ++j)
    if (std::abs(py[j] - y.atom_probs[j]) > 1e-10)
      throw std::invalid_argument("is_causal: column marginal mismatch");

  const auto check_xy = [&](const RawCoupling& c, const FilteredProcess& from,
                            const FilteredProcess& to, bool transposed) {
    // Causal from `from` to `to`: conditioning on the full `from`-atom gives
    // the same prediction of every F_t^to-cell as conditioning on the
    // F_t^from-cell.
    const auto at = [&](int i, int j) { return transposed ? c.at(j, i) : c.at(i, j); };
    const auto& pfrom = transposed ? py : px;
    for (int t = 1; t <= to.horizon; ++t) {
      const auto to_cells = to.cells(t);
      const auto from_cells = from.cells(t);
      for (const auto& B : to_cells) {
        // mass sent into B from each `from`-atom
        std::vector<double> into(from.atom_count(), 0.0);
        for (int i = 0; i < from.atom_count(); ++i)
          for (int j : B) into[i] += at(i, j);
        for (const auto& C : from_cells) {
          double cell_mass = 0.0, cell_into = 0.0;
          for (int i : C) {
            cell_mass += pfrom[i];
            cell_into += into[i];
          }
          if (cell_mass <= 0.0) continue;
          const double rhs = cell_into / cell_mass;
          for (int i : C) {
            if (pfrom[i] <= 0.0) continue;
            if (std::abs(into[i] / pfrom[i] - rhs) > tol) return false;
          }
        }
      }
    }
    return true;
  };

  bool ok = true;
  if (dir == CausalDirection::XtoY || dir == CausalDirection::Both)
    ok = ok && check_xy(pi, x, y, false);
  if (dir == CausalDirection::YtoX || dir == CausalDirection::Both)
    ok = ok && check_xy(pi, y, x, true);
  return ok;
}

FlattenResult flatten(const BicausalCoupling& plan) {
  FlattenResult out;
  out.x = plan.x.to_process();
  out.y = plan.y.to_process();
  out.coupling.rows = plan.x.leaf_count();
  out.coupling.cols = plan.y.leaf_count();
  out.coupling.mass.assign(static_cast<std::size_t>(out.coupling.rows) * out.coupling.cols, 0.0);
  const auto masses = plan.pair_masses();
  for (const auto& [pair, mass] : masses[plan.x.horizon - 1])
    out.coupling.at(pair.first, pair.second) += mass;
  return out;
}

double aw_between_laws(const PathLaw& mu, const PathLaw& nu, double p) {
  return adapted_distance(plain_process(mu), plain_process(nu), p).value;
}

}  // namespace aw
