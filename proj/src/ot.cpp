#include "aw/ot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace aw {

void DiscreteMeasure::check() const {
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("DiscreteMeasure: negative weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("DiscreteMeasure: weights sum to " + std::to_string(sum));
}

std::vector<double> TransportPlan::row_sums() const {
  std::vector<double> r(rows, 0.0);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) r[i] += at(i, j);
  return r;
}

std::vector<double> TransportPlan::col_sums() const {
  std::vector<double> c(cols, 0.0);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) c[j] += at(i, j);
  return c;
}

namespace {

// Transportation simplex on strictly positive marginals.
class TransportSimplex {
 public:
  TransportSimplex(const std::vector<double>& supply, const std::vector<double>& demand,
                   const std::vector<double>& cost)
      : n_(static_cast<int>(supply.size())),
        m_(static_cast<int>(demand.size())),
        cost_(cost),
        flow_(static_cast<std::size_t>(n_) * m_, 0.0),
        basic_(static_cast<std::size_t>(n_) * m_, false) {
    double scale = 1.0;
    for (double c : cost_) {
      if (!std::isfinite(c)) throw std::invalid_argument("solve_ot: non-finite cost entry");
      scale = std::max(scale, std::abs(c));
    }
    tol_ = 1e-11 * scale;
    northwest_corner(supply, demand);
  }

  void run() {
    // Bland's rule on entering and leaving variables guarantees termination.
    const long long max_iters = 50LL * n_ * m_ * (n_ + m_) + 10000;
    for (long long iter = 0; iter < max_iters; ++iter) {
      compute_duals();
      int enter = -1;
      for (int idx = 0; idx < n_ * m_; ++idx) {
        if (basic_[idx]) continue;
        const int i = idx / m_, j = idx % m_;
        if (cost_[idx] - u_[i] - v_[j] < -tol_) {
          enter = idx;
          break;
        }
      }
      if (enter < 0) return;
      pivot(enter);
    }
    throw std::runtime_error("solve_ot: pivot limit exceeded");
  }

  const std::vector<double>& flow() const { return flow_; }

 private:
  void northwest_corner(std::vector<double> supply, std::vector<double> demand) {
    int i = 0, j = 0;
    while (i < n_ && j < m_) {
      const double q = std::min(supply[i], demand[j]);
      flow_[static_cast<std::size_t>(i) * m_ + j] = q;
      basic_[static_cast<std::size_t>(i) * m_ + j] = true;
      supply[i] -= q;
      demand[j] -= q;
      if (i == n_ - 1 && j == m_ - 1) break;
      // Advance exactly one index so the basis stays a spanning tree
      // (degenerate zero cells are kept basic).
      if (supply[i] <= demand[j] && i < n_ - 1)
        ++i;
      else
        ++j;
    }
  }

  void compute_duals() {
    // Nodes 0..n-1 are rows, n..n+m-1 columns; basis edges span them.
    u_.assign(n_, 0.0);
    v_.assign(m_, 0.0);
    std::vector<char> seen(n_ + m_, 0);
    std::vector<int> stack = {0};
    seen[0] = 1;
    while (!stack.empty()) {
      const int node = stack.back();
      stack.pop_back();
      if (node < n_) {
        const int i = node;
        for (int j = 0; j < m_; ++j) {
          if (basic_[static_cast<std::size_t>(i) * m_ + j] && !seen[n_ + j]) {
            v_[j] = cost_[static_cast<std::size_t>(i) * m_ + j] - u_[i];
            seen[n_ + j] = 1;
            stack.push_back(n_ + j);
          }
        }
      } else {
        const int j = node - n_;
        for (int i = 0; i < n_; ++i) {
          if (basic_[static_cast<std::size_t>(i) * m_ + j] && !seen[i]) {
            u_[i] = cost_[static_cast<std::size_t>(i) * m_ + j] - v_[j];
            seen[i] = 1;
            stack.push_back(i);
          }
        }
      }
    }
  }

  // Finds the unique basis path from row(enter) to col(enter), then shifts
  // mass around the resulting cycle.
  void pivot(int enter) {
    const int ei = enter / m_, ej = enter % m_;
    std::vector<int> parent(n_ + m_, -2);
    std::vector<int> via(n_ + m_, -1);  // basis cell used to reach the node
    std::vector<int> queue = {ei};
    parent[ei] = -1;
    for (std::size_t q = 0; q < queue.size(); ++q) {
      const int node = queue[q];
      if (node == n_ + ej) break;
      if (node < n_) {
        const int i = node;
        for (int j = 0; j < m_; ++j) {
          const int idx = i * m_ + j;
          if (basic_[idx] && parent[n_ + j] == -2) {
            parent[n_ + j] = node;
            via[n_ + j] = idx;
            queue.push_back(n_ + j);
          }
        }
      } else {
        const int j = node - n_;
        for (int i = 0; i < n_; ++i) {
          const int idx = i * m_ + j;
          if (basic_[idx] && parent[i] == -2) {
            parent[i] = node;
            via[i] = idx;
            queue.push_back(i);
          }
        }
      }
    }
    if (parent[n_ + ej] == -2) throw std::runtime_error("solve_ot: basis not spanning");

    // Cells along the cycle; even positions gain mass, odd positions lose it.
    std::vector<int> cycle = {enter};
    for (int node = n_ + ej; node != ei; node = parent[node]) cycle.push_back(via[node]);

    double theta = std::numeric_limits<double>::infinity();
    int leave = -1;
    for (std::size_t k = 1; k < cycle.size(); k += 2) {
      const double f = flow_[cycle[k]];
      if (leave < 0 || f < theta || (f == theta && cycle[k] < leave)) {
        theta = f;
        leave = cycle[k];
      }
    }
    for (std::size_t k = 0; k < cycle.size(); ++k) {
      if (k % 2 == 0)
        flow_[cycle[k]] += theta;
      else
        flow_[cycle[k]] -= theta;
    }
    basic_[enter] = true;
    basic_[leave] = false;
    flow_[leave] = 0.0;
  }

  int n_, m_;
  std::vector<double> cost_;
  std::vector<double> flow_;
  std::vector<char> basic_;
  std::vector<double> u_, v_;
  double tol_ = 0.0;
};

}  // namespace

TransportPlan solve_ot(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                       const std::vector<double>& cost) {
  const int n = mu.size(), m = nu.size();
  if (n == 0 || m == 0) throw std::invalid_argument("solve_ot: empty measure");
  if (static_cast<int>(cost.size()) != n * m)
    throw std::invalid_argument("solve_ot: cost matrix dimension mismatch");
  mu.check();
  nu.check();

  // Strip zero-weight support points.
  std::vector<int> ri, cj;
  for (int i = 0; i < n; ++i)
    if (mu.weights[i] > 0.0) ri.push_back(i);
  for (int j = 0; j < m; ++j)
    if (nu.weights[j] > 0.0) cj.push_back(j);
  const int rn = static_cast<int>(ri.size()), rm = static_cast<int>(cj.size());

  std::vector<double> supply(rn), demand(rm), c(static_cast<std::size_t>(rn) * rm);
  for (int a = 0; a < rn; ++a) supply[a] = mu.weights[ri[a]];
  for (int b = 0; b < rm; ++b) demand[b] = nu.weights[cj[b]];
  for (int a = 0; a < rn; ++a)
    for (int b = 0; b < rm; ++b) c[static_cast<std::size_t>(a) * rm + b] = cost[static_cast<std::size_t>(ri[a]) * m + cj[b]];

  TransportSimplex simplex(supply, demand, c);
  simplex.run();

  TransportPlan plan;
  plan.rows = n;
  plan.cols = m;
  plan.mass.assign(static_cast<std::size_t>(n) * m, 0.0);
  double obj = 0.0;
  for (int a = 0; a < rn; ++a) {
    for (int b = 0; b < rm; ++b) {
      const double f = simplex.flow()[static_cast<std::size_t>(a) * rm + b];
      if (f != 0.0) {
        plan.at(ri[a], cj[b]) = f;
        obj += f * c[static_cast<std::size_t>(a) * rm + b];
      }
    }
  }
  plan.objective = obj;
  return plan;
}

double wasserstein_p(const DiscreteMeasure& a, const DiscreteMeasure& b,
                     const std::function<double(int, int)>& point_dist, double p) {
  if (p < 1.0) throw std::invalid_argument("wasserstein_p: requires p >= 1");
  std::vector<double> cost(static_cast<std::size_t>(a.size()) * b.size());
  for (int i = 0; i < a.size(); ++i)
    for (int j = 0; j < b.size(); ++j)
      cost[static_cast<std::size_t>(i) * b.size() + j] = std::pow(point_dist(i, j), p);
  const TransportPlan plan = solve_ot(a, b, cost);
  return std::pow(plan.objective, 1.0 / p);
}

double wasserstein_p(const std::vector<std::pair<double, Vec>>& a,
                     const std::vector<std::pair<double, Vec>>& b, double p) {
  DiscreteMeasure mu, nu;
  for (const auto& [w, x] : a) mu.weights.push_back(w);
  for (const auto& [w, x] : b) nu.weights.push_back(w);
  return wasserstein_p(mu, nu, [&](int i, int j) { return dist(a[i].second, b[j].second); }, p);
}

}  // namespace aw
