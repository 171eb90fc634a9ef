#include "aw/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace aw {

FilteredProcess InterpolationFamily::at(double u) const {
  if (u < 0.0 || u > 1.0) throw std::invalid_argument("interpolation: u outside [0,1]");
  const int N = plan.x.horizon;
  const auto masses = plan.pair_masses();

  FilteredProcess out;
  out.horizon = N;
  out.dim = plan.x.dim;
  out.filtration.assign(N, {});
  // One atom per coupled leaf pair; cells are coupled node pairs per level.
  std::vector<std::map<std::pair<int, int>, int>> cell_ids(N);
  for (const auto& [pair, mass] : masses[N - 1]) {
    const auto cx = plan.x.leaf_chain(pair.first);
    const auto cy = plan.y.leaf_chain(pair.second);
    out.atom_probs.push_back(mass);
    Path path(N);
    for (int t = 0; t < N; ++t) {
      const Vec& a = plan.x.levels[t][cx[t]].value;
      const Vec& b = plan.y.levels[t][cy[t]].value;
      Vec v(out.dim);
      for (int i = 0; i < out.dim; ++i) v[i] = (1.0 - u) * a[i] + u * b[i];
      path[t] = std::move(v);
    }
    out.paths.push_back(std::move(path));
    for (int t = 0; t < N; ++t) {
      const auto key = std::make_pair(cx[t], cy[t]);
      auto [it, inserted] = cell_ids[t].emplace(key, static_cast<int>(cell_ids[t].size()));
      out.filtration[t].push_back(it->second);
    }
  }
  ValidationReport r = validate(out);
  if (!r.ok()) throw std::logic_error("interpolation produced invalid process: " + r.to_string());
  return out;
}

InterpolationFamily make_interpolation(const FilteredProcess& x, const FilteredProcess& y,
                                       double p) {
  if (p <= 1.0) throw std::invalid_argument("interpolation: requires p > 1");
  AdaptedDistanceResult res = adapted_distance(x, y, p);
  InterpolationFamily family;
  family.p = p;
  family.distance = res.value;
  family.plan = std::move(res.plan);
  return family;
}

FilteredProcess interpolate(const FilteredProcess& x, const FilteredProcess& y, double p,
                            double u) {
  return make_interpolation(x, y, p).at(u);
}

SpeedReport check_constant_speed(const InterpolationFamily& family,
                                 const std::vector<double>& samples, double tol) {
  SpeedReport report;
  std::vector<FilteredProcess> procs;
  procs.reserve(samples.size());
  for (double u : samples) procs.push_back(family.at(u));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (std::size_t j = i + 1; j < samples.size(); ++j) {
      SpeedReport::Entry e;
      e.u = samples[i];
      e.v = samples[j];
      e.measured = adapted_distance(procs[i], procs[j], family.p).value;
      e.expected = std::abs(samples[i] - samples[j]) * family.distance;
      report.checks.push_back(e);
      if (std::abs(e.measured - e.expected) > tol * (1.0 + family.distance))
        report.violations.push_back(e);
    }
  }
  return report;
}

namespace {

// Exact coordinate restriction of sum_k w_k |v - x_k|^p: one entry per
// coupled point, rest = squared distance in the remaining coordinates.
struct PulledPoint {
  double weight = 0.0;
  double coord = 0.0;
  double rest_sq = 0.0;
};

// Golden-section minimizer; the restriction is convex for p > 1.
double golden_min(const std::vector<PulledPoint>& pts, double p) {
  double lo = pts[0].coord, hi = lo;
  for (const auto& q : pts) {
    lo = std::min(lo, q.coord);
    hi = std::max(hi, q.coord);
  }
  if (hi - lo < 1e-15) return lo;
  const auto f = [&](double v) {
    double s = 0.0;
    for (const auto& q : pts) {
      const double d = v - q.coord;
      s += q.weight * std::pow(d * d + q.rest_sq, 0.5 * p);
    }
    return s;
  };
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > 1e-10) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

BarycenterResult barycenter(const BarycenterProblem& problem, const FilteredProcess& init,
                            int max_iters, double tol) {
  if (problem.inputs.empty()) throw std::invalid_argument("barycenter: no inputs");
  if (problem.inputs.size() != problem.weights.size())
    throw std::invalid_argument("barycenter: weight count mismatch");
  double wsum = 0.0;
  for (double w : problem.weights) {
    if (w < 0.0) throw std::invalid_argument("barycenter: negative weight");
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > 1e-9) throw std::invalid_argument("barycenter: weights must sum to 1");
  if (problem.p <= 1.0) throw std::invalid_argument("barycenter: requires p > 1");

  const int k = static_cast<int>(problem.inputs.size());
  CanonicalTree candidate = CanonicalTree::build(nested_distribution(init));
  std::vector<CanonicalTree> targets;
  targets.reserve(k);
  for (const auto& input : problem.inputs) {
    if (input.horizon != candidate.horizon || input.dim != candidate.dim)
      throw std::invalid_argument("barycenter: inputs must share horizon and dim");
    targets.push_back(CanonicalTree::build(nested_distribution(input)));
  }

  const auto solve_all = [&](std::vector<BicausalCoupling>& plans) {
    double obj = 0.0;
    plans.clear();
    plans.reserve(k);
    for (int i = 0; i < k; ++i) {
      AdaptedDistanceResult res = adapted_distance_trees(candidate, targets[i], problem.p);
      obj += problem.weights[i] * res.plan.cost_pow;
      plans.push_back(std::move(res.plan));
    }
    return obj;
  };

  BarycenterResult result;
  std::vector<BicausalCoupling> plans;
  double objective = solve_all(plans);
  result.trace.push_back(objective);

  for (int iter = 0; iter < max_iters; ++iter) {
    // Barycentric projection per node under the current couplings.
    for (int t = 0; t < candidate.horizon; ++t) {
      std::vector<std::vector<std::pair<double, Vec>>> pulled(candidate.levels[t].size());
      for (int i = 0; i < k; ++i) {
        const auto masses = plans[i].pair_masses();
        for (const auto& [pair, mass] : masses[t])
          pulled[pair.first].emplace_back(problem.weights[i] * mass,
                                          targets[i].levels[t][pair.second].value);
      }
      for (std::size_t node = 0; node < candidate.levels[t].size(); ++node) {
        if (pulled[node].empty()) continue;  // unreached node keeps its value
        Vec& value = candidate.levels[t][node].value;
        if (problem.p == 2.0) {
          for (int c = 0; c < candidate.dim; ++c) {
            double num = 0.0, den = 0.0;
            for (const auto& [w, x] : pulled[node]) {
              num += w * x[c];
              den += w;
            }
            value[c] = num / den;
          }
        } else {
          // Cyclic exact coordinate descent on the convex node objective.
          for (int sweep = 0; sweep < (candidate.dim > 1 ? 3 : 1); ++sweep) {
            for (int c = 0; c < candidate.dim; ++c) {
              std::vector<PulledPoint> pts;
              pts.reserve(pulled[node].size());
              for (const auto& [w, x] : pulled[node]) {
                PulledPoint q;
                q.weight = w;
                q.coord = x[c];
                for (int c2 = 0; c2 < candidate.dim; ++c2)
                  if (c2 != c) q.rest_sq += (value[c2] - x[c2]) * (value[c2] - x[c2]);
                pts.push_back(q);
              }
              value[c] = golden_min(pts, problem.p);
            }
          }
        }
      }
    }
    const double next = solve_all(plans);
    result.trace.push_back(next);
    const double decrease = objective - next;
    objective = next;
    if (decrease < tol) break;
  }

  result.objective = objective;
  result.process = candidate.to_process();
  return result;
}

FilteredProcess crr_model(int steps, double s0, double up, double down, double p_up) {
  if (steps < 1) throw std::invalid_argument("crr_model: steps must be >= 1");
  if (!(up > down && down > 0.0)) throw std::invalid_argument("crr_model: requires up > down > 0");
  if (p_up < 0.0 || p_up > 1.0) throw std::invalid_argument("crr_model: p_up outside [0,1]");

  FilteredProcess proc;
  proc.horizon = steps + 1;
  proc.dim = 1;
  const int atoms = 1 << steps;
  proc.filtration.assign(proc.horizon, std::vector<int>(atoms, 0));
  for (int a = 0; a < atoms; ++a) {
    double prob = 1.0, s = s0;
    Path path = {{s0}};
    for (int t = 0; t < steps; ++t) {
      const bool u = (a >> t) & 1;
      prob *= u ? p_up : 1.0 - p_up;
      s *= u ? up : down;
      path.push_back({s});
    }
    proc.atom_probs.push_back(prob);
    proc.paths.push_back(std::move(path));
    // Generated filtration: the first t coin flips determine X_{1:t+1}.
    for (int t = 1; t <= proc.horizon; ++t)
      proc.filtration[t - 1][a] = a & ((1 << (t - 1)) - 1);
  }
  ValidationReport r = validate(proc);
  if (!r.ok()) throw std::logic_error("crr_model: invalid output: " + r.to_string());
  return proc;
}

}  // namespace aw
