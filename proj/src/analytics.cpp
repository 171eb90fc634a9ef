#include "aw/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aw {

namespace {

// E[values | F_t] as a per-atom vector (constant on F_t-cells).
std::vector<double> cond_exp(const FilteredProcess& proc, const std::vector<double>& values,
                             int t) {
  std::vector<double> out(proc.atom_count());
  for (const auto& cell : proc.cells(t)) {
    double num = 0.0, den = 0.0;
    for (int a : cell) {
      num += proc.atom_probs[a] * values[a];
      den += proc.atom_probs[a];
    }
    for (int a : cell) out[a] = num / den;
  }
  return out;
}

void check_grid(const FilteredProcess& proc, const std::vector<Vec>& grid) {
  if (grid.empty()) throw std::invalid_argument("control_value: empty strategy grid");
  for (const Vec& h : grid) {
    if (static_cast<int>(h.size()) != proc.dim)
      throw std::invalid_argument("control_value: grid point dimension mismatch");
    for (double v : h)
      if (std::abs(v) > 1.0 + 1e-12)
        throw std::invalid_argument("control_value: grid point outside the unit ball");
  }
}

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Vec increment(const FilteredProcess& proc, int atom, int t) {
  Vec dx(proc.dim);
  for (int i = 0; i < proc.dim; ++i)
    dx[i] = proc.value(atom, t)[i] - proc.value(atom, t - 1)[i];
  return dx;
}

}  // namespace

SnellResult snell(const FilteredProcess& proc, const StoppingCost& cost) {
  const int N = proc.horizon;
  if (static_cast<int>(cost.stages.size()) != N)
    throw std::invalid_argument("snell: cost must have one stage per time step");

  std::vector<std::vector<double>> c(N, std::vector<double>(proc.atom_count()));
  for (int t = 1; t <= N; ++t) {
    for (int a = 0; a < proc.atom_count(); ++a) c[t - 1][a] = cost.stages[t - 1](proc.paths[a]);
    // Anticipative costs differ inside some F_t-cell. Prefixes agree exactly
    // within a cell, so a compliant callback returns bit-equal values.
    for (const auto& cell : proc.cells(t))
      for (std::size_t k = 1; k < cell.size(); ++k)
        if (c[t - 1][cell[k]] != c[t - 1][cell[0]])
          throw std::invalid_argument("snell: anticipative cost at t=" + std::to_string(t));
  }

  SnellResult res;
  res.envelope.assign(N, {});
  res.envelope[N - 1] = c[N - 1];
  std::vector<std::vector<double>> cont(N);  // E[S_{t+1} | F_t]
  for (int t = N - 1; t >= 1; --t) {
    cont[t - 1] = cond_exp(proc, res.envelope[t], t);
    res.envelope[t - 1].resize(proc.atom_count());
    for (int a = 0; a < proc.atom_count(); ++a)
      res.envelope[t - 1][a] = std::min(c[t - 1][a], cont[t - 1][a]);
  }
  res.value = 0.0;
  for (int a = 0; a < proc.atom_count(); ++a) res.value += proc.atom_probs[a] * res.envelope[0][a];

  res.stop_time.assign(proc.atom_count(), N);
  for (int a = 0; a < proc.atom_count(); ++a) {
    for (int t = 1; t < N; ++t) {
      if (c[t - 1][a] <= cont[t - 1][a]) {
        res.stop_time[a] = t;
        break;
      }
    }
  }
  return res;
}

DoobDecomposition doob(const FilteredProcess& proc) {
  const int N = proc.horizon;
  const int atoms = proc.atom_count();
  DoobDecomposition dec;
  dec.predictable.assign(atoms, Path(N, Vec(proc.dim, 0.0)));
  dec.martingale.assign(atoms, Path(N, Vec(proc.dim, 0.0)));

  for (int t = 2; t <= N; ++t) {
    for (int i = 0; i < proc.dim; ++i) {
      std::vector<double> delta(atoms);
      for (int a = 0; a < atoms; ++a)
        delta[a] = proc.value(a, t)[i] - proc.value(a, t - 1)[i];
      const std::vector<double> drift = cond_exp(proc, delta, t - 1);
      for (int a = 0; a < atoms; ++a)
        dec.predictable[a][t - 1][i] = dec.predictable[a][t - 2][i] + drift[a];
    }
  }
  for (int a = 0; a < atoms; ++a)
    for (int t = 0; t < N; ++t)
      for (int i = 0; i < proc.dim; ++i)
        dec.martingale[a][t][i] = proc.paths[a][t][i] - dec.predictable[a][t][i];
  return dec;
}

FilteredProcess doob_process(const FilteredProcess& proc) {
  const DoobDecomposition dec = doob(proc);
  FilteredProcess out;
  out.horizon = proc.horizon;
  out.dim = 2 * proc.dim;
  out.atom_probs = proc.atom_probs;
  out.filtration = proc.filtration;
  out.paths.resize(proc.atom_count());
  for (int a = 0; a < proc.atom_count(); ++a) {
    out.paths[a].resize(proc.horizon);
    for (int t = 0; t < proc.horizon; ++t) {
      Vec v;
      v.reserve(out.dim);
      v.insert(v.end(), dec.martingale[a][t].begin(), dec.martingale[a][t].end());
      v.insert(v.end(), dec.predictable[a][t].begin(), dec.predictable[a][t].end());
      out.paths[a][t] = std::move(v);
    }
  }
  ValidationReport r = validate(out);
  if (!r.ok()) throw std::logic_error("doob_process: invalid output: " + r.to_string());
  return out;
}

double martingale_deviation(const FilteredProcess& proc) {
  double worst = 0.0;
  for (int t = 1; t <= proc.horizon; ++t) {
    for (int s = t; s <= proc.horizon; ++s) {
      std::vector<Vec> pred(proc.atom_count(), Vec(proc.dim));
      for (int i = 0; i < proc.dim; ++i) {
        std::vector<double> xs(proc.atom_count());
        for (int a = 0; a < proc.atom_count(); ++a) xs[a] = proc.value(a, s)[i];
        const std::vector<double> ce = cond_exp(proc, xs, t);
        for (int a = 0; a < proc.atom_count(); ++a) pred[a][i] = ce[a];
      }
      double dev = 0.0;
      for (int a = 0; a < proc.atom_count(); ++a)
        dev += proc.atom_probs[a] * dist(proc.value(a, t), pred[a]);
      worst = std::max(worst, dev);
    }
  }
  return worst;
}

double control_value(const FilteredProcess& proc, const StageObjective& objective,
                     const std::vector<Vec>& grid) {
  const int N = proc.horizon;
  if (static_cast<int>(objective.stages.size()) != N - 1)
    throw std::invalid_argument("control_value: need one stage callback per time 2..N");
  check_grid(proc, grid);

  // W[atom] carries the optimal cost-to-go over stages > t given F_t; the
  // choice of H_{t+1} is constant on each F_t-cell.
  std::vector<double> W(proc.atom_count(), 0.0);
  for (int t = N; t >= 2; --t) {
    std::vector<double> next(proc.atom_count(), 0.0);
    for (const auto& cell : proc.cells(t - 1)) {
      double best = std::numeric_limits<double>::infinity();
      for (const Vec& h : grid) {
        double acc = 0.0, mass = 0.0;
        for (int a : cell) {
          Path prefix(proc.paths[a].begin(), proc.paths[a].begin() + t);
          const double stage = objective.stages[t - 2](prefix, h, increment(proc, a, t));
          acc += proc.atom_probs[a] * (stage + W[a]);
          mass += proc.atom_probs[a];
        }
        best = std::min(best, acc / mass);
      }
      for (int a : cell) next[a] = best;
    }
    W = std::move(next);
  }
  double value = 0.0;
  for (int a = 0; a < proc.atom_count(); ++a) value += proc.atom_probs[a] * W[a];
  return value;
}

double control_value(const FilteredProcess& proc,
                     const std::function<double(const Path&, const std::vector<double>&,
                                                const std::vector<Vec>&)>& objective,
                     const std::vector<Vec>& grid, long long cap) {
  const int N = proc.horizon;
  check_grid(proc, grid);

  // One grid choice per (time t in 2..N, F_{t-1}-cell).
  std::vector<std::pair<int, int>> slots;  // (t, cell)
  std::vector<std::vector<std::vector<int>>> cells_at(N);
  for (int t = 2; t <= N; ++t) {
    cells_at[t - 1] = proc.cells(t - 1);
    for (std::size_t c = 0; c < cells_at[t - 1].size(); ++c)
      slots.emplace_back(t, static_cast<int>(c));
  }
  double combos = 1.0;
  for (std::size_t k = 0; k < slots.size(); ++k) {
    combos *= static_cast<double>(grid.size());
    if (combos > static_cast<double>(cap))
      throw std::runtime_error("control_value: strategy enumeration cap exceeded");
  }

  std::vector<int> choice(slots.size(), 0);
  double best = std::numeric_limits<double>::infinity();
  for (;;) {
    double total = 0.0;
    for (int a = 0; a < proc.atom_count(); ++a) {
      std::vector<Vec> H(N - 1);
      for (std::size_t k = 0; k < slots.size(); ++k) {
        const auto [t, c] = slots[k];
        if (proc.cell_of(t - 1, a) == c) H[t - 2] = grid[choice[k]];
      }
      std::vector<double> hx(N - 1);
      double acc = 0.0;
      for (int t = 2; t <= N; ++t) {
        acc += dot(H[t - 2], increment(proc, a, t));
        hx[t - 2] = acc;
      }
      total += proc.atom_probs[a] * objective(proc.paths[a], hx, H);
    }
    best = std::min(best, total);
    // odometer
    std::size_t k = 0;
    while (k < choice.size() && ++choice[k] == static_cast<int>(grid.size())) choice[k++] = 0;
    if (k == choice.size()) break;
  }
  return best;
}

}  // namespace aw
