#include "aw/process.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

namespace aw {

int FilteredProcess::cell_count(int t) const {
  int mx = -1;
  for (int c : filtration[t - 1]) mx = std::max(mx, c);
  return mx + 1;
}

std::vector<std::vector<int>> FilteredProcess::cells(int t) const {
  std::vector<std::vector<int>> out(cell_count(t));
  for (int a = 0; a < atom_count(); ++a) out[cell_of(t, a)].push_back(a);
  return out;
}

double FilteredProcess::cell_prob(int t, int cell) const {
  double s = 0.0;
  for (int a = 0; a < atom_count(); ++a)
    if (cell_of(t, a) == cell) s += atom_probs[a];
  return s;
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  if (pruned_atoms > 0) os << "pruned " << pruned_atoms << " zero-probability atom(s)\n";
  for (const auto& v : violations) os << v << "\n";
  if (ok() && pruned_atoms == 0) os << "ok\n";
  return os.str();
}

namespace {

void densify_cells(std::vector<int>& cells) {
  std::map<int, int> remap;
  for (int c : cells) remap.emplace(c, 0);
  int next = 0;
  for (auto& [old_id, new_id] : remap) new_id = next++;
  for (int& c : cells) c = remap[c];
}

}  // namespace

ValidationReport validate(FilteredProcess& proc) {
  ValidationReport report;
  auto fail = [&](const std::string& msg) { report.violations.push_back(msg); };

  const int n0 = proc.atom_count();
  if (proc.horizon < 1) fail("horizon must be >= 1");
  if (proc.dim < 1) fail("dim must be >= 1");
  if (static_cast<int>(proc.paths.size()) != n0) fail("paths/atom_probs size mismatch");
  if (static_cast<int>(proc.filtration.size()) != proc.horizon)
    fail("filtration must have one partition per time step");
  if (!report.ok()) return report;

  for (int a = 0; a < n0; ++a) {
    if (static_cast<int>(proc.paths[a].size()) != proc.horizon) {
      fail("atom " + std::to_string(a) + ": path length != horizon");
      return report;
    }
    for (const Vec& x : proc.paths[a])
      if (static_cast<int>(x.size()) != proc.dim) {
        fail("atom " + std::to_string(a) + ": point dimension != dim");
        return report;
      }
  }
  for (const auto& part : proc.filtration)
    if (static_cast<int>(part.size()) != n0) {
      fail("partition size != atom count");
      return report;
    }

  double total = 0.0;
  for (int a = 0; a < n0; ++a) {
    if (proc.atom_probs[a] < 0.0)
      fail("atom " + std::to_string(a) + ": negative probability");
    total += proc.atom_probs[a];
  }
  if (std::abs(total - 1.0) > 1e-12)
    fail("atom probabilities sum to " + std::to_string(total));

  // Prune null atoms; the remaining structure is checked afterwards.
  std::vector<int> keep;
  for (int a = 0; a < n0; ++a)
    if (proc.atom_probs[a] > 0.0) keep.push_back(a);
  if (static_cast<int>(keep.size()) < n0) {
    report.pruned_atoms = n0 - static_cast<int>(keep.size());
    FilteredProcess pruned;
    pruned.horizon = proc.horizon;
    pruned.dim = proc.dim;
    pruned.filtration.resize(proc.horizon);
    for (int a : keep) {
      pruned.atom_probs.push_back(proc.atom_probs[a]);
      pruned.paths.push_back(proc.paths[a]);
    }
    for (int t = 0; t < proc.horizon; ++t)
      for (int a : keep) pruned.filtration[t].push_back(proc.filtration[t][a]);
    proc = std::move(pruned);
  }
  for (auto& part : proc.filtration) densify_cells(part);

  const int n = proc.atom_count();
  // Refinement in time.
  for (int t = 1; t < proc.horizon; ++t) {
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        if (proc.filtration[t][a] == proc.filtration[t][b] &&
            proc.filtration[t - 1][a] != proc.filtration[t - 1][b]) {
          fail("refinement violation at t=" + std::to_string(t + 1) + ": atoms " +
               std::to_string(a) + "," + std::to_string(b));
        }
      }
    }
  }
  // Adaptedness: X_s constant on F_t-cells for s <= t.
  for (int t = 1; t <= proc.horizon; ++t) {
    for (const auto& cell : proc.cells(t)) {
      for (std::size_t k = 1; k < cell.size(); ++k) {
        for (int s = 1; s <= t; ++s) {
          if (compare_vec(proc.value(cell[0], s), proc.value(cell[k], s)) != 0) {
            fail("adaptedness violation at t=" + std::to_string(t) + ": X_" +
                 std::to_string(s) + " differs within a cell");
            s = t;  // one message per atom pair
          }
        }
      }
    }
  }
  return report;
}

bool is_valid(const FilteredProcess& proc) {
  FilteredProcess copy = proc;
  return validate(copy).ok();
}

void PathLaw::merge_duplicates() {
  std::vector<std::pair<double, Path>> merged;
  for (auto& [w, path] : support) {
    bool found = false;
    for (auto& [mw, mp] : merged) {
      if (compare_path(mp, path) == 0) {
        mw += w;
        found = true;
        break;
      }
    }
    if (!found) merged.emplace_back(w, path);
  }
  support = std::move(merged);
}

PathLaw path_law(const FilteredProcess& proc) {
  PathLaw law;
  law.horizon = proc.horizon;
  law.dim = proc.dim;
  for (int a = 0; a < proc.atom_count(); ++a)
    law.support.emplace_back(proc.atom_probs[a], proc.paths[a]);
  law.merge_duplicates();
  return law;
}

namespace {

FilteredProcess from_law(const PathLaw& law, bool full_info) {
  FilteredProcess proc;
  proc.horizon = law.horizon;
  proc.dim = law.dim;
  for (const auto& [w, path] : law.support) {
    proc.atom_probs.push_back(w);
    proc.paths.push_back(path);
  }
  const int n = proc.atom_count();
  proc.filtration.assign(law.horizon, std::vector<int>(n, 0));
  for (int t = 1; t <= law.horizon; ++t) {
    // Group atoms by exact path prefix x_{1:t} (or the whole path).
    std::vector<int> rep;  // representative atom per cell
    for (int a = 0; a < n; ++a) {
      int cell = -1;
      for (std::size_t c = 0; c < rep.size(); ++c) {
        bool same = true;
        const int upto = full_info ? law.horizon : t;
        for (int s = 1; s <= upto && same; ++s)
          same = compare_vec(proc.value(rep[c], s), proc.value(a, s)) == 0;
        if (same) {
          cell = static_cast<int>(c);
          break;
        }
      }
      if (cell < 0) {
        cell = static_cast<int>(rep.size());
        rep.push_back(a);
      }
      proc.filtration[t - 1][a] = cell;
    }
  }
  ValidationReport r = validate(proc);
  if (!r.ok()) throw std::invalid_argument("invalid path law: " + r.to_string());
  return proc;
}

}  // namespace

FilteredProcess plain_process(const PathLaw& law) { return from_law(law, false); }

FilteredProcess full_info_process(const PathLaw& law) { return from_law(law, true); }

FilteredProcess independent_coin_extension(const FilteredProcess& x, const FilteredProcess& y,
                                           bool reveal_coin_at_1) {
  if (x.horizon != y.horizon || x.dim != y.dim)
    throw std::invalid_argument("independent_coin_extension: horizon/dim mismatch");
  if (x.atom_count() != y.atom_count())
    throw std::invalid_argument("independent_coin_extension: inputs must share the sample space");
  for (int a = 0; a < x.atom_count(); ++a) {
    if (x.atom_probs[a] != y.atom_probs[a] || compare_path(x.paths[a], y.paths[a]) != 0)
      throw std::invalid_argument(
          "independent_coin_extension: inputs must have equal probabilities and paths");
  }

  const int K = x.atom_count();
  FilteredProcess out;
  out.horizon = x.horizon + 1;
  out.dim = x.dim;
  out.filtration.assign(out.horizon, std::vector<int>(2 * K, 0));
  const Vec zero(x.dim, 0.0);
  for (int v = 0; v < 2; ++v) {
    for (int k = 0; k < K; ++k) {
      out.atom_probs.push_back(0.5 * x.atom_probs[k]);
      Path path;
      path.push_back(zero);
      for (const Vec& pt : x.paths[k]) path.push_back(pt);
      out.paths.push_back(std::move(path));
      const int atom = v * K + k;
      out.filtration[0][atom] = reveal_coin_at_1 ? v : 0;
      for (int t = 2; t <= out.horizon; ++t) {
        const FilteredProcess& side = (v == 0) ? x : y;
        const int base = (v == 0) ? 0 : x.cell_count(t - 1);
        out.filtration[t - 1][atom] = base + side.cell_of(t - 1, k);
      }
    }
  }
  ValidationReport r = validate(out);
  if (!r.ok())
    throw std::logic_error("independent_coin_extension produced invalid process: " + r.to_string());
  return out;
}

}  // namespace aw
