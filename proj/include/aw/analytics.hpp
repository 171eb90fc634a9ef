#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "aw/process.hpp"

namespace aw {

/// Non-anticipative stopping cost: one callback per time. Callbacks receive
/// the full path but must depend on x_{1:t} only; snell() verifies this
/// against the filtration and rejects anticipative costs.
struct StoppingCost {
  std::vector<std::function<double(const Path&)>> stages;
  double lipschitz = std::numeric_limits<double>::quiet_NaN();  // optional metadata
};

struct SnellResult {
  double value = 0.0;
  std::vector<std::vector<double>> envelope;  // [t-1][atom]
  std::vector<int> stop_time;                 // per atom, earliest optimal rule
};

/// Optimal stopping value inf_tau E[c_tau(X)] by backward induction
/// S_N = c_N, S_t = min(c_t, E[S_{t+1} | F_t]); ties stop early.
SnellResult snell(const FilteredProcess& proc, const StoppingCost& cost);

/// X = M + A with M a martingale and A predictable, A_1 = 0. Stored per atom
/// and time; A_t is constant on F_{t-1}-cells.
struct DoobDecomposition {
  std::vector<Path> martingale;   // per atom
  std::vector<Path> predictable;  // per atom
};

DoobDecomposition doob(const FilteredProcess& proc);

/// The filtered process with values (M_t, A_t) in R^{2d} on the original
/// filtration.
FilteredProcess doob_process(const FilteredProcess& proc);

/// max over t <= s of E[ |X_t - E[X_s | F_t]| ]; zero iff martingale.
double martingale_deviation(const FilteredProcess& proc);

/// Stage-additive control objective: the total cost is
/// sum_{t=2}^N j_t(x_{1:t}, h_t, x_t - x_{t-1}) with H_t predictable.
/// stages[t-2] is the callback for time t.
struct StageObjective {
  std::vector<std::function<double(const Path& prefix, const Vec& h, const Vec& dx)>> stages;
};

/// Exact DP over predictable grid-valued strategies minimizing the
/// stage-additive objective. Grid values must lie in [-1,1]^d.
double control_value(const FilteredProcess& proc, const StageObjective& objective,
                     const std::vector<Vec>& grid);

/// General objective J(x, (H.X)_{2..N}, H); minimized by exhaustive
/// enumeration over grid assignments per predictable cell. Throws when the
/// number of strategies exceeds cap.
double control_value(const FilteredProcess& proc,
                     const std::function<double(const Path&, const std::vector<double>&,
                                                const std::vector<Vec>&)>& objective,
                     const std::vector<Vec>& grid, long long cap = 1 << 20);

}  // namespace aw
