#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "aw/process.hpp"

namespace aw {

/// Term of the adapted-function grammar: base path functionals, pointwise
/// composition with scalar functions, and conditioning on F_t. The rank
/// counts conditioning depth: base terms have rank 0, composition takes the
/// maximum over arguments, conditioning adds one.
///
/// Structural nodes (projections, constants, named scalar ops) can be
/// serialized and time-shifted; opaque callbacks cannot be shifted.
class AdaptedFunction {
 public:
  struct Node {
    enum class Kind { Proj, Const, PathFn, Compose, Cond };
    enum class ScalarOp { Clamp, Power, Abs, Min, Max, AbsDiff, Linear, Callback };

    Kind kind = Kind::Const;
    int time = 0;   // Proj / Cond
    int coord = 0;  // Proj
    double value = 0.0;
    std::function<double(const Path&)> path_fn;
    ScalarOp op = ScalarOp::Callback;
    std::vector<double> params;
    std::function<double(const std::vector<double>&)> callback;
    std::vector<AdaptedFunction> args;
  };

  explicit AdaptedFunction(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  // base terms
  static AdaptedFunction proj(int t, int coord = 0);
  static AdaptedFunction constant(double c);
  static AdaptedFunction path_fn(std::function<double(const Path&)> fn);

  // named scalar compositions
  static AdaptedFunction clamp(AdaptedFunction arg, double lo, double hi);
  static AdaptedFunction power(AdaptedFunction arg, double k);
  static AdaptedFunction abs(AdaptedFunction arg);
  static AdaptedFunction min(std::vector<AdaptedFunction> args);
  static AdaptedFunction max(std::vector<AdaptedFunction> args);
  static AdaptedFunction abs_diff(AdaptedFunction a, AdaptedFunction b);
  /// bias + sum_i coeffs[i] * args[i]
  static AdaptedFunction linear(std::vector<double> coeffs, std::vector<AdaptedFunction> args,
                                double bias = 0.0);
  static AdaptedFunction apply(std::function<double(const std::vector<double>&)> phi,
                               std::vector<AdaptedFunction> args);

  // conditioning (g | t)
  static AdaptedFunction cond(AdaptedFunction arg, int t);

  int rank() const;
  /// Shifts every time index (projections and conditionings) by dt. Throws on
  /// opaque path callbacks.
  AdaptedFunction shift(int dt) const;

  const Node& node() const { return *node_; }

 private:
  std::shared_ptr<const Node> node_;
};

/// Per-atom value of an adapted function on a valid process. Conditional
/// expectations are exact weighted averages over filtration cells.
std::vector<double> evaluate(const AdaptedFunction& f, const FilteredProcess& proc);
double expectation(const AdaptedFunction& f, const FilteredProcess& proc);

/// Element of the n-th prediction space M_n: the path itself at order 0, and
/// per time slot a finite law over order n-1 elements otherwise. Canonical
/// form has each slot law sorted and merged.
struct PredValue {
  int order = 0;
  Path path;                                                  // order 0
  std::vector<std::vector<std::pair<double, PredValue>>> slots;  // order >= 1, one per time

  static int compare(const PredValue& a, const PredValue& b);
};

struct PredictionTable {
  int order = 0;
  std::vector<PredValue> per_atom;
};

/// Iterated conditional-law process pp^n; slot t of order n is the law of the
/// order n-1 state given F_t.
PredictionTable prediction_process(const FilteredProcess& proc, int order);

/// Law of pp^n as a canonical weighted list (values exact, weights merged).
std::vector<std::pair<double, PredValue>> prediction_law(const FilteredProcess& proc, int order);

/// Whether x and y have the same adapted distribution of rank n, decided via
/// equality of the pp^n laws. At n >= horizon-1 this coincides with equality
/// of nested distributions.
bool equivalent_rank(const FilteredProcess& x, const FilteredProcess& y, int n);

/// The recursive coin-flip construction separating rank N-2 from rank N-1:
/// two processes on a common 2^(N-1)-atom space with identical paths
/// (zero until the final step), equivalent at rank N-2 but distinguished by
/// the returned rank-(N-1) witness.
struct RankPair {
  FilteredProcess x, y;
  AdaptedFunction witness;
};

RankPair rank_separating_pair(int N);

}  // namespace aw
