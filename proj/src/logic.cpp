#include "aw/logic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace aw {

namespace {

using Node = AdaptedFunction::Node;

AdaptedFunction wrap(Node n) { return AdaptedFunction(std::make_shared<const Node>(std::move(n))); }

}  // namespace

AdaptedFunction AdaptedFunction::proj(int t, int coord) {
  Node n;
  n.kind = Node::Kind::Proj;
  n.time = t;
  n.coord = coord;
  return wrap(std::move(n));
}

AdaptedFunction AdaptedFunction::constant(double c) {
  Node n;
  n.kind = Node::Kind::Const;
  n.value = c;
  return wrap(std::move(n));
}

AdaptedFunction AdaptedFunction::path_fn(std::function<double(const Path&)> fn) {
  Node n;
  n.kind = Node::Kind::PathFn;
  n.path_fn = std::move(fn);
  return wrap(std::move(n));
}

namespace {

AdaptedFunction compose(Node::ScalarOp op, std::vector<AdaptedFunction> args,
                        std::vector<double> params = {}) {
  Node n;
  n.kind = Node::Kind::Compose;
  n.op = op;
  n.args = std::move(args);
  n.params = std::move(params);
  return wrap(std::move(n));
}

}  // namespace

AdaptedFunction AdaptedFunction::clamp(AdaptedFunction arg, double lo, double hi) {
  return compose(Node::ScalarOp::Clamp, {std::move(arg)}, {lo, hi});
}
AdaptedFunction AdaptedFunction::power(AdaptedFunction arg, double k) {
  return compose(Node::ScalarOp::Power, {std::move(arg)}, {k});
}
AdaptedFunction AdaptedFunction::abs(AdaptedFunction arg) {
  return compose(Node::ScalarOp::Abs, {std::move(arg)});
}
AdaptedFunction AdaptedFunction::min(std::vector<AdaptedFunction> args) {
  return compose(Node::ScalarOp::Min, std::move(args));
}
AdaptedFunction AdaptedFunction::max(std::vector<AdaptedFunction> args) {
  return compose(Node::ScalarOp::Max, std::move(args));
}
AdaptedFunction AdaptedFunction::abs_diff(AdaptedFunction a, AdaptedFunction b) {
  return compose(Node::ScalarOp::AbsDiff, {std::move(a), std::move(b)});
}
AdaptedFunction AdaptedFunction::linear(std::vector<double> coeffs,
                                        std::vector<AdaptedFunction> args, double bias) {
  if (coeffs.size() != args.size())
    throw std::invalid_argument("AdaptedFunction::linear: coeffs/args size mismatch");
  std::vector<double> params = {bias};
  params.insert(params.end(), coeffs.begin(), coeffs.end());
  return compose(Node::ScalarOp::Linear, std::move(args), std::move(params));
}
AdaptedFunction AdaptedFunction::apply(std::function<double(const std::vector<double>&)> phi,
                                       std::vector<AdaptedFunction> args) {
  Node n;
  n.kind = Node::Kind::Compose;
  n.op = Node::ScalarOp::Callback;
  n.callback = std::move(phi);
  n.args = std::move(args);
  return wrap(std::move(n));
}

AdaptedFunction AdaptedFunction::cond(AdaptedFunction arg, int t) {
  Node n;
  n.kind = Node::Kind::Cond;
  n.time = t;
  n.args = {std::move(arg)};
  return wrap(std::move(n));
}

int AdaptedFunction::rank() const {
  switch (node_->kind) {
    case Node::Kind::Proj:
    case Node::Kind::Const:
    case Node::Kind::PathFn:
      return 0;
    case Node::Kind::Compose: {
      int r = 0;
      for (const auto& a : node_->args) r = std::max(r, a.rank());
      return r;
    }
    case Node::Kind::Cond:
      return node_->args[0].rank() + 1;
  }
  return 0;
}

AdaptedFunction AdaptedFunction::shift(int dt) const {
  Node n = *node_;
  switch (n.kind) {
    case Node::Kind::Const:
      break;
    case Node::Kind::Proj:
    case Node::Kind::Cond:
      n.time += dt;
      break;
    case Node::Kind::PathFn:
      throw std::logic_error("AdaptedFunction::shift: opaque path callback is not shiftable");
    case Node::Kind::Compose:
      break;
  }
  std::vector<AdaptedFunction> shifted;
  shifted.reserve(n.args.size());
  for (const auto& a : n.args) shifted.push_back(a.shift(dt));
  n.args = std::move(shifted);
  return wrap(std::move(n));
}

namespace {

double apply_scalar(const Node& n, const std::vector<double>& v) {
  switch (n.op) {
    case Node::ScalarOp::Clamp:
      return std::min(std::max(v[0], n.params[0]), n.params[1]);
    case Node::ScalarOp::Power:
      return std::pow(v[0], n.params[0]);
    case Node::ScalarOp::Abs:
      return std::abs(v[0]);
    case Node::ScalarOp::Min:
      return *std::min_element(v.begin(), v.end());
    case Node::ScalarOp::Max:
      return *std::max_element(v.begin(), v.end());
    case Node::ScalarOp::AbsDiff:
      return std::abs(v[0] - v[1]);
    case Node::ScalarOp::Linear: {
      double s = n.params[0];
      for (std::size_t i = 0; i < v.size(); ++i) s += n.params[i + 1] * v[i];
      return s;
    }
    case Node::ScalarOp::Callback:
      return n.callback(v);
  }
  return 0.0;
}

}  // namespace

std::vector<double> evaluate(const AdaptedFunction& f, const FilteredProcess& proc) {
  const Node& n = f.node();
  const int atoms = proc.atom_count();
  std::vector<double> out(atoms);
  switch (n.kind) {
    case Node::Kind::Proj: {
      if (n.time < 1 || n.time > proc.horizon)
        throw std::invalid_argument("evaluate: projection time out of range");
      if (n.coord < 0 || n.coord >= proc.dim)
        throw std::invalid_argument("evaluate: projection coordinate out of range");
      for (int a = 0; a < atoms; ++a) out[a] = proc.value(a, n.time)[n.coord];
      return out;
    }
    case Node::Kind::Const: {
      std::fill(out.begin(), out.end(), n.value);
      return out;
    }
    case Node::Kind::PathFn: {
      for (int a = 0; a < atoms; ++a) out[a] = n.path_fn(proc.paths[a]);
      return out;
    }
    case Node::Kind::Compose: {
      std::vector<std::vector<double>> child;
      child.reserve(n.args.size());
      for (const auto& g : n.args) child.push_back(evaluate(g, proc));
      std::vector<double> v(n.args.size());
      for (int a = 0; a < atoms; ++a) {
        for (std::size_t i = 0; i < child.size(); ++i) v[i] = child[i][a];
        out[a] = apply_scalar(n, v);
      }
      return out;
    }
    case Node::Kind::Cond: {
      if (n.time < 1 || n.time > proc.horizon)
        throw std::invalid_argument("evaluate: conditioning time out of range");
      const std::vector<double> g = evaluate(n.args[0], proc);
      for (const auto& cell : proc.cells(n.time)) {
        double num = 0.0, den = 0.0;
        for (int a : cell) {
          num += proc.atom_probs[a] * g[a];
          den += proc.atom_probs[a];
        }
        const double avg = num / den;
        for (int a : cell) out[a] = avg;
      }
      return out;
    }
  }
  return out;
}

double expectation(const AdaptedFunction& f, const FilteredProcess& proc) {
  const std::vector<double> v = evaluate(f, proc);
  double s = 0.0;
  for (int a = 0; a < proc.atom_count(); ++a) s += proc.atom_probs[a] * v[a];
  return s;
}

int PredValue::compare(const PredValue& a, const PredValue& b) {
  if (a.order != b.order) return a.order < b.order ? -1 : 1;
  if (a.order == 0) return compare_path(a.path, b.path);
  if (a.slots.size() != b.slots.size()) return a.slots.size() < b.slots.size() ? -1 : 1;
  for (std::size_t t = 0; t < a.slots.size(); ++t) {
    const auto& la = a.slots[t];
    const auto& lb = b.slots[t];
    if (la.size() != lb.size()) return la.size() < lb.size() ? -1 : 1;
    for (std::size_t i = 0; i < la.size(); ++i) {
      if (int c = compare(la[i].second, lb[i].second); c != 0) return c;
      if (la[i].first != lb[i].first) return la[i].first < lb[i].first ? -1 : 1;
    }
  }
  return 0;
}

namespace {

using Law = std::vector<std::pair<double, PredValue>>;

void canonicalize_law(Law& law) {
  std::sort(law.begin(), law.end(), [](const auto& a, const auto& b) {
    if (int c = PredValue::compare(a.second, b.second); c != 0) return c < 0;
    return a.first < b.first;
  });
  Law merged;
  for (auto& [w, v] : law) {
    if (w <= 0.0) continue;
    if (!merged.empty() && PredValue::compare(merged.back().second, v) == 0)
      merged.back().first += w;
    else
      merged.emplace_back(w, std::move(v));
  }
  law = std::move(merged);
}

// Values are compared exactly, weights within a small tolerance: weights are
// products and ratios of probabilities and pick up rounding that the state
// values never do.
bool law_equal(const Law& a, const Law& b, double wtol = 1e-12) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (PredValue::compare(a[i].second, b[i].second) != 0) return false;
    if (std::abs(a[i].first - b[i].first) > wtol) return false;
  }
  return true;
}

}  // namespace

PredictionTable prediction_process(const FilteredProcess& proc, int order) {
  if (order < 0) throw std::invalid_argument("prediction_process: order must be >= 0");
  PredictionTable table;
  table.order = 0;
  table.per_atom.resize(proc.atom_count());
  for (int a = 0; a < proc.atom_count(); ++a) {
    table.per_atom[a].order = 0;
    table.per_atom[a].path = proc.paths[a];
  }
  for (int k = 1; k <= order; ++k) {
    PredictionTable next;
    next.order = k;
    next.per_atom.assign(proc.atom_count(), PredValue{});
    for (int a = 0; a < proc.atom_count(); ++a) {
      next.per_atom[a].order = k;
      next.per_atom[a].slots.resize(proc.horizon);
    }
    for (int t = 1; t <= proc.horizon; ++t) {
      for (const auto& cell : proc.cells(t)) {
        double pc = 0.0;
        for (int a : cell) pc += proc.atom_probs[a];
        Law law;
        for (int a : cell) law.emplace_back(proc.atom_probs[a] / pc, table.per_atom[a]);
        canonicalize_law(law);
        for (int a : cell) next.per_atom[a].slots[t - 1] = law;
      }
    }
    table = std::move(next);
  }
  return table;
}

std::vector<std::pair<double, PredValue>> prediction_law(const FilteredProcess& proc, int order) {
  const PredictionTable table = prediction_process(proc, order);
  Law law;
  for (int a = 0; a < proc.atom_count(); ++a)
    law.emplace_back(proc.atom_probs[a], table.per_atom[a]);
  canonicalize_law(law);
  return law;
}

bool equivalent_rank(const FilteredProcess& x, const FilteredProcess& y, int n) {
  if (x.horizon != y.horizon || x.dim != y.dim)
    throw std::invalid_argument("equivalent_rank: horizon/dim mismatch");
  return law_equal(prediction_law(x, n), prediction_law(y, n));
}

RankPair rank_separating_pair(int N) {
  if (N < 2) throw std::invalid_argument("rank_separating_pair: N must be >= 2");
  // Two-step base: a fair coin revealed at time 1 only for y.
  FilteredProcess x;
  x.horizon = 2;
  x.dim = 1;
  x.atom_probs = {0.5, 0.5};
  x.paths = {{{0.0}, {0.0}}, {{0.0}, {1.0}}};
  x.filtration = {{0, 0}, {0, 1}};
  FilteredProcess y = x;
  y.filtration[0] = {0, 1};

  AdaptedFunction witness = AdaptedFunction::min(
      {AdaptedFunction::power(
           AdaptedFunction::cond(
               AdaptedFunction::clamp(AdaptedFunction::proj(2), 0.0, 1.0), 1),
           2.0),
       AdaptedFunction::constant(1.0)});

  for (int n = 3; n <= N; ++n) {
    FilteredProcess nx = independent_coin_extension(x, y, false);
    FilteredProcess ny = independent_coin_extension(x, y, true);
    x = std::move(nx);
    y = std::move(ny);
    witness = AdaptedFunction::min(
        {AdaptedFunction::power(AdaptedFunction::cond(witness.shift(1), 1), 2.0),
         AdaptedFunction::constant(1.0)});
  }
  return {std::move(x), std::move(y), std::move(witness)};
}

}  // namespace aw
