#include "aw/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace aw {

using nlohmann::json;

namespace {

json parse(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw SchemaError("invalid JSON");
  return j;
}

Vec vec_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>()};
  if (!j.is_array()) throw SchemaError("expected a point (array of numbers)");
  Vec v;
  for (const auto& e : j) {
    if (!e.is_number()) throw SchemaError("expected a number in point");
    v.push_back(e.get<double>());
  }
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string process_to_json(const FilteredProcess& proc) {
  json j;
  j["horizon"] = proc.horizon;
  j["dim"] = proc.dim;
  j["atoms"] = json::array();
  for (int a = 0; a < proc.atom_count(); ++a) {
    json atom;
    atom["prob"] = proc.atom_probs[a];
    atom["path"] = proc.paths[a];
    j["atoms"].push_back(std::move(atom));
  }
  j["filtration"] = proc.filtration;
  return j.dump(2);
}

FilteredProcess process_from_json(const std::string& text) {
  const json j = parse(text);
  FilteredProcess proc;
  try {
    proc.horizon = j.at("horizon").get<int>();
    proc.dim = j.at("dim").get<int>();
    for (const auto& atom : j.at("atoms")) {
      proc.atom_probs.push_back(atom.at("prob").get<double>());
      Path path;
      for (const auto& pt : atom.at("path")) path.push_back(vec_from_json(pt));
      proc.paths.push_back(std::move(path));
    }
    proc.filtration = j.at("filtration").get<std::vector<std::vector<int>>>();
  } catch (const json::exception& e) {
    throw SchemaError(std::string("process schema: ") + e.what());
  }
  double sum = 0.0;
  for (double w : proc.atom_probs) sum += w;
  if (std::abs(sum - 1.0) > 1e-9)
    throw SchemaError("process schema: atom probabilities sum to " + format_double(sum));
  if (sum != 0.0)
    for (double& w : proc.atom_probs) w /= sum;
  ValidationReport report = validate(proc);
  if (!report.ok()) throw SchemaError("invalid process: " + report.to_string());
  return proc;
}

namespace {

json nested_atom_to_json(const NestedAtom& atom) {
  json j;
  j["v"] = atom.value;
  j["children"] = json::array();
  for (const auto& [w, child] : atom.children) {
    json c = nested_atom_to_json(child);
    c["w"] = w;
    j["children"].push_back(std::move(c));
  }
  return j;
}

NestedAtom nested_atom_from_json(const json& j) {
  NestedAtom atom;
  try {
    atom.value = vec_from_json(j.at("v"));
    if (j.contains("children"))
      for (const auto& c : j.at("children"))
        atom.children.emplace_back(c.at("w").get<double>(), nested_atom_from_json(c));
  } catch (const json::exception& e) {
    throw SchemaError(std::string("nested schema: ") + e.what());
  }
  return atom;
}

}  // namespace

std::string nested_to_json(const NestedDistribution& nd) {
  json j;
  j["atoms"] = json::array();
  for (const auto& [w, atom] : nd.atoms) {
    json a = nested_atom_to_json(atom);
    a["w"] = w;
    j["atoms"].push_back(std::move(a));
  }
  return j.dump(2);
}

NestedDistribution nested_from_json(const std::string& text) {
  const json j = parse(text);
  NestedDistribution nd;
  if (!j.contains("atoms") || !j.at("atoms").is_array() || j.at("atoms").empty())
    throw SchemaError("nested schema: missing atoms");
  try {
    for (const auto& a : j.at("atoms"))
      nd.atoms.emplace_back(a.at("w").get<double>(), nested_atom_from_json(a));
  } catch (const json::exception& e) {
    throw SchemaError(std::string("nested schema: ") + e.what());
  }
  nd.horizon = nd.atoms.front().second.horizon();
  nd.dim = static_cast<int>(nd.atoms.front().second.value.size());
  canonicalize(nd);
  double sum = 0.0;
  for (const auto& [w, atom] : nd.atoms) sum += w;
  if (std::abs(sum - 1.0) > 1e-9) throw SchemaError("nested schema: weights must sum to 1");
  return nd;
}

std::string grid_to_json(const QuantizationGrid& grid) {
  json j;
  j["levels"] = grid.levels;
  return j.dump(2);
}

QuantizationGrid grid_from_json(const std::string& text) {
  const json j = parse(text);
  QuantizationGrid grid;
  if (!j.contains("levels") || !j.at("levels").is_array())
    throw SchemaError("grid schema: missing levels");
  for (const auto& level : j.at("levels")) {
    std::vector<Vec> pts;
    if (!level.is_array()) throw SchemaError("grid schema: level must be an array");
    for (const auto& pt : level) pts.push_back(vec_from_json(pt));
    grid.levels.push_back(std::move(pts));
  }
  return grid;
}

namespace {

AdaptedFunction af_from(const json& j) {
  if (!j.is_object() || !j.contains("op")) throw SchemaError("af schema: missing op");
  const std::string op = j.at("op").get<std::string>();
  const auto arg = [&](const char* key) { return af_from(j.at(key)); };
  const auto args = [&]() {
    std::vector<AdaptedFunction> out;
    for (const auto& a : j.at("args")) out.push_back(af_from(a));
    return out;
  };
  try {
    if (op == "proj") return AdaptedFunction::proj(j.at("t").get<int>(), j.value("coord", 0));
    if (op == "const") return AdaptedFunction::constant(j.at("value").get<double>());
    if (op == "clamp")
      return AdaptedFunction::clamp(arg("arg"), j.at("lo").get<double>(),
                                    j.at("hi").get<double>());
    if (op == "power") return AdaptedFunction::power(arg("arg"), j.at("k").get<double>());
    if (op == "abs") return AdaptedFunction::abs(arg("arg"));
    if (op == "min") return AdaptedFunction::min(args());
    if (op == "max") return AdaptedFunction::max(args());
    if (op == "abs-diff") {
      auto v = args();
      if (v.size() != 2) throw SchemaError("af schema: abs-diff takes two args");
      return AdaptedFunction::abs_diff(v[0], v[1]);
    }
    if (op == "linear")
      return AdaptedFunction::linear(j.at("coeffs").get<std::vector<double>>(), args(),
                                     j.value("bias", 0.0));
    if (op == "cond") return AdaptedFunction::cond(arg("arg"), j.at("t").get<int>());
  } catch (const json::exception& e) {
    throw SchemaError(std::string("af schema: ") + e.what());
  }
  throw SchemaError("af schema: unknown op '" + op + "'");
}

json af_to(const AdaptedFunction& f) {
  using Node = AdaptedFunction::Node;
  const Node& n = f.node();
  json j;
  switch (n.kind) {
    case Node::Kind::Proj:
      j["op"] = "proj";
      j["t"] = n.time;
      j["coord"] = n.coord;
      return j;
    case Node::Kind::Const:
      j["op"] = "const";
      j["value"] = n.value;
      return j;
    case Node::Kind::PathFn:
      throw SchemaError("af schema: opaque path callback is not serializable");
    case Node::Kind::Cond:
      j["op"] = "cond";
      j["t"] = n.time;
      j["arg"] = af_to(n.args[0]);
      return j;
    case Node::Kind::Compose:
      break;
  }
  switch (n.op) {
    case Node::ScalarOp::Clamp:
      j["op"] = "clamp";
      j["lo"] = n.params[0];
      j["hi"] = n.params[1];
      j["arg"] = af_to(n.args[0]);
      return j;
    case Node::ScalarOp::Power:
      j["op"] = "power";
      j["k"] = n.params[0];
      j["arg"] = af_to(n.args[0]);
      return j;
    case Node::ScalarOp::Abs:
      j["op"] = "abs";
      j["arg"] = af_to(n.args[0]);
      return j;
    case Node::ScalarOp::Min:
    case Node::ScalarOp::Max: {
      j["op"] = n.op == Node::ScalarOp::Min ? "min" : "max";
      j["args"] = json::array();
      for (const auto& a : n.args) j["args"].push_back(af_to(a));
      return j;
    }
    case Node::ScalarOp::AbsDiff: {
      j["op"] = "abs-diff";
      j["args"] = {af_to(n.args[0]), af_to(n.args[1])};
      return j;
    }
    case Node::ScalarOp::Linear: {
      j["op"] = "linear";
      j["bias"] = n.params[0];
      j["coeffs"] = std::vector<double>(n.params.begin() + 1, n.params.end());
      j["args"] = json::array();
      for (const auto& a : n.args) j["args"].push_back(af_to(a));
      return j;
    }
    case Node::ScalarOp::Callback:
      throw SchemaError("af schema: opaque callback is not serializable");
  }
  throw SchemaError("af schema: unsupported node");
}

// A rank-0 expression evaluated directly on a path.
double eval_path_expr(const AdaptedFunction& f, const Path& path) {
  using Node = AdaptedFunction::Node;
  const Node& n = f.node();
  switch (n.kind) {
    case Node::Kind::Proj: {
      if (n.time < 1 || n.time > static_cast<int>(path.size()))
        throw std::invalid_argument("cost expression: projection time out of range");
      return path[n.time - 1].at(n.coord);
    }
    case Node::Kind::Const:
      return n.value;
    case Node::Kind::PathFn:
      return n.path_fn(path);
    case Node::Kind::Cond:
      throw SchemaError("cost expression: conditioning is not allowed in stage costs");
    case Node::Kind::Compose:
      break;
  }
  std::vector<double> v;
  v.reserve(n.args.size());
  for (const auto& a : n.args) v.push_back(eval_path_expr(a, path));
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

AdaptedFunction af_from_json(const std::string& text) { return af_from(parse(text)); }

std::string af_to_json(const AdaptedFunction& f) { return af_to(f).dump(2); }

StoppingCost cost_from_json(const std::string& text, int horizon) {
  const json j = parse(text);
  if (!j.contains("stages") || !j.at("stages").is_array())
    throw SchemaError("cost schema: missing stages");
  if (static_cast<int>(j.at("stages").size()) != horizon)
    throw SchemaError("cost schema: need one stage per time step");
  StoppingCost cost;
  for (const auto& stage : j.at("stages")) {
    AdaptedFunction f = af_from(stage);
    if (f.rank() != 0) throw SchemaError("cost schema: stages must have rank 0");
    cost.stages.push_back([f](const Path& path) { return eval_path_expr(f, path); });
  }
  return cost;
}

StoppingCost demo_sec6_cost(int horizon) {
  if (horizon < 2) throw std::invalid_argument("demo-sec6 cost needs horizon >= 2");
  // Backward-lifted stopping cost of the coin-flip construction: the terminal
  // stage clamps the last coordinate, each lift prepends the midpoint of the
  // previous pair of optimal values.
  std::vector<double> vx = {0.5}, vy = {0.25};  // values at horizon 2
  std::vector<double> heads = {0.5};            // c_1 for horizon 2
  for (int n = 3; n <= horizon; ++n) {
    const double mid = 0.5 * (vx.back() + vy.back());
    heads.push_back(mid);
    vx.push_back(mid);
    vy.push_back(0.5 * (mid + vy.back()));
  }
  StoppingCost cost;
  for (int t = 1; t < horizon; ++t) {
    const double c = heads[horizon - 1 - t];
    cost.stages.push_back([c](const Path&) { return c; });
  }
  cost.stages.push_back([](const Path& path) {
    return std::min(std::max(path.back().at(0), 0.0), 1.0);
  });
  cost.lipschitz = 1.0;
  return cost;
}

std::vector<std::pair<double, Path>> samples_from_csv(std::istream& in, int horizon, int dim) {
  std::vector<std::pair<double, Path>> samples;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (...) {
        throw SchemaError("samples csv: non-numeric cell '" + cell + "'");
      }
    }
    const int want = horizon * dim;
    double weight = 1.0;
    if (static_cast<int>(row.size()) == want + 1) {
      weight = row.back();
      row.pop_back();
    } else if (static_cast<int>(row.size()) != want) {
      throw SchemaError("samples csv: expected " + std::to_string(want) +
                        " values per row (optionally plus a weight)");
    }
    Path path(horizon, Vec(dim));
    for (int t = 0; t < horizon; ++t)
      for (int i = 0; i < dim; ++i) path[t][i] = row[static_cast<std::size_t>(t) * dim + i];
    samples.emplace_back(weight, std::move(path));
  }
  if (samples.empty()) throw SchemaError("samples csv: no rows");
  return samples;
}

void write_coupling_csv(std::ostream& os, const RawCoupling& coupling) {
  os << "row,col,mass\n";
  for (int i = 0; i < coupling.rows; ++i)
    for (int j = 0; j < coupling.cols; ++j)
      if (coupling.at(i, j) != 0.0)
        os << i << "," << j << "," << format_double(coupling.at(i, j)) << "\n";
}

void write_trace_csv(std::ostream& os, const std::vector<double>& trace) {
  os << "iter,objective\n";
  for (std::size_t i = 0; i < trace.size(); ++i)
    os << i << "," << format_double(trace[i]) << "\n";
}

void write_interpolation_csv(std::ostream& os, const std::vector<double>& us,
                             const std::vector<FilteredProcess>& procs) {
  os << "u,atoms";
  const int N = procs.empty() ? 0 : procs.front().horizon;
  for (int t = 1; t <= N; ++t) os << ",mean_t" << t;
  os << "\n";
  for (std::size_t k = 0; k < us.size(); ++k) {
    const FilteredProcess& proc = procs[k];
    os << format_double(us[k]) << "," << proc.atom_count();
    for (int t = 1; t <= N; ++t) {
      double m = 0.0;
      for (int a = 0; a < proc.atom_count(); ++a) m += proc.atom_probs[a] * proc.value(a, t)[0];
      os << "," << format_double(m);
    }
    os << "\n";
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SchemaError("cannot write file: " + path);
  out << content;
}

}  // namespace aw
