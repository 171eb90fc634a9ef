// Command-line front end: ingest processes, compute adapted distances,
// stopping values, decompositions, geodesics, barycenters and quantizations,
// and emit CSV/JSON for offline plotting.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aw/analytics.hpp"
#include "aw/distance.hpp"
#include "aw/geometry.hpp"
#include "aw/io.hpp"
#include "aw/logic.hpp"
#include "aw/quantize.hpp"

namespace {

using namespace aw;

FilteredProcess load_process(const std::string& path) {
  return process_from_json(read_file(path));
}

std::vector<double> parse_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(std::stod(cell));
  return out;
}

struct DemoRow {
  std::string name;
  std::string expected;
  std::string actual;
  bool pass = false;
};

void demo_check(std::vector<DemoRow>& rows, const std::string& name, double expected,
                double actual, double tol) {
  DemoRow row;
  row.name = name;
  row.expected = format_double(expected);
  row.actual = format_double(actual);
  row.pass = std::abs(expected - actual) <= tol;
  rows.push_back(std::move(row));
}

void demo_check_bool(std::vector<DemoRow>& rows, const std::string& name, bool expected,
                     bool actual) {
  DemoRow row;
  row.name = name;
  row.expected = expected ? "true" : "false";
  row.actual = actual ? "true" : "false";
  row.pass = expected == actual;
  rows.push_back(std::move(row));
}

int run_demo(unsigned seed, const std::string& out_path) {
  std::vector<DemoRow> rows;

  // Two-step processes sharing the path law 1/2 (0,-1) + 1/2 (0,1).
  PathLaw law31;
  law31.horizon = 2;
  law31.dim = 1;
  law31.support = {{0.5, {{0.0}, {-1.0}}}, {0.5, {{0.0}, {1.0}}}};
  const FilteredProcess x31 = plain_process(law31);
  const FilteredProcess y31 = full_info_process(law31);
  demo_check(rows, "two-step pair: AW_1", 1.0, adapted_distance(x31, y31, 1.0).value, 1e-12);
  demo_check_bool(rows, "two-step pair: same path law", true,
                  compare(nested_distribution(plain_process(path_law(x31))),
                          nested_distribution(plain_process(path_law(y31)))) == 0);
  demo_check_bool(rows, "two-step pair: nested forms differ", true,
                  !nested_equal(nested_distribution(x31), nested_distribution(y31), 0.0));

  // Coin-flip rank pairs, horizons 2..4.
  std::vector<double> vx = {0.5}, vy = {0.25};
  for (int n = 3; n <= 4; ++n) {
    const double mid = 0.5 * (vx.back() + vy.back());
    vx.push_back(mid);
    vy.push_back(0.5 * (mid + vy.back()));
  }
  for (int N = 2; N <= 4; ++N) {
    const RankPair pair = rank_separating_pair(N);
    const StoppingCost cost = demo_sec6_cost(N);
    const double vX = snell(pair.x, cost).value;
    const double vY = snell(pair.y, cost).value;
    const std::string tag = "coin pair N=" + std::to_string(N);
    demo_check(rows, tag + ": stopping value (coarse)", vx[N - 2], vX, 1e-12);
    demo_check(rows, tag + ": stopping value (fine)", vy[N - 2], vY, 1e-12);
    demo_check_bool(rows, tag + ": equivalent at rank N-2", true,
                    equivalent_rank(pair.x, pair.y, N - 2));
    demo_check_bool(rows, tag + ": distinct at rank N-1", false,
                    equivalent_rank(pair.x, pair.y, N - 1));
    if (N == 2) {
      const double gap = std::abs(expectation(pair.witness, pair.x) -
                                  expectation(pair.witness, pair.y));
      demo_check(rows, tag + ": witness gap", 0.25, gap, 1e-15);
    }
  }

  // Crossing-path example: optimal bicausal coupling is antidiagonal.
  PathLaw mu, nu;
  mu.horizon = nu.horizon = 2;
  mu.dim = nu.dim = 1;
  mu.support = {{0.5, {{1.0}, {-2.0}}}, {0.5, {{-1.0}, {2.0}}}};
  nu.support = {{0.5, {{1.0}, {1.0}}}, {0.5, {{-1.0}, {-1.0}}}};
  const FilteredProcess px = plain_process(mu), py = plain_process(nu);
  const AdaptedDistanceResult cross = adapted_distance(px, py, 2.0);
  demo_check(rows, "crossing pair: AW_2", std::sqrt(5.0), cross.value, 1e-10);
  // The optimal coupling pairs endpoints of matching sign (antidiagonal in
  // the time-1 values).
  const FlattenResult flat = flatten(cross.plan);
  double matched = 0.0;
  for (int i = 0; i < flat.coupling.rows; ++i)
    for (int j = 0; j < flat.coupling.cols; ++j)
      if (flat.coupling.at(i, j) > 0 && flat.x.value(i, 2)[0] * flat.y.value(j, 2)[0] > 0)
        matched += flat.coupling.at(i, j);
  demo_check(rows, "crossing pair: antidiagonal mass", 1.0, matched, 1e-12);

  const FilteredProcess mid = interpolate(px, py, 2.0, 0.5);
  NestedDistribution expected_mid;
  expected_mid.horizon = 2;
  expected_mid.dim = 1;
  NestedAtom up, down;
  up.value = {0.0};
  down.value = {0.0};
  NestedAtom up2, down2;
  up2.value = {1.5};
  down2.value = {-1.5};
  up.children = {{1.0, up2}};
  down.children = {{1.0, down2}};
  expected_mid.atoms = {{0.5, up}, {0.5, down}};
  canonicalize(expected_mid);
  demo_check_bool(rows, "crossing pair: midpoint nested form", true,
                  nested_equal(nested_distribution(mid), expected_mid, 0.0));
  demo_check_bool(rows, "crossing pair: midpoint not plain", true,
                  !nested_equal(nested_distribution(mid),
                                nested_distribution(plain_process(path_law(mid))), 0.0));

  // Barycenter of three binomial models.
  BarycenterProblem prob;
  prob.inputs = {crr_model(3, 1.0, 2.0, 0.5, 0.5), crr_model(3, 1.0, 1.5, 0.75, 0.5),
                 crr_model(3, 1.0, 1.25, 0.8, 0.5)};
  prob.weights = {1.0 / 4, 1.0 / 4, 1.0 / 2};
  prob.p = 2.0;
  double best_input = 0.0;
  int best_idx = 0;
  for (std::size_t i = 0; i < prob.inputs.size(); ++i) {
    double obj = 0.0;
    for (std::size_t j = 0; j < prob.inputs.size(); ++j) {
      const double d = adapted_distance(prob.inputs[i], prob.inputs[j], 2.0).value;
      obj += prob.weights[j] * d * d;
    }
    if (i == 0 || obj < best_input) {
      best_input = obj;
      best_idx = static_cast<int>(i);
    }
  }
  const BarycenterResult bary = barycenter(prob, prob.inputs[best_idx], 50, 1e-10);
  bool monotone = true;
  for (std::size_t i = 1; i < bary.trace.size(); ++i)
    if (bary.trace[i] > bary.trace[i - 1] + 1e-10) monotone = false;
  demo_check_bool(rows, "barycenter: monotone trace", true, monotone);
  demo_check_bool(rows, "barycenter: beats best input", true,
                  bary.objective <= best_input + 1e-10);

  // Seeded spot checks: symmetry and triangle inequality on random laws.
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> coin(0, 4);
  const auto random_law = [&]() {
    PathLaw law;
    law.horizon = 2;
    law.dim = 1;
    const double w = 0.25 * (1 + coin(rng) % 3);
    law.support = {{w, {{0.0}, {coin(rng) - 2.0}}}, {1.0 - w, {{1.0}, {coin(rng) - 2.0}}}};
    law.merge_duplicates();
    return law;
  };
  bool sym_ok = true, tri_ok = true;
  for (int k = 0; k < 20; ++k) {
    const FilteredProcess a = plain_process(random_law());
    const FilteredProcess b = plain_process(random_law());
    const FilteredProcess c = plain_process(random_law());
    const double ab = adapted_distance(a, b, 2.0).value;
    const double ba = adapted_distance(b, a, 2.0).value;
    const double ac = adapted_distance(a, c, 2.0).value;
    const double cb = adapted_distance(c, b, 2.0).value;
    if (std::abs(ab - ba) > 1e-12) sym_ok = false;
    if (ab > ac + cb + 1e-9) tri_ok = false;
  }
  demo_check_bool(rows, "random corpus: symmetry", true, sym_ok);
  demo_check_bool(rows, "random corpus: triangle inequality", true, tri_ok);

  std::ostringstream table;
  table << "name,expected,actual,result\n";
  bool all_pass = true;
  for (const auto& row : rows) {
    table << row.name << "," << row.expected << "," << row.actual << ","
          << (row.pass ? "PASS" : "FAIL") << "\n";
    all_pass = all_pass && row.pass;
  }
  std::cout << table.str();
  if (!out_path.empty()) write_file(out_path, table.str());
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adapted Wasserstein distances for finite filtered processes"};
  app.require_subcommand(1);

  int threads = 0;
  app.add_option("--threads", threads, "bound on internal parallelism");

  std::string in_a, in_b, out_path, coupling_path, grid_path, cost_spec = "demo-sec6";
  std::string samples_spec, weights_spec = "";
  double p = 2.0;
  int rank_n = 0, construct_n = 0, iters = 50;
  double tol = 1e-10;
  unsigned seed = 1;

  auto* validate_cmd = app.add_subcommand("validate", "check a process file");
  validate_cmd->add_option("input", in_a)->required();

  auto* canon_cmd = app.add_subcommand("canon", "canonical nested distribution");
  canon_cmd->add_option("input", in_a)->required();
  canon_cmd->add_option("-o,--out", out_path);

  auto* dist_cmd = app.add_subcommand("dist", "adapted distance between two processes");
  dist_cmd->add_option("a", in_a)->required();
  dist_cmd->add_option("b", in_b)->required();
  dist_cmd->add_option("--p", p);
  dist_cmd->add_option("--coupling", coupling_path, "write the optimal coupling as CSV");

  auto* stop_cmd = app.add_subcommand("stop", "optimal stopping value");
  stop_cmd->add_option("input", in_a)->required();
  stop_cmd->add_option("--cost", cost_spec, "cost JSON file or 'demo-sec6'");
  stop_cmd->add_option("--p", p);

  auto* doob_cmd = app.add_subcommand("doob", "Doob decomposition (M_t, A_t)");
  doob_cmd->add_option("input", in_a)->required();
  doob_cmd->add_option("-o,--out", out_path);

  auto* geo_cmd = app.add_subcommand("geodesic", "interpolation family summary");
  geo_cmd->add_option("a", in_a)->required();
  geo_cmd->add_option("b", in_b)->required();
  geo_cmd->add_option("--p", p);
  geo_cmd->add_option("--samples", samples_spec, "comma-separated u values");
  geo_cmd->add_option("-o,--out", out_path);

  auto* bary_cmd = app.add_subcommand("barycenter", "fixed-skeleton barycenter iteration");
  std::vector<std::string> bary_inputs;
  bary_cmd->add_option("inputs", bary_inputs)->required()->expected(-1);
  bary_cmd->add_option("--weights", weights_spec, "comma-separated convex weights");
  bary_cmd->add_option("--p", p);
  bary_cmd->add_option("--iters", iters);
  bary_cmd->add_option("--tol", tol);
  bary_cmd->add_option("-o,--out", out_path, "trace CSV");
  bary_cmd->add_option("--out-process", coupling_path, "final process JSON");

  auto* quant_cmd = app.add_subcommand("quantize", "nearest-point quantization");
  quant_cmd->add_option("input", in_a)->required();
  quant_cmd->add_option("--grid", grid_path)->required();
  quant_cmd->add_option("--p", p);
  quant_cmd->add_option("-o,--out", out_path);

  auto* rank_cmd = app.add_subcommand("rank", "rank equivalence / separating pairs");
  rank_cmd->add_option("a", in_a);
  rank_cmd->add_option("b", in_b);
  rank_cmd->add_option("--n", rank_n, "rank to test");
  rank_cmd->add_option("--construct", construct_n, "emit the separating pair for horizon N");
  rank_cmd->add_option("-o,--out", out_path, "output prefix for constructed pair");

  auto* demo_cmd = app.add_subcommand("demo", "reproduce the worked examples");
  demo_cmd->add_option("--seed", seed);
  demo_cmd->add_option("-o,--out", out_path, "summary CSV");

  CLI11_PARSE(app, argc, argv);

  if (threads == 0) {
    if (const char* env = std::getenv("ADAPTED_OT_THREADS")) threads = std::atoi(env);
  }
  if (threads > 0) aw::set_thread_limit(threads);

  try {
    using namespace aw;
    if (validate_cmd->parsed()) {
      process_from_json(read_file(in_a));  // validates, throws otherwise
      std::cout << "ok\n";
      return 0;
    }
    if (canon_cmd->parsed()) {
      const std::string out = nested_to_json(nested_distribution(load_process(in_a)));
      if (out_path.empty())
        std::cout << out << "\n";
      else
        write_file(out_path, out);
      return 0;
    }
    if (dist_cmd->parsed()) {
      const AdaptedDistanceResult res = adapted_distance(load_process(in_a), load_process(in_b), p);
      std::cout << format_double(res.value) << "\n";
      if (!coupling_path.empty()) {
        std::ofstream os(coupling_path);
        write_coupling_csv(os, flatten(res.plan).coupling);
      }
      return 0;
    }
    if (stop_cmd->parsed()) {
      const FilteredProcess proc = load_process(in_a);
      const StoppingCost cost = cost_spec == "demo-sec6"
                                    ? demo_sec6_cost(proc.horizon)
                                    : cost_from_json(read_file(cost_spec), proc.horizon);
      std::cout << format_double(snell(proc, cost).value) << "\n";
      return 0;
    }
    if (doob_cmd->parsed()) {
      const std::string out = process_to_json(doob_process(load_process(in_a)));
      if (out_path.empty())
        std::cout << out << "\n";
      else
        write_file(out_path, out);
      return 0;
    }
    if (geo_cmd->parsed()) {
      const InterpolationFamily family =
          make_interpolation(load_process(in_a), load_process(in_b), p);
      std::vector<double> us =
          samples_spec.empty() ? std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0}
                               : parse_list(samples_spec);
      std::vector<FilteredProcess> procs;
      for (double u : us) procs.push_back(family.at(u));
      std::ostringstream os;
      write_interpolation_csv(os, us, procs);
      if (out_path.empty())
        std::cout << os.str();
      else
        write_file(out_path, os.str());
      std::cout << "distance," << format_double(family.distance) << "\n";
      return 0;
    }
    if (bary_cmd->parsed()) {
      BarycenterProblem problem;
      for (const auto& path : bary_inputs) problem.inputs.push_back(load_process(path));
      problem.p = p;
      problem.weights =
          weights_spec.empty()
              ? std::vector<double>(problem.inputs.size(), 1.0 / problem.inputs.size())
              : parse_list(weights_spec);
      const BarycenterResult res = barycenter(problem, problem.inputs.front(), iters, tol);
      std::ostringstream os;
      write_trace_csv(os, res.trace);
      if (out_path.empty())
        std::cout << os.str();
      else
        write_file(out_path, os.str());
      std::cout << "objective," << format_double(res.objective) << "\n";
      if (!coupling_path.empty()) write_file(coupling_path, process_to_json(res.process));
      return 0;
    }
    if (quant_cmd->parsed()) {
      const FilteredProcess proc = load_process(in_a);
      const QuantizationGrid grid = grid_from_json(read_file(grid_path));
      const FilteredProcess quantized = quantize(proc, grid);
      const double bound = quantize_diagonal_bound(proc, grid, p);
      const double measured = adapted_distance(proc, quantized, p).value;
      if (out_path.empty())
        std::cout << process_to_json(quantized) << "\n";
      else
        write_file(out_path, process_to_json(quantized));
      std::cout << "bound," << format_double(bound) << "\n";
      std::cout << "distance," << format_double(measured) << "\n";
      return 0;
    }
    if (rank_cmd->parsed()) {
      if (construct_n > 0) {
        const RankPair pair = rank_separating_pair(construct_n);
        const std::string prefix = out_path.empty() ? "rank_pair" : out_path;
        write_file(prefix + "_x.json", process_to_json(pair.x));
        write_file(prefix + "_y.json", process_to_json(pair.y));
        write_file(prefix + "_witness.json", af_to_json(pair.witness));
        std::cout << "witness_gap,"
                  << format_double(std::abs(expectation(pair.witness, pair.x) -
                                            expectation(pair.witness, pair.y)))
                  << "\n";
        return 0;
      }
      if (in_a.empty() || in_b.empty())
        throw SchemaError("rank: provide two processes or --construct N");
      const bool eq = equivalent_rank(load_process(in_a), load_process(in_b), rank_n);
      std::cout << (eq ? "true" : "false") << "\n";
      return 0;
    }
    if (demo_cmd->parsed()) return run_demo(seed, out_path);
  } catch (const std::exception& e) {
    std::cout << "{\"error\": {\"message\": \"" << e.what() << "\"}}\n";
    return 1;
  }
  return 0;
}
