#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "aw/analytics.hpp"
#include "aw/distance.hpp"
#include "aw/logic.hpp"
#include "aw/quantize.hpp"

namespace aw {

/// Thrown on malformed input files; the CLI maps it to an error JSON.
struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Process files:
// {"horizon": N, "dim": d,
//  "atoms": [{"prob": w, "path": [[x_1,..,x_d], ...]}, ...],
//  "filtration": [[cell id per atom], ... one per time]}
// Weights are normalized when they sum to 1 within 1e-9 and rejected
// otherwise.
std::string process_to_json(const FilteredProcess& proc);
FilteredProcess process_from_json(const std::string& text);

// Nested distributions: {"atoms": [{"w":, "v": [..], "children": [...]}]}
std::string nested_to_json(const NestedDistribution& nd);
NestedDistribution nested_from_json(const std::string& text);

// Grids: {"levels": [[point, ...], ...]}; points are arrays, bare numbers
// are accepted for one-dimensional grids.
std::string grid_to_json(const QuantizationGrid& grid);
QuantizationGrid grid_from_json(const std::string& text);

// Adapted-function expressions, e.g.
//   {"op":"cond","t":1,"arg":{"op":"clamp","lo":0,"hi":1,
//                             "arg":{"op":"proj","t":2}}}
// Ops: proj (t, coord), const (value), clamp (lo, hi, arg), power (k, arg),
// abs (arg), min/max (args), abs-diff (args), linear (coeffs, bias, args),
// cond (t, arg).
AdaptedFunction af_from_json(const std::string& text);
std::string af_to_json(const AdaptedFunction& f);

// Stopping costs: {"stages": [expr, ...]} with rank-0 expressions, or the
// named cost "demo-sec6" for a given horizon.
StoppingCost cost_from_json(const std::string& text, int horizon);
StoppingCost demo_sec6_cost(int horizon);

/// Path samples: one row per path (horizon*dim values, optional trailing
/// weight column). Unweighted rows count once each.
std::vector<std::pair<double, Path>> samples_from_csv(std::istream& in, int horizon, int dim);

// CSV emission (17 significant digits).
std::string format_double(double v);
void write_coupling_csv(std::ostream& os, const RawCoupling& coupling);
void write_trace_csv(std::ostream& os, const std::vector<double>& trace);
void write_interpolation_csv(std::ostream& os, const std::vector<double>& us,
                             const std::vector<FilteredProcess>& procs);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace aw
