#pragma once

#include <vector>

#include "aw/distance.hpp"

namespace aw {

/// Finite codebook per time step; nearest-point ties break to the lowest
/// grid index.
struct QuantizationGrid {
  std::vector<std::vector<Vec>> levels;
};

/// Maps every node value of the canonical tree to its nearest grid point and
/// merges the children that become equal. The result is a valid process on a
/// coarser tree.
FilteredProcess quantize(const FilteredProcess& proc, const QuantizationGrid& grid);

/// Cost of the diagonal (graph) coupling between proc and its quantized
/// image: (sum_t E d^p(X_t, phi_t(X_t)))^(1/p). This is bicausal, so it upper
/// bounds the adapted distance to the quantized process.
double quantize_diagonal_bound(const FilteredProcess& proc, const QuantizationGrid& grid,
                               double p);

/// Greedy per-level covering of the occurring values with radius at most
/// radius; every occurring value has a grid point within radius.
QuantizationGrid covering_grid(const FilteredProcess& proc, double radius);

/// plain_process of the empirical path law, quantized onto the grid.
FilteredProcess adapted_empirical(const std::vector<std::pair<double, Path>>& samples,
                                  const QuantizationGrid& grid);

/// Per level, a block label per tree node (x and y sides share the label
/// space; equal atoms may share blocks). The block weight tables of the
/// product-form reconstruction are derived from the coupling itself.
struct BlockPartition {
  std::vector<std::vector<int>> x_blocks;  // [t][node]
  std::vector<std::vector<int>> y_blocks;
};

BlockPartition singleton_blocks(const BicausalCoupling& plan);
BlockPartition level_blocks(const BicausalCoupling& plan);  // one block per level
/// Clusters the union of both sides' nodes so that each block has nested
/// (Z_t) diameter at most eps.
BlockPartition diameter_blocks(const BicausalCoupling& plan, double eps);

/// Product-form reconstruction: within each block pair, mass splits as the
/// product of the conditional laws weighted by the block weights read off the
/// input plan (unmatched histories fall back to the independent kernel).
/// Singleton blocks reproduce the plan exactly.
BicausalCoupling block_approximate(const BicausalCoupling& plan, const BlockPartition& blocks);

/// Pulls a plan on the canonical forms back to a coupling of the original
/// sample spaces via the product density over matched node chains. The
/// result is bicausal and pushes forward through the information processes
/// to flatten(plan). Requires the plan to be built from the two processes'
/// nested distributions.
RawCoupling pullback_coupling(const BicausalCoupling& plan, const FilteredProcess& x,
                              const FilteredProcess& y);

}  // namespace aw
