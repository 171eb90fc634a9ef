#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace aw {

/// Point in the state space R^d.
using Vec = std::vector<double>;
/// A path: one point per time step 1..N.
using Path = std::vector<Vec>;

/// Euclidean distance between two points of equal dimension.
double dist(const Vec& a, const Vec& b);

/// Euclidean distance raised to the p-th power. Computed as (|a-b|^2)^(p/2)
/// so that p = 2 incurs no square-root round trip.
double dist_pow(const Vec& a, const Vec& b, double p);

/// Lexicographic three-way comparison (size first, then entries).
int compare_vec(const Vec& a, const Vec& b);
int compare_path(const Path& a, const Path& b);

/// Sum of per-time d^p terms between two paths of equal horizon.
double path_cost_pow(const Path& a, const Path& b, double p);

/// Bounds the number of worker threads used by parallel_for.
void set_thread_limit(int n);
int thread_limit();

/// Runs fn(0..n-1), possibly on several threads. Results must not depend on
/// scheduling; callers write to disjoint slots.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace aw
