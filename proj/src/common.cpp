#include "aw/common.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

namespace aw {

double dist(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dist: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

double dist_pow(const Vec& a, const Vec& b, double p) {
  if (a.size() != b.size()) throw std::invalid_argument("dist_pow: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  if (s == 0.0) return 0.0;
  return std::pow(s, 0.5 * p);
}

int compare_vec(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return -1;
    if (a[i] > b[i]) return 1;
  }
  return 0;
}

int compare_path(const Path& a, const Path& b) {
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (int c = compare_vec(a[i], b[i]); c != 0) return c;
  }
  return 0;
}

double path_cost_pow(const Path& a, const Path& b, double p) {
  if (a.size() != b.size()) throw std::invalid_argument("path_cost_pow: horizon mismatch");
  double s = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) s += dist_pow(a[t], b[t], p);
  return s;
}

namespace {
std::atomic<int> g_thread_limit{0};  // 0 = hardware default
}

void set_thread_limit(int n) { g_thread_limit.store(n > 0 ? n : 0); }

int thread_limit() {
  int n = g_thread_limit.load();
  if (n > 0) return n;
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_for(int n, const std::function<void(int)>& fn) {
  const int workers = std::min(thread_limit(), n);
  if (workers <= 1 || n < 32) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::atomic<int> next{0};
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        int i = next.fetch_add(1);
        if (i >= n) break;
        fn(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace aw
