#pragma once

// Independent brute-force references used by the property tests. These never
// call into the library's selection, knn or scoring code.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "sunny/matrix.hpp"
#include "sunny/scenario.hpp"

namespace sunny::testing {

// Enumerates every non-empty subset as a bitmask and keeps the best by
// (coverage desc, cardinality asc, summed best-in-set runtime asc,
// lexicographic sorted index list).
inline std::vector<AlgorithmIndex> brute_force_subset(const Scenario& s, std::span<const InstanceIndex> nb) {
  const std::size_t m = s.num_algorithms();
  struct Candidate {
    std::size_t cover;
    std::size_t size;
    double time;
    std::vector<AlgorithmIndex> members;
  };
  std::vector<Candidate> all;
  for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
    Candidate c{0, 0, 0.0, {}};
    for (std::size_t a = 0; a < m; ++a) {
      if (mask & (1u << a)) c.members.push_back(a);
    }
    c.size = c.members.size();
    for (auto i : nb) {
      double best = s.timeout();
      bool hit = false;
      for (auto a : c.members) {
        if (s.solved(i, a)) {
          hit = true;
          best = std::min(best, s.runtime(i, a));
        }
      }
      c.cover += hit;
      c.time += best;
    }
    all.push_back(std::move(c));
  }
  const auto best = std::min_element(all.begin(), all.end(), [](const Candidate& x, const Candidate& y) {
    if (x.cover != y.cover) return x.cover > y.cover;
    if (x.size != y.size) return x.size < y.size;
    if (x.time != y.time) return x.time < y.time;
    return x.members < y.members;
  });
  if (best->cover == 0) return {};
  return best->members;
}

// All distances computed, then a stable sort by distance.
inline std::vector<std::size_t> brute_force_knn(std::span<const double> q, const Matrix<double>& pts, std::size_t k) {
  std::vector<double> dist(pts.rows());
  for (std::size_t r = 0; r < pts.rows(); ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < pts.cols(); ++c) acc += (q[c] - pts(r, c)) * (q[c] - pts(r, c));
    dist[r] = acc;
  }
  std::vector<std::size_t> idx(pts.rows());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });
  idx.resize(std::min(k, idx.size()));
  return idx;
}

}  // namespace sunny::testing
