#pragma once

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>
#include <vector>

#include "cpdr/types.hpp"

namespace cpdr {

struct SliceAssignment {
  std::vector<int> labels;       // one per sample, in 1..K, monotone in y
  int K = 0;                     // number of slices actually used
  std::vector<int> counts;       // per-slice sample counts, all >= 1
  std::vector<double> boundaries;  // continuous case: first y of each upper slice
};

// Discretizes the response. A response with at most H distinct values gets one
// slice per value; otherwise the sorted response is cut into H equal-count
// quantile slices at ranks floor(n*k/H), with boundary ties pushed into the
// lower slice and emptied slices merged away.
inline SliceAssignment slice_response(const Eigen::Ref<const Vector>& y, int H) {
  const Eigen::Index n = y.size();
  if (H < 2) throw std::invalid_argument("at least two slices required");
  if (n < H) throw std::invalid_argument("fewer samples than requested slices");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return y(a) < y(b); });

  if (y(order.front()) == y(order.back()))
    throw std::invalid_argument("response has a single value");

  SliceAssignment out;
  out.labels.assign(static_cast<std::size_t>(n), 0);

  // distinct-value slicing for responses with small finite support
  std::vector<double> distinct;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v = y(order[static_cast<std::size_t>(i)]);
    if (distinct.empty() || v != distinct.back()) distinct.push_back(v);
    if (static_cast<int>(distinct.size()) > H) break;
  }
  if (static_cast<int>(distinct.size()) <= H) {
    out.K = static_cast<int>(distinct.size());
    out.counts.assign(static_cast<std::size_t>(out.K), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double v = y(i);
      const int k = static_cast<int>(
          std::lower_bound(distinct.begin(), distinct.end(), v) - distinct.begin());
      out.labels[static_cast<std::size_t>(i)] = k + 1;
      ++out.counts[static_cast<std::size_t>(k)];
    }
    return out;
  }

  // quantile slicing: cut positions in the sorted order, ties to the lower slice
  std::set<Eigen::Index> cuts;
  for (int k = 1; k < H; ++k) {
    Eigen::Index b = n * k / H;
    while (b > 0 && b < n && y(order[static_cast<std::size_t>(b)]) ==
                                 y(order[static_cast<std::size_t>(b - 1)]))
      ++b;  // value spans the boundary: keep it whole in the lower slice
    if (b > 0 && b < n) cuts.insert(b);
  }

  out.K = static_cast<int>(cuts.size()) + 1;
  out.counts.reserve(static_cast<std::size_t>(out.K));
  out.boundaries.reserve(cuts.size());
  Eigen::Index prev = 0;
  int label = 1;
  auto assign = [&](Eigen::Index from, Eigen::Index to) {
    for (Eigen::Index i = from; i < to; ++i)
      out.labels[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = label;
    out.counts.push_back(static_cast<int>(to - from));
  };
  for (Eigen::Index b : cuts) {
    assign(prev, b);
    out.boundaries.push_back(y(order[static_cast<std::size_t>(b)]));
    prev = b;
    ++label;
  }
  assign(prev, n);
  return out;
}

}  // namespace cpdr
