#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "algred/expr.hpp"

namespace algred {

using Interval = std::pair<double, double>;

struct Box {
  std::vector<Interval> bounds;

  static Box uniform(std::size_t dim, double lo = -1.0, double hi = 1.0);
  std::size_t dim() const { return bounds.size(); }
  Point center() const;
};

// Radical inverse of `index` in base `base`.
double radical_inverse(std::uint64_t index, unsigned base);

// The first point is the box center; point i >= 1 is the Halton point with
// index seed + i.
std::vector<Point> sample_points(const Box& box, std::size_t count, std::uint64_t seed);

}  // namespace algred
