#include "algred/sampling.hpp"

#include <stdexcept>

namespace algred {

namespace {
std::vector<unsigned> first_primes(std::size_t count) {
  std::vector<unsigned> primes;
  for (unsigned c = 2; primes.size() < count; ++c) {
    bool prime = true;
    for (unsigned p : primes) {
      if (p * p > c) break;
      if (c % p == 0) {
        prime = false;
        break;
      }
    }
    if (prime) primes.push_back(c);
  }
  return primes;
}
}  // namespace

Box Box::uniform(std::size_t dim, double lo, double hi) { return Box{std::vector<Interval>(dim, {lo, hi})}; }

Point Box::center() const {
  Point c;
  for (const auto& [lo, hi] : bounds) c.push_back(0.5 * (lo + hi));
  return c;
}

double radical_inverse(std::uint64_t index, unsigned base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % base);
    index /= base;
    f /= base;
  }
  return result;
}

std::vector<Point> sample_points(const Box& box, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw std::invalid_argument("sample count must be positive");
  const auto primes = first_primes(box.dim());
  std::vector<Point> pts;
  pts.reserve(count);
  pts.push_back(box.center());
  for (std::size_t i = 1; i < count; ++i) {
    Point p(box.dim());
    for (std::size_t d = 0; d < box.dim(); ++d) {
      const auto [lo, hi] = box.bounds[d];
      p[d] = lo + radical_inverse(seed + i, primes[d]) * (hi - lo);
    }
    pts.push_back(std::move(p));
  }
  return pts;
}

}  // namespace algred
