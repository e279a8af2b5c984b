#pragma once
// Brute-force reference computations shared by the unit tests. Deliberately naive and
// independent of the library's own algorithms.
#include <cmath>
#include <cstddef>
#include <set>
#include <vector>

namespace oracle {

inline std::size_t rank(const std::vector<double>& v, std::size_t j) {
  std::size_t r = 1;
  for (double x : v) r += x < v[j] ? 1 : 0;
  return r;
}

inline std::set<std::size_t> fudge(const std::vector<double>& v, std::size_t j) {
  std::set<std::size_t> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i != j && std::abs(v[i] - v[j]) <= 1.0) out.insert(i);
  }
  return out;
}

inline std::size_t delta(const std::vector<double>& v) {
  std::size_t m = 0;
  for (std::size_t j = 0; j < v.size(); ++j) m = std::max(m, fudge(v, j).size());
  return (m + 1) / 2;
}

// Grover iterate restricted to the two class amplitudes (marked a, unmarked b per entry).
inline double grover_marked_probability(std::size_t n, std::size_t t, std::size_t g) {
  if (t == 0) return 0.0;
  if (t == n) return 1.0;
  double a = 1.0 / std::sqrt(double(n)), b = a;
  for (std::size_t k = 0; k < g; ++k) {
    a = -a;
    const double mean = (double(t) * a + double(n - t) * b) / double(n);
    a = 2 * mean - a;
    b = 2 * mean - b;
  }
  return double(t) * a * a;
}

}  // namespace oracle
