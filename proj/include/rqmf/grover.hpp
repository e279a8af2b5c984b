#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "rqmf/comparator.hpp"

namespace rqmf {

/// Grover run on a list of `list_size` entries with `marked_count` marked, `iterations` times.
struct GroverParams {
  std::size_t list_size = 1;
  std::size_t marked_count = 0;
  std::size_t iterations = 0;

  void validate() const;
};

/// Result of one exponential search.
struct SearchOutcome {
  Index result_index = 0;
  double search_time = 0.0;  // sum of g, plus b*log2(N') per measurement when b = 1
  bool found_marked = false;
};

class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

constexpr double kUnbounded = std::numeric_limits<double>::infinity();
constexpr std::size_t kStatevectorLimit = 1024;

/// Probability that measuring after `iterations` Grover steps yields a marked entry:
/// sin^2((2g+1) theta), sin^2 theta = t / N'.
double success_probability(const GroverParams& params);

/// Measurement after a Grover run with the given marked set. With probability
/// success_probability the result is uniform over the marked entries, otherwise uniform
/// over the rest. Charges 2 quantum queries per iteration to `state`.
Index sample_measurement(Comparator& state, const GroverParams& params, const MarkedSet& marked);

/// Measurement distribution after g Grover iterations from the uniform state, computed
/// on a dense amplitude vector (phase flip on marked entries, then inversion about the
/// mean). Test reference only.
std::vector<double> statevector_reference(std::size_t list_size, std::span<const Index> marked,
                                          std::size_t iterations);

/// Exponential search with an iteration cutoff over a list of `extended_size` entries
/// (the comparator's elements followed by dummies). `counting_log` adds log2(N') to the
/// search time per measurement. Throws std::invalid_argument when the cutoff is
/// unbounded and nothing is marked.
SearchOutcome qsearch_with_cutoff(Comparator& state, Index pivot, double cutoff,
                                  bool counting_log, std::size_t extended_size);

}  // namespace rqmf
