#include "rqmf/grover.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rqmf {

void GroverParams::validate() const {
  if (list_size == 0) throw std::invalid_argument("Grover list size must be positive");
  if (marked_count > list_size) {
    throw std::invalid_argument("marked count " + std::to_string(marked_count) +
                                " exceeds list size " + std::to_string(list_size));
  }
}

double success_probability(const GroverParams& params) {
  params.validate();
  if (params.marked_count == 0) return 0.0;
  if (params.marked_count == params.list_size) return 1.0;
  const double theta = std::asin(std::sqrt(static_cast<double>(params.marked_count) /
                                           static_cast<double>(params.list_size)));
  const double s = std::sin(static_cast<double>(2 * params.iterations + 1) * theta);
  return s * s;
}

Index sample_measurement(Comparator& state, const GroverParams& params, const MarkedSet& marked) {
  params.validate();
  if (marked.size() != params.marked_count || marked.list_size() != params.list_size) {
    throw std::invalid_argument("Grover params disagree with the marked set");
  }
  state.add_quantum_queries(2 * static_cast<std::uint64_t>(params.iterations));
  auto& rng = state.rng();
  if (rng.bernoulli(success_probability(params))) {
    return marked.marked_at(rng.uniform_index(marked.size()));
  }
  return marked.unmarked_at(rng.uniform_index(marked.unmarked()));
}

std::vector<double> statevector_reference(std::size_t list_size, std::span<const Index> marked,
                                          std::size_t iterations) {
  if (list_size == 0) throw std::invalid_argument("statevector list size must be positive");
  if (list_size > kStatevectorLimit) {
    throw CapacityError("statevector reference limited to " + std::to_string(kStatevectorLimit) +
                        " entries, got " + std::to_string(list_size));
  }
  std::vector<bool> flip(list_size, false);
  for (Index j : marked) {
    if (j >= list_size) throw std::out_of_range("marked index outside the list");
    flip[j] = true;
  }
  const double n = static_cast<double>(list_size);
  std::vector<double> amp(list_size, 1.0 / std::sqrt(n));
  for (std::size_t g = 0; g < iterations; ++g) {
    for (std::size_t j = 0; j < list_size; ++j) {
      if (flip[j]) amp[j] = -amp[j];
    }
    double mean = 0.0;
    for (double a : amp) mean += a;
    mean /= n;
    for (double& a : amp) a = 2.0 * mean - a;
  }
  for (double& a : amp) a *= a;
  return amp;
}

SearchOutcome qsearch_with_cutoff(Comparator& state, Index pivot, double cutoff, bool counting_log,
                                  std::size_t extended_size) {
  const std::size_t n = state.size();
  if (extended_size < n) throw std::invalid_argument("extended list smaller than the comparator");
  if (pivot >= n) throw std::out_of_range("pivot out of range");
  if (!(cutoff >= 0.0)) throw std::invalid_argument("cutoff must be non-negative");

  auto& rng = state.rng();
  SearchOutcome out;
  out.result_index = rng.uniform_index(extended_size);
  out.found_marked = state.oracle_bit(pivot, out.result_index);
  if (out.found_marked) return out;

  // Every Grover iteration queries all indices at once, which commits the whole row.
  const MarkedSet marked = state.marked_set(pivot, extended_size - n);
  if (marked.size() == 0 && std::isinf(cutoff)) {
    throw std::invalid_argument("unbounded search for a pivot with no marked element");
  }

  const double size = static_cast<double>(extended_size);
  const double log_term = counting_log ? std::log2(size) : 0.0;
  const double m_cap = std::sqrt(size);
  constexpr double kGrowth = 6.0 / 5.0;
  double m = 1.0;
  while (!out.found_marked && out.search_time <= cutoff) {
    const auto range = static_cast<std::uint64_t>(std::ceil(m));
    const std::size_t g = rng.uniform_index(range);
    out.result_index = sample_measurement(state, {extended_size, marked.size(), g}, marked);
    out.search_time += static_cast<double>(g) + log_term;
    m = std::min(kGrowth * m, m_cap);
    out.found_marked = state.oracle_bit(pivot, out.result_index);
  }
  return out;
}

}  // namespace rqmf
