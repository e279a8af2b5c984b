#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rqmf/comparator.hpp"
#include "rqmf/grover.hpp"

namespace rqmf {

/// Constants fixed by list size n, density delta and failure probability.
struct DerivedConstants {
  std::size_t n_p = 0;           // ceil(log(n / (4 delta + 3)) / log(3/2)), floored at 0
  std::size_t n_trials = 0;      // ceil(8 max(n_p, 2 ln n))
  double t_max = 0.0;            // 22.5 sqrt(n) + 1.4 log2(n)^2
  double cutoff = 0.0;           // 9 sqrt(n / (1 + delta))
  std::size_t t_tilde = 0;       // 19 delta + 16
  std::size_t k_dummies = 0;     // 2 delta
  std::size_t stage1_reps = 0;   // ceil(log4(2 / delta_prob))
  std::size_t stage2_iters = 0;  // ceil(2 ln 2 log2(4 / delta_prob) t_tilde)
};

/// Throws std::invalid_argument unless n > 2(1 + delta) and 0 < delta_prob < 1.
DerivedConstants derived_constants(std::size_t n, std::size_t delta, double delta_prob);

/// Pivot sequence of one PivotQMF run. `attempted[k]` is the pivot fed into round k;
/// `successful` lists the pivots of the rounds that found a marked element, in order.
struct PivotTrace {
  std::vector<Index> attempted;
  std::vector<Index> successful;
  Index final_pivot = 0;
};

struct PivotResult {
  Index index = 0;
  PivotTrace trace;
};

struct RepeatedResult {
  Index index = 0;
  std::vector<Index> pool;  // distinct Stage-I outputs, ascending
};

struct RobustResult {
  Index index = 0;
  Index stage1_output = 0;
  std::vector<Index> pool;  // Stage-III input: distinct, no dummies, ascending
};

/// Real list of `real_size` entries followed by `dummy_count` always-marked dummies.
struct ExtendedList {
  std::size_t real_size = 0;
  std::size_t dummy_count = 0;

  std::size_t size() const { return real_size + dummy_count; }
  bool is_dummy(Index j) const { return j >= real_size && j < size(); }
};

ExtendedList extend_with_dummies(std::size_t n, std::size_t k);

/// Duerr-Hoyer minimum finding with the T_max run-time budget and log counting on.
/// Intended for an exact comparator; any comparator is accepted.
Index qmf_noiseless(Comparator& state);

/// Pivot-counting minimum finding: n_trials cutoff searches, moving the pivot on each hit.
PivotResult pivot_qmf(Comparator& state, std::size_t delta, std::size_t n_trials);

/// Stage I: stage1_reps independent PivotQMF runs; Stage II: tournament over the pool.
RepeatedResult repeated_pivot_qmf(Comparator& state, double delta_prob, std::size_t delta);

/// RepeatedPivotQMF at delta_prob/2, then stage2_iters cutoff searches below that output
/// on the list extended by 2 delta dummies, then a tournament over everything found.
RobustResult robust_qmf(Comparator& state, double delta_prob, std::size_t delta);

/// Round-robin tournament: every unordered pair of the (deduplicated) pool is compared
/// once and the element with the most wins is returned, ties to the smaller index.
/// `delta_prob` is accepted for interface parity; the tournament is deterministic.
Index min_select(Comparator& state, std::span<const Index> pool, double delta_prob);

}  // namespace rqmf
