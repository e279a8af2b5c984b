#include "rqmf/minfind.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rqmf {

namespace {

// Ceiling that ignores rounding noise just above an integer (log4(4) == 1 exactly).
std::size_t ceil_count(double x) {
  if (x <= 0.0) return 0;
  const double r = std::round(x);
  if (std::abs(x - r) < 1e-9) return static_cast<std::size_t>(r);
  return static_cast<std::size_t>(std::ceil(x));
}

void require_dense_enough(std::size_t n, std::size_t delta) {
  if (!(n > 2 * (1 + delta))) {
    throw std::invalid_argument("requires n > 2(1 + delta): n = " + std::to_string(n) +
                                ", delta = " + std::to_string(delta));
  }
}

void require_probability(double delta_prob) {
  if (!(delta_prob > 0.0 && delta_prob < 1.0)) {
    throw std::invalid_argument("requires 0 < delta_prob < 1, got " + std::to_string(delta_prob));
  }
}

std::vector<Index> distinct_sorted(std::vector<Index> pool) {
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
  return pool;
}

double pivot_cutoff(std::size_t n, std::size_t delta) {
  return 9.0 * std::sqrt(static_cast<double>(n) / static_cast<double>(1 + delta));
}

}  // namespace

DerivedConstants derived_constants(std::size_t n, std::size_t delta, double delta_prob) {
  require_dense_enough(n, delta);
  require_probability(delta_prob);
  const double nd = static_cast<double>(n);
  DerivedConstants c;
  c.n_p = ceil_count(std::log(nd / static_cast<double>(4 * delta + 3)) / std::log(1.5));
  c.n_trials = ceil_count(8.0 * std::max(static_cast<double>(c.n_p), 2.0 * std::log(nd)));
  const double lg = std::log2(nd);
  c.t_max = 22.5 * std::sqrt(nd) + 1.4 * lg * lg;
  c.cutoff = pivot_cutoff(n, delta);
  c.t_tilde = 19 * delta + 16;
  c.k_dummies = 2 * delta;
  c.stage1_reps = ceil_count(std::log2(2.0 / delta_prob) / 2.0);
  c.stage2_iters = ceil_count(2.0 * std::log(2.0) * std::log2(4.0 / delta_prob) *
                              static_cast<double>(c.t_tilde));
  return c;
}

ExtendedList extend_with_dummies(std::size_t n, std::size_t k) { return {n, k}; }

Index qmf_noiseless(Comparator& state) {
  const std::size_t n = state.size();
  const double nd = static_cast<double>(n);
  const double lg = std::log2(nd);
  const double t_max = 22.5 * std::sqrt(nd) + 1.4 * lg * lg;

  Index pivot = state.rng().uniform_index(n);
  double elapsed = 0.0;
  while (elapsed <= t_max) {
    const auto out = qsearch_with_cutoff(state, pivot, t_max - elapsed, true, n);
    elapsed += out.search_time;
    if (out.found_marked) pivot = out.result_index;
  }
  return pivot;
}

PivotResult pivot_qmf(Comparator& state, std::size_t delta, std::size_t n_trials) {
  const std::size_t n = state.size();
  require_dense_enough(n, delta);
  const double cutoff = pivot_cutoff(n, delta);

  PivotResult result;
  Index pivot = state.rng().uniform_index(n);
  result.trace.attempted.reserve(n_trials);
  for (std::size_t k = 0; k < n_trials; ++k) {
    result.trace.attempted.push_back(pivot);
    // The search time is not used: the budget here is the number of rounds.
    const auto out = qsearch_with_cutoff(state, pivot, cutoff, false, n);
    if (out.found_marked) {
      result.trace.successful.push_back(pivot);
      pivot = out.result_index;
    }
  }
  result.index = pivot;
  result.trace.final_pivot = pivot;
  return result;
}

RepeatedResult repeated_pivot_qmf(Comparator& state, double delta_prob, std::size_t delta) {
  const auto c = derived_constants(state.size(), delta, delta_prob);
  std::vector<Index> pool;
  pool.reserve(c.stage1_reps);
  for (std::size_t i = 0; i < c.stage1_reps; ++i) {
    pool.push_back(pivot_qmf(state, delta, c.n_trials).index);
  }
  RepeatedResult result;
  result.pool = distinct_sorted(std::move(pool));
  result.index = min_select(state, result.pool, delta_prob / 2.0);
  return result;
}

RobustResult robust_qmf(Comparator& state, double delta_prob, std::size_t delta) {
  const std::size_t n = state.size();
  const auto c = derived_constants(n, delta, delta_prob);

  RobustResult result;
  result.stage1_output = repeated_pivot_qmf(state, delta_prob / 2.0, delta).index;

  const auto list = extend_with_dummies(n, c.k_dummies);
  std::vector<Index> pool{result.stage1_output};
  for (std::size_t i = 0; i < c.stage2_iters; ++i) {
    const auto out = qsearch_with_cutoff(state, result.stage1_output, c.cutoff, false, list.size());
    if (out.found_marked && !list.is_dummy(out.result_index)) pool.push_back(out.result_index);
  }
  result.pool = distinct_sorted(std::move(pool));
  result.index = min_select(state, result.pool, delta_prob / 4.0);
  return result;
}

Index min_select(Comparator& state, std::span<const Index> pool, double /*delta_prob*/) {
  if (pool.empty()) throw std::invalid_argument("min_select needs a non-empty pool");
  const auto members = distinct_sorted({pool.begin(), pool.end()});
  std::vector<std::size_t> wins(members.size(), 0);
  for (std::size_t a = 0; a < members.size(); ++a) {
    for (std::size_t b = a + 1; b < members.size(); ++b) {
      const Index w = state.compare(members[a], members[b]);
      ++wins[w == members[a] ? a : b];
    }
  }
  // max_element keeps the first maximum, i.e. the smallest index.
  const auto best = std::max_element(wins.begin(), wins.end()) - wins.begin();
  return members[static_cast<std::size_t>(best)];
}

}  // namespace rqmf
