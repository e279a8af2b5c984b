#include "rqmf/comparator.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>
#include <string>

namespace rqmf {

namespace {

constexpr std::array kStrategies = {Strategy::exact, Strategy::random_fixed,
                                    Strategy::mark_all_below, Strategy::mark_none_below,
                                    Strategy::random_adaptive};

}  // namespace

Strategy parse_strategy(std::string_view name) {
  for (auto s : kStrategies) {
    if (to_string(s) == name) return s;
  }
  throw std::invalid_argument("unknown adversary '" + std::string(name) + "'");
}

std::string_view to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::exact: return "exact";
    case Strategy::random_fixed: return "random-fixed";
    case Strategy::mark_all_below: return "mark-all-below";
    case Strategy::mark_none_below: return "mark-none-below";
    case Strategy::random_adaptive: return "random-adaptive";
  }
  return "?";
}

std::span<const Strategy> all_strategies() { return kStrategies; }

// ---------------------------------------------------------------------------
// MarkedSet

MarkedSet::MarkedSet(std::shared_ptr<const Core> core, std::size_t dummy_count)
    : core_(std::move(core)), dummies_(dummy_count) {}

bool MarkedSet::contains(Index j) const {
  if (j >= core_->real_size) return j < list_size();
  if (!core_->order.empty()) {
    const auto pos = core_->position[j];
    if (pos < core_->below_end) return true;
    if (pos >= core_->above_begin) return false;
  }
  return std::binary_search(core_->marked_extra.begin(), core_->marked_extra.end(), j);
}

Index MarkedSet::marked_at(std::size_t k) const {
  if (k < core_->below_end) return core_->order[k];
  k -= core_->below_end;
  if (k < core_->marked_extra.size()) return core_->marked_extra[k];
  k -= core_->marked_extra.size();
  if (k >= dummies_) throw std::out_of_range("marked_at past the marked count");
  return core_->real_size + k;
}

Index MarkedSet::unmarked_at(std::size_t k) const {
  const std::size_t above = core_->order.empty() ? 0 : core_->real_size - core_->above_begin;
  if (k < above) return core_->order[core_->above_begin + k];
  k -= above;
  if (k >= core_->unmarked_extra.size()) throw std::out_of_range("unmarked_at past the count");
  return core_->unmarked_extra[k];
}

std::vector<Index> MarkedSet::real_indices() const {
  std::vector<Index> out(core_->order.begin(), core_->order.begin() + core_->below_end);
  out.insert(out.end(), core_->marked_extra.begin(), core_->marked_extra.end());
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Comparator

void Comparator::check_pair(Index i, Index j) const {
  if (i >= size() || j >= size()) {
    throw std::out_of_range("comparator index out of range (" + std::to_string(i) + ", " +
                            std::to_string(j) + ") for size " + std::to_string(size()));
  }
  if (i == j) throw std::invalid_argument("compare needs two distinct indices");
}

Index Comparator::compare(Index i, Index j) {
  check_pair(i, j);
  ++classical_queries_;
  return decide(i, j);
}

bool Comparator::oracle_bit(Index pivot, Index j) {
  if (j >= size()) return true;
  if (j == pivot) return false;
  return compare(pivot, j) == j;
}

MarkedSet Comparator::marked_set(Index pivot, std::size_t dummy_count) {
  if (pivot >= size()) throw std::out_of_range("pivot out of range");
  auto it = marked_cache_.find(pivot);
  if (it == marked_cache_.end()) {
    auto core = std::make_shared<const MarkedSet::Core>(build_marked(pivot));
    it = marked_cache_.emplace(pivot, std::move(core)).first;
  }
  return MarkedSet(it->second, dummy_count);
}

// ---------------------------------------------------------------------------
// NoisyComparator

NoisyComparator::NoisyComparator(const Instance& instance, Strategy strategy, std::uint64_t seed)
    : Comparator(seed), instance_(instance), strategy_(strategy) {
  if (strategy_ != Strategy::random_fixed) return;
  // Every close pair is settled up front, in sorted order, before any query.
  const auto order = instance_.sorted_order();
  for (std::size_t p = 0; p < order.size(); ++p) {
    for (std::size_t q = p + 1; q < order.size() && instance_.close(order[p], order[q]); ++q) {
      const Index winner = rng().bernoulli(0.5) ? order[p] : order[q];
      ledger_.emplace(key(order[p], order[q]), winner);
    }
  }
}

std::uint64_t NoisyComparator::key(Index i, Index j) {
  const auto lo = static_cast<std::uint64_t>(std::min(i, j));
  const auto hi = static_cast<std::uint64_t>(std::max(i, j));
  return (lo << 32) | hi;
}

Index NoisyComparator::true_min(Index i, Index j) const {
  return instance_.values()[i] < instance_.values()[j] ? i : j;
}

bool NoisyComparator::decided(Index i, Index j) const { return ledger_.contains(key(i, j)); }

void NoisyComparator::fix_outcome(Index i, Index j, Index winner) {
  check_pair(i, j);
  if (winner != i && winner != j) throw std::invalid_argument("winner must be one of the pair");
  if (!instance_.close(i, j)) {
    if (winner != true_min(i, j)) {
      throw std::invalid_argument("pairs more than 1 apart must resolve to the true minimum");
    }
    return;
  }
  const auto [it, inserted] = ledger_.emplace(key(i, j), winner);
  if (!inserted && it->second != winner) {
    throw std::invalid_argument("pair already decided the other way");
  }
}

Index NoisyComparator::decide(Index i, Index j) {
  if (!instance_.close(i, j)) return true_min(i, j);
  const auto k = key(i, j);
  if (auto it = ledger_.find(k); it != ledger_.end()) return it->second;

  Index winner = 0;
  switch (strategy_) {
    case Strategy::exact:
      winner = true_min(i, j);
      break;
    case Strategy::mark_all_below:
      winner = j;
      break;
    case Strategy::mark_none_below:
      winner = i;
      break;
    case Strategy::random_fixed:  // only reachable for pairs pinned away by fix_outcome
    case Strategy::random_adaptive:
      winner = rng().bernoulli(0.5) ? i : j;
      break;
  }
  ledger_.emplace(k, winner);
  return winner;
}

MarkedSet::Core NoisyComparator::build_marked(Index pivot) {
  const auto [first, last] = instance_.fudge_range(pivot);
  MarkedSet::Core core;
  core.pivot = pivot;
  core.real_size = instance_.size();
  core.order = instance_.sorted_order();
  core.position = instance_.positions();
  core.below_end = first;
  core.above_begin = last;
  for (std::size_t p = first; p < last; ++p) {
    const Index j = core.order[p];
    if (j == pivot) {
      core.unmarked_extra.push_back(j);
    } else if (decide(pivot, j) == j) {
      core.marked_extra.push_back(j);
    } else {
      core.unmarked_extra.push_back(j);
    }
  }
  std::sort(core.marked_extra.begin(), core.marked_extra.end());
  std::sort(core.unmarked_extra.begin(), core.unmarked_extra.end());
  return core;
}

}  // namespace rqmf
