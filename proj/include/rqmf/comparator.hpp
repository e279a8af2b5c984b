#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rqmf/instance.hpp"
#include "rqmf/rng.hpp"

namespace rqmf {

/// How a noisy comparator settles pairs within distance 1.
///   exact            always the true smaller element
///   random-fixed     every close pair decided by a coin before the run starts
///   mark-all-below   the non-pivot element of a pivot query is declared smaller
///   mark-none-below  the non-pivot element of a pivot query is declared larger
///   random-adaptive  a coin flipped when the pair is first needed
enum class Strategy { exact, random_fixed, mark_all_below, mark_none_below, random_adaptive };

Strategy parse_strategy(std::string_view name);
std::string_view to_string(Strategy strategy);
std::span<const Strategy> all_strategies();

/// The indices j with O_pivot(j) = 1 over a list of `list_size()` entries: the real
/// elements first, then dummy indices [real_size, list_size), which are always marked.
///
/// Real marked elements are a prefix of the instance's sorted order plus an explicit
/// list; real unmarked elements are a suffix of the sorted order plus an explicit list.
/// Copies share the underlying storage.
class MarkedSet {
 public:
  struct Core {
    Index pivot = 0;
    std::size_t real_size = 0;
    std::span<const Index> order;  // may be empty when all members are explicit
    std::span<const std::size_t> position;
    std::size_t below_end = 0;    // order[0, below_end) are marked
    std::size_t above_begin = 0;  // order[above_begin, end) are unmarked
    std::vector<Index> marked_extra;    // sorted ascending
    std::vector<Index> unmarked_extra;  // sorted ascending, includes the pivot
  };

  MarkedSet(std::shared_ptr<const Core> core, std::size_t dummy_count);

  Index pivot() const { return core_->pivot; }
  std::size_t real_size() const { return core_->real_size; }
  std::size_t dummy_count() const { return dummies_; }
  std::size_t list_size() const { return core_->real_size + dummies_; }

  /// Marked count t over the extended list (dummies included).
  std::size_t size() const { return real_marked() + dummies_; }
  std::size_t real_marked() const { return core_->below_end + core_->marked_extra.size(); }
  std::size_t unmarked() const { return list_size() - size(); }

  bool contains(Index j) const;
  /// k-th marked entry, k < size(); an arbitrary but fixed enumeration.
  Index marked_at(std::size_t k) const;
  /// k-th unmarked entry, k < unmarked().
  Index unmarked_at(std::size_t k) const;

  /// All marked real indices ascending (dummies excluded).
  std::vector<Index> real_indices() const;

 private:
  std::shared_ptr<const Core> core_;
  std::size_t dummies_ = 0;
};

/// A pairwise comparator with query accounting and a private generator.
///
/// Once an outcome for a pair is decided it never changes. Subclasses supply the
/// decisions; this base counts classical queries, caches marked sets and holds the
/// generator the algorithms draw from.
class Comparator {
 public:
  explicit Comparator(std::uint64_t seed) : rng_(seed) {}
  virtual ~Comparator() = default;
  Comparator(const Comparator&) = delete;
  Comparator& operator=(const Comparator&) = delete;

  virtual std::size_t size() const = 0;

  /// Which of i, j is declared smaller. Counts one classical query.
  Index compare(Index i, Index j);

  /// O_pivot(j): 1 iff compare(pivot, j) returns j. Dummy indices (>= size()) are
  /// always 1 and a pivot is never marked against itself; neither counts a query.
  bool oracle_bit(Index pivot, Index j);

  /// Commits every outcome involving `pivot` and returns the marked set over the list
  /// extended by `dummy_count` dummies. Counts no queries; a superposition query is
  /// charged per Grover iteration by the caller.
  MarkedSet marked_set(Index pivot, std::size_t dummy_count = 0);

  std::uint64_t classical_queries() const { return classical_queries_; }
  std::uint64_t quantum_queries() const { return quantum_queries_; }
  void add_quantum_queries(std::uint64_t count) { quantum_queries_ += count; }

  Rng& rng() { return rng_; }

 protected:
  /// Outcome for a pair of distinct valid indices; must be consistent across calls.
  virtual Index decide(Index i, Index j) = 0;
  virtual MarkedSet::Core build_marked(Index pivot) = 0;

  void check_pair(Index i, Index j) const;

 private:
  Rng rng_;
  std::uint64_t classical_queries_ = 0;
  std::uint64_t quantum_queries_ = 0;
  std::unordered_map<Index, std::shared_ptr<const MarkedSet::Core>> marked_cache_;
};

/// Comparator over an Instance: exact for pairs more than 1 apart, otherwise settled by
/// the strategy and recorded in a ledger keyed by the unordered pair.
class NoisyComparator final : public Comparator {
 public:
  NoisyComparator(const Instance& instance, Strategy strategy, std::uint64_t seed);

  std::size_t size() const override { return instance_.size(); }
  const Instance& instance() const { return instance_; }
  Strategy strategy() const { return strategy_; }

  /// Pins the outcome of a close pair before (or during) a run. Throws if the pair is
  /// more than 1 apart and `winner` is not the true smaller element, or if the pair was
  /// already decided differently.
  void fix_outcome(Index i, Index j, Index winner);

  /// Whether the pair has a recorded outcome.
  bool decided(Index i, Index j) const;
  std::size_t ledger_size() const { return ledger_.size(); }

 protected:
  Index decide(Index i, Index j) override;
  MarkedSet::Core build_marked(Index pivot) override;

 private:
  static std::uint64_t key(Index i, Index j);
  Index true_min(Index i, Index j) const;

  const Instance& instance_;
  Strategy strategy_;
  std::unordered_map<std::uint64_t, Index> ledger_;
};

}  // namespace rqmf
