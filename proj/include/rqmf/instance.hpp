#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rqmf/rng.hpp"

namespace rqmf {

/// Per-element fudge-zone sizes and the smallest density parameter covering them.
struct FudgeReport {
  std::vector<std::size_t> sizes;
  std::size_t delta = 0;

  std::size_t max_size() const;
};

enum class GeneratorKind { uniform_spread, clustered, grid };

GeneratorKind parse_generator(std::string_view name);
std::string_view to_string(GeneratorKind kind);

/// A list of distinct reals on the line with distance threshold 1.
///
/// Values handed in with another threshold are divided by it, so the comparator
/// guarantee always applies to pairs more than 1 apart. Immutable after construction.
class Instance {
 public:
  explicit Instance(std::vector<double> values, double alpha = 1.0);

  std::size_t size() const { return values_.size(); }
  double value(Index j) const;
  std::span<const double> values() const { return values_; }

  /// 1 + number of elements with a strictly smaller value.
  std::size_t rank(Index j) const;
  /// Index holding rank r (1-based).
  Index index_of_rank(std::size_t r) const;
  Index argmin() const { return order_.front(); }
  double min_value() const { return values_[order_.front()]; }

  /// Indices sorted by increasing value; position p holds the element of rank p+1.
  std::span<const Index> sorted_order() const { return order_; }
  /// position(j) == rank(j) - 1.
  std::span<const std::size_t> positions() const { return position_; }

  /// Elements other than j within distance 1 of it, ascending by index.
  std::vector<Index> fudge_zone(Index j) const;
  std::size_t fudge_size(Index j) const;
  /// Sorted-order positions [first, last) of every element within distance 1 of j,
  /// j itself included.
  std::pair<std::size_t, std::size_t> fudge_range(Index j) const;

  bool close(Index i, Index j) const;

  FudgeReport delta() const;

 private:
  void check_index(Index j) const;

  std::vector<double> values_;
  std::vector<Index> order_;
  std::vector<std::size_t> position_;
  std::vector<double> sorted_values_;
};

/// Deterministic benchmark instances; see README for the layouts.
Instance generate(GeneratorKind kind, std::size_t n, std::size_t target_delta, std::uint64_t seed);

// Plain-text format: "# n=<N> alpha=<a>" then one value per line.
void write_instance(std::ostream& out, const Instance& instance);
Instance read_instance(std::istream& in);
void save_instance(const std::filesystem::path& path, const Instance& instance);
Instance load_instance(const std::filesystem::path& path);

}  // namespace rqmf
