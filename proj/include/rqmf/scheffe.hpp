#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rqmf/comparator.hpp"
#include "rqmf/instance.hpp"
#include "rqmf/rng.hpp"

namespace rqmf {

/// Probability mass function over the finite domain {0, ..., D-1}.
class DiscreteDistribution {
 public:
  explicit DiscreteDistribution(std::vector<double> pmf);

  std::size_t domain_size() const { return pmf_.size(); }
  double operator[](std::size_t x) const { return pmf_[x]; }
  std::span<const double> pmf() const { return pmf_; }

 private:
  std::vector<double> pmf_;
};

/// Unit-cost tallies of the elementary operations the Scheffe test is charged for.
struct CostTally {
  std::uint64_t set_queries = 0;   // EO_S: membership tests x in S_ij
  std::uint64_t sample_ops = 0;    // one accumulation per sample
  std::uint64_t mass_queries = 0;  // EO_p: p(S_ij) evaluations

  /// Weighted total given the unit costs of a membership test and a mass query.
  double total(double eo_s = 1.0, double eo_p = 1.0) const {
    return eo_s * static_cast<double>(set_queries) + static_cast<double>(sample_ops) +
           eo_p * static_cast<double>(mass_queries);
  }
};

/// A multiset of domain points stored as per-point counts.
struct SampleCounts {
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;
};

/// {x : p_i(x) > p_j(x)}, ascending. Charges one membership test per domain point.
std::vector<std::size_t> scheffe_set(const DiscreteDistribution& p_i,
                                     const DiscreteDistribution& p_j, CostTally* tally = nullptr);

/// Mass of p on `set`. Charges one mass query.
double mass(const DiscreteDistribution& p, std::span<const std::size_t> set,
            CostTally* tally = nullptr);

/// Fraction of samples that fall in `set`. Throws on an empty sample multiset.
double empirical_mass(const SampleCounts& samples, std::span<const std::size_t> set);

double l1_distance(const DiscreteDistribution& p, const DiscreteDistribution& q);

/// -log3 ||p - q||_1. Throws std::domain_error when p == q.
double x_value(const DiscreteDistribution& p, const DiscreteDistribution& q);

/// Smallest K with 4 sqrt(10 log2(C(n,2)/delta_prob) / K) <= epsilon. Throws
/// std::overflow_error when K would exceed 2^62.
std::uint64_t required_samples(std::size_t n, double delta_prob, double epsilon);

/// N hypotheses over a shared domain, the target q and a sample multiset drawn from q.
class HypothesisSet {
 public:
  HypothesisSet(std::vector<DiscreteDistribution> hypotheses, DiscreteDistribution target);

  std::size_t size() const { return hypotheses_.size(); }
  std::size_t domain_size() const { return target_.domain_size(); }
  const DiscreteDistribution& hypothesis(Index i) const { return hypotheses_.at(i); }
  std::span<const DiscreteDistribution> hypotheses() const { return hypotheses_; }
  const DiscreteDistribution& target() const { return target_; }

  /// Draws K i.i.d. samples from the target, replacing any earlier draw.
  void draw_samples(std::uint64_t k, Rng& rng);
  void set_samples(SampleCounts samples);
  bool has_samples() const { return samples_.total > 0; }
  const SampleCounts& samples() const { return samples_; }

  /// ||p_i - q||_1 for every hypothesis.
  std::vector<double> target_distances() const;

 private:
  std::vector<DiscreteDistribution> hypotheses_;
  DiscreteDistribution target_;
  SampleCounts samples_;
};

/// Scheffe test between hypotheses i and j on the set's samples: i wins when
/// |p_i(S_ij) - mu| <= |p_j(S_ij) - mu|. Charges K membership tests, K accumulations and
/// two mass queries to `tally`.
Index scheffe_test(Index i, Index j, const HypothesisSet& hset, CostTally* tally = nullptr);

/// Scheffe tests as a comparator. Outcomes are memoized per unordered pair; a marked-set
/// request for pivot i runs the whole row i.
class ScheffeComparator final : public Comparator {
 public:
  ScheffeComparator(const HypothesisSet& hset, std::uint64_t seed);

  std::size_t size() const override { return hset_.size(); }
  const CostTally& tally() const { return tally_; }
  std::uint64_t tests_run() const { return tests_run_; }

 protected:
  Index decide(Index i, Index j) override;
  MarkedSet::Core build_marked(Index pivot) override;

 private:
  const HypothesisSet& hset_;
  CostTally tally_;
  std::uint64_t tests_run_ = 0;
  std::unordered_map<std::uint64_t, Index> memo_;
};

/// Ground truth for the pipeline on the line: value log3 ||p_i - q||_1 (= -x_i), so the
/// hypothesis closest to q has rank 1. Hypotheses equal to q take the value
/// (smallest other value - 10), which keeps them at rank 1 and outside every fudge zone.
Instance ground_truth_instance(const HypothesisSet& hset);

enum class HypothesisFamily { gridded, mixture };

HypothesisFamily parse_family(std::string_view name);
std::string_view to_string(HypothesisFamily family);

/// Hypothesis sets whose target is one of the hypotheses (chosen by the seed).
///   gridded  discretized bells at centers target + s_k with s_k geometric in k
///   mixture  (1 - t_k) q + t_k r_k with random r_k and t_k geometric in k
/// Both spread the distances to q geometrically, so the density in x-space is set by
/// `x_density` (hypotheses per unit of x).
HypothesisSet generate_hypotheses(HypothesisFamily family, std::size_t n, std::size_t domain,
                                  double x_density, std::uint64_t seed);

// Text format: "# n=<N> d=<D>", then N pmf lines, then "q: <pmf>".
void write_hypotheses(std::ostream& out, const HypothesisSet& hset);
HypothesisSet read_hypotheses(std::istream& in);
void save_hypotheses(const std::filesystem::path& path, const HypothesisSet& hset);
HypothesisSet load_hypotheses(const std::filesystem::path& path);

/// Result of one end-to-end selection.
struct SelectionResult {
  Index index = 0;
  double distance = 0.0;       // ||p_hat - q||_1
  std::uint64_t tests_run = 0;
  CostTally tally;
  std::uint64_t quantum_queries = 0;
  std::uint64_t classical_queries = 0;
};

/// Runs RobustQMF with the Scheffe comparator on a set whose samples are already drawn.
/// Sets with at most 2(1 + delta_density) hypotheses go straight to the tournament.
SelectionResult hypothesis_select(const HypothesisSet& hset, double delta_prob,
                                  std::size_t delta_density, std::uint64_t seed);

}  // namespace rqmf
