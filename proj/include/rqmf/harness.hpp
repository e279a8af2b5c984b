#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rqmf/comparator.hpp"
#include "rqmf/instance.hpp"
#include "rqmf/scheffe.hpp"

namespace rqmf {

enum class Algorithm { qmf, pivot_qmf, repeated, robust, tournament };

Algorithm parse_algorithm(std::string_view name);
std::string_view to_string(Algorithm algorithm);

/// Rank a trial output must reach to count as a rank-based success:
/// qmf 1, pivot-qmf 16(delta+1), everything else 18 delta + 16.
std::size_t rank_threshold(Algorithm algorithm, std::size_t delta);

struct ExperimentConfig {
  Algorithm algorithm = Algorithm::robust;
  GeneratorKind generator = GeneratorKind::clustered;
  std::size_t n = 1024;
  std::size_t delta = 0;  // generator target; the algorithms get the instance's own delta
  Strategy adversary = Strategy::exact;
  double delta_prob = 0.1;
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  std::string out;            // empty: stdout
  std::string instance_file;  // empty: generate from the fields above and `seed`
  std::size_t jobs = 1;

  /// Flat key=value lines, one key per line, fixed order.
  std::string serialize() const;
  /// Rejects unknown and repeated keys. Blank lines and '#' comments are skipped.
  static ExperimentConfig parse(std::string_view text);
  static ExperimentConfig load(const std::filesystem::path& path);
};

struct TrialRecord {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  Algorithm algorithm = Algorithm::robust;
  Strategy adversary = Strategy::exact;
  std::size_t n = 0;
  std::size_t delta = 0;
  Index output_index = 0;
  std::size_t output_rank = 0;
  double output_distance = 0.0;
  std::uint64_t quantum_queries = 0;
  std::uint64_t classical_queries = 0;
  bool success_rank = false;
  bool success_distance = false;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The instance a config describes: loaded from `instance_file` or generated from `seed`.
Instance make_instance(const ExperimentConfig& config);

/// One trial on a prepared instance; trial i draws from mix_seed(config.seed, i).
TrialRecord run_trial(const ExperimentConfig& config, const Instance& instance,
                      std::size_t delta, std::size_t trial);

/// All trials, ordered by trial index whatever the number of jobs.
std::vector<TrialRecord> run_trials(const ExperimentConfig& config);
std::vector<TrialRecord> run_trials(const ExperimentConfig& config, const Instance& instance);

inline constexpr std::string_view kCsvSchema = "# rqmf-trials v1";

void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const TrialRecord& record);
std::string to_csv(const std::vector<TrialRecord>& records);

/// Runs the experiment and streams CSV to `out` in trial order, flushing as it goes.
/// On failure the rows written so far stay in place followed by "# incomplete", and the
/// error is rethrown (stream failures as IoError).
void run_to_csv(const ExperimentConfig& config, std::ostream& out);

struct ScalingPoint {
  std::size_t n = 0;
  double mean_queries = 0.0;
};

struct ScalingResult {
  std::vector<ScalingPoint> points;
  double slope = 0.0;
  double intercept = 0.0;
  bool degenerate = false;  // all means equal: slope reported as 0
};

struct ScalingConfig {
  Algorithm algorithm = Algorithm::robust;
  std::vector<std::size_t> n_list;
  std::size_t delta = 0;
  Strategy adversary = Strategy::exact;
  std::size_t trials_per_n = 200;
  std::uint64_t seed = 1;
  double delta_prob = 0.1;
  std::size_t jobs = 1;
};

/// Least-squares slope of log2(mean queries) against log2(n). Queries are quantum for
/// the quantum algorithms and classical for the tournament baseline. Instances are
/// uniform-spread when delta is 0 and clustered otherwise.
ScalingResult scaling_study(const ScalingConfig& config);

/// Ordinary least squares y = intercept + slope x.
std::pair<double, double> fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct ProbeBucket {
  std::size_t rank = 0;
  std::size_t samples = 0;
  double mean = 0.0;
  double stddev = 0.0;
  double bound = 0.0;  // (r + delta + 1)/2 + 3 sigma above the convergence zone, else 4 delta + 3
  std::size_t max_next_rank = 0;
  bool converged_zone = false;  // r <= 3(delta + 1)
  bool excluded = false;        // pivot has nothing marked
  bool passed = true;
  std::string diagnostic;
};

struct ProbeConfig {
  Strategy adversary = Strategy::mark_all_below;
  std::size_t delta = 0;  // density used for the bounds
  std::size_t trials = 10000;
  std::vector<std::size_t> ranks;
  std::uint64_t seed = 1;
};

/// For each rank r: trials independent successful pivot changes from the element of rank
/// r, recording the rank found. Requires n > 3(delta + 1).
std::vector<ProbeBucket> progress_probe(const Instance& instance, const ProbeConfig& config);


struct HypothesisConfig {
  double delta_prob = 0.1;
  double epsilon = 0.0;  // <= 0: half the smallest non-zero distance to the target
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  std::size_t jobs = 1;
};

/// Quantities fixed before any sample is drawn.
struct HypothesisPlan {
  std::size_t delta = 0;  // from the ground-truth instance in x-space
  double epsilon = 0.0;
  std::uint64_t samples = 0;  // required_samples(n, delta_prob, epsilon)
  double min_distance = 0.0;  // min_p ||p - q||_1
  double allowed = 0.0;       // 9 min_distance + epsilon
};

struct HypothesisRecord {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  Index output_index = 0;
  double distance = 0.0;
  bool success = false;
  std::uint64_t tests_run = 0;
  CostTally tally;
  std::uint64_t quantum_queries = 0;
  std::uint64_t classical_queries = 0;
};

HypothesisPlan plan_hypothesis_run(const HypothesisSet& hset, const HypothesisConfig& config);

/// Each trial draws a fresh sample multiset of plan.samples points from the target with
/// mix_seed(seed, trial), then runs the selection. Ordered by trial index.
std::vector<HypothesisRecord> run_hypothesis_trials(const HypothesisSet& hset,
                                                    const HypothesisConfig& config,
                                                    const HypothesisPlan& plan);

std::string hypothesis_csv(const std::vector<HypothesisRecord>& records, const HypothesisPlan& plan);

}  // namespace rqmf
