#include "rqmf/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include "rqmf/grover.hpp"
#include "rqmf/minfind.hpp"

namespace rqmf {

namespace {

std::string format_double(double v) {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out << std::setprecision(17) << v;
  return out.str();
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  const auto v = std::stoull(value, &used);
  if (used != value.size()) throw std::invalid_argument("bad integer for " + key + ": " + value);
  return v;
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  const auto v = std::stod(value, &used);
  if (used != value.size()) throw std::invalid_argument("bad number for " + key + ": " + value);
  return v;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

/// Runs body(i) for i in [0, count) across `jobs` threads; body writes only its own slot.
template <class Body>
void parallel_for(std::size_t count, std::size_t jobs, Body&& body) {
  jobs = std::max<std::size_t>(1, std::min(jobs, count));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(jobs);
  std::vector<std::thread> workers;
  workers.reserve(jobs);
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += jobs) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : workers) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

Algorithm parse_algorithm(std::string_view name) {
  if (name == "qmf") return Algorithm::qmf;
  if (name == "pivot-qmf") return Algorithm::pivot_qmf;
  if (name == "repeated") return Algorithm::repeated;
  if (name == "robust") return Algorithm::robust;
  if (name == "tournament") return Algorithm::tournament;
  throw std::invalid_argument("unknown algorithm '" + std::string(name) + "'");
}

std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::qmf: return "qmf";
    case Algorithm::pivot_qmf: return "pivot-qmf";
    case Algorithm::repeated: return "repeated";
    case Algorithm::robust: return "robust";
    case Algorithm::tournament: return "tournament";
  }
  return "?";
}

std::size_t rank_threshold(Algorithm algorithm, std::size_t delta) {
  switch (algorithm) {
    case Algorithm::qmf: return 1;
    case Algorithm::pivot_qmf: return 16 * (delta + 1);
    default: return 18 * delta + 16;
  }
}

// ---------------------------------------------------------------------------
// ExperimentConfig

std::string ExperimentConfig::serialize() const {
  std::ostringstream text;
  text << "algorithm=" << to_string(algorithm) << '\n'
      << "generator=" << to_string(generator) << '\n'
      << "n=" << n << '\n'
      << "delta=" << delta << '\n'
      << "adversary=" << to_string(adversary) << '\n'
      << "delta_prob=" << format_double(delta_prob) << '\n'
      << "trials=" << trials << '\n'
      << "seed=" << seed << '\n'
      << "out=" << out << '\n'
      << "instance=" << instance_file << '\n'
      << "jobs=" << jobs << '\n';
  return text.str();
}

ExperimentConfig ExperimentConfig::parse(std::string_view text) {
  ExperimentConfig config;
  std::map<std::string, bool> seen;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key=value");
    }
    const auto key = trim(std::string_view(line).substr(0, eq));
    const auto value = trim(std::string_view(line).substr(eq + 1));
    if (seen[key]) throw std::invalid_argument("config key '" + key + "' given twice");
    seen[key] = true;
    if (key == "algorithm") config.algorithm = parse_algorithm(value);
    else if (key == "generator") config.generator = parse_generator(value);
    else if (key == "n") config.n = parse_u64(key, value);
    else if (key == "delta") config.delta = parse_u64(key, value);
    else if (key == "adversary") config.adversary = parse_strategy(value);
    else if (key == "delta_prob") config.delta_prob = parse_double(key, value);
    else if (key == "trials") config.trials = parse_u64(key, value);
    else if (key == "seed") config.seed = parse_u64(key, value);
    else if (key == "out") config.out = value;
    else if (key == "instance") config.instance_file = value;
    else if (key == "jobs") config.jobs = parse_u64(key, value);
    else throw std::invalid_argument("unknown config key '" + key + "'");
  }
  return config;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse(text.str());
}

// ---------------------------------------------------------------------------
// Trials

Instance make_instance(const ExperimentConfig& config) {
  if (!config.instance_file.empty()) return load_instance(config.instance_file);
  return generate(config.generator, config.n, config.delta, config.seed);
}

TrialRecord run_trial(const ExperimentConfig& config, const Instance& instance, std::size_t delta,
                      std::size_t trial) {
  TrialRecord r;
  r.trial = trial;
  r.seed = mix_seed(config.seed, trial);
  r.algorithm = config.algorithm;
  r.adversary = config.adversary;
  r.n = instance.size();
  r.delta = delta;

  NoisyComparator comparator(instance, config.adversary, r.seed);
  switch (config.algorithm) {
    case Algorithm::qmf:
      r.output_index = qmf_noiseless(comparator);
      break;
    case Algorithm::pivot_qmf: {
      const auto c = derived_constants(instance.size(), delta, config.delta_prob);
      r.output_index = pivot_qmf(comparator, delta, c.n_trials).index;
      break;
    }
    case Algorithm::repeated:
      r.output_index = repeated_pivot_qmf(comparator, config.delta_prob, delta).index;
      break;
    case Algorithm::robust:
      r.output_index = robust_qmf(comparator, config.delta_prob, delta).index;
      break;
    case Algorithm::tournament: {
      std::vector<Index> all(instance.size());
      std::iota(all.begin(), all.end(), Index{0});
      r.output_index = min_select(comparator, all, config.delta_prob);
      break;
    }
  }
  r.output_rank = instance.rank(r.output_index);
  r.output_distance = instance.value(r.output_index) - instance.min_value();
  r.quantum_queries = comparator.quantum_queries();
  r.classical_queries = comparator.classical_queries();
  r.success_rank = r.output_rank <= rank_threshold(config.algorithm, delta);
  r.success_distance = r.output_distance <= 2.0;
  return r;
}

std::vector<TrialRecord> run_trials(const ExperimentConfig& config, const Instance& instance) {
  const std::size_t delta = instance.delta().delta;
  std::vector<TrialRecord> records(config.trials);
  parallel_for(config.trials, config.jobs,
               [&](std::size_t i) { records[i] = run_trial(config, instance, delta, i); });
  return records;
}

std::vector<TrialRecord> run_trials(const ExperimentConfig& config) {
  const auto instance = make_instance(config);
  return run_trials(config, instance);
}

void write_csv_header(std::ostream& out) {
  out << kCsvSchema << '\n'
      << "trial,seed,algorithm,adversary,n,delta,output_index,output_rank,output_distance,"
         "quantum_queries,classical_queries,success_rank,success_distance\n";
}

void write_csv_row(std::ostream& out, const TrialRecord& r) {
  out << r.trial << ',' << r.seed << ',' << to_string(r.algorithm) << ','
      << to_string(r.adversary) << ',' << r.n << ',' << r.delta << ',' << r.output_index << ','
      << r.output_rank << ',' << format_double(r.output_distance) << ',' << r.quantum_queries
      << ',' << r.classical_queries << ',' << (r.success_rank ? 1 : 0) << ','
      << (r.success_distance ? 1 : 0) << '\n';
}

std::string to_csv(const std::vector<TrialRecord>& records) {
  std::ostringstream out;
  write_csv_header(out);
  for (const auto& r : records) write_csv_row(out, r);
  return out.str();
}

void run_to_csv(const ExperimentConfig& config, std::ostream& out) {
  const auto instance = make_instance(config);
  const std::size_t delta = instance.delta().delta;
  const std::size_t block = std::max<std::size_t>(1, config.jobs) * 32;

  write_csv_header(out);
  try {
    for (std::size_t start = 0; start < config.trials; start += block) {
      const std::size_t count = std::min(block, config.trials - start);
      std::vector<TrialRecord> records(count);
      parallel_for(count, config.jobs, [&](std::size_t i) {
        records[i] = run_trial(config, instance, delta, start + i);
      });
      for (const auto& r : records) write_csv_row(out, r);
      out.flush();
      if (!out) throw IoError("write failed after trial " + std::to_string(start));
    }
  } catch (...) {
    out.clear();
    out << "# incomplete\n";
    out.flush();
    throw;
  }
}

// ---------------------------------------------------------------------------
// Scaling

std::pair<double, double> fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line needs >= 2 points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_line: x values are all equal");
  const double slope = sxy / sxx;
  return {my - slope * mx, slope};
}

ScalingResult scaling_study(const ScalingConfig& config) {
  auto sizes = config.n_list;
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  if (sizes.size() < 4) throw std::invalid_argument("scaling study needs at least 4 distinct sizes");

  ScalingResult result;
  std::vector<double> lx, ly;
  for (std::size_t n : sizes) {
    ExperimentConfig ec;
    ec.algorithm = config.algorithm;
    ec.generator = config.delta == 0 ? GeneratorKind::uniform_spread : GeneratorKind::clustered;
    ec.n = n;
    ec.delta = config.delta;
    ec.adversary = config.adversary;
    ec.delta_prob = config.delta_prob;
    ec.trials = config.trials_per_n;
    ec.seed = mix_seed(config.seed, n);
    ec.jobs = config.jobs;
    const auto records = run_trials(ec);
    double total = 0.0;
    for (const auto& r : records) {
      total += static_cast<double>(config.algorithm == Algorithm::tournament ? r.classical_queries
                                                                            : r.quantum_queries);
    }
    const double mean = records.empty() ? 0.0 : total / static_cast<double>(records.size());
    result.points.push_back({n, mean});
    lx.push_back(std::log2(static_cast<double>(n)));
    ly.push_back(std::log2(std::max(mean, 1e-300)));
  }
  result.degenerate = std::all_of(result.points.begin(), result.points.end(), [&](const auto& p) {
    return p.mean_queries == result.points.front().mean_queries;
  });
  if (result.degenerate) return result;
  std::tie(result.intercept, result.slope) = fit_line(lx, ly);
  return result;
}

// ---------------------------------------------------------------------------
// Progress probe

std::vector<ProbeBucket> progress_probe(const Instance& instance, const ProbeConfig& config) {
  const std::size_t n = instance.size();
  const std::size_t zone = 3 * (config.delta + 1);
  if (!(n > zone)) throw std::invalid_argument("progress probe requires n > 3(delta + 1)");

  std::vector<ProbeBucket> buckets;
  for (std::size_t r : config.ranks) {
    if (r < 1 || r > n) throw std::out_of_range("probe rank out of range");
    ProbeBucket b;
    b.rank = r;
    b.converged_zone = r <= zone;
    const Index pivot = instance.index_of_rank(r);

    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t t = 0; t < config.trials; ++t) {
      NoisyComparator comparator(instance, config.adversary,
                                 mix_seed(config.seed, r * config.trials + t));
      if (comparator.marked_set(pivot).size() == 0) {
        b.excluded = true;
        b.diagnostic = "pivot of rank " + std::to_string(r) + " has no marked element";
        break;
      }
      const auto out = qsearch_with_cutoff(comparator, pivot, kUnbounded, false, n);
      const auto next = instance.rank(out.result_index);
      sum += static_cast<double>(next);
      sum_sq += static_cast<double>(next) * static_cast<double>(next);
      b.max_next_rank = std::max(b.max_next_rank, next);
      ++b.samples;
    }
    if (b.excluded || b.samples == 0) {
      b.excluded = true;
      b.passed = true;
      if (b.diagnostic.empty()) b.diagnostic = "no samples";
      buckets.push_back(std::move(b));
      continue;
    }
    const double k = static_cast<double>(b.samples);
    b.mean = sum / k;
    b.stddev = b.samples > 1 ? std::sqrt(std::max(0.0, (sum_sq - k * b.mean * b.mean) / (k - 1.0)))
                             : 0.0;
    if (b.converged_zone) {
      b.bound = static_cast<double>(4 * config.delta + 3);
      b.passed = b.max_next_rank <= 4 * config.delta + 3;
    } else {
      b.bound = static_cast<double>(r + config.delta + 1) / 2.0 + 3.0 * b.stddev / std::sqrt(k);
      b.passed = b.mean <= b.bound;
    }
    buckets.push_back(std::move(b));
  }
  return buckets;
}


// ---------------------------------------------------------------------------
// Hypothesis selection

HypothesisPlan plan_hypothesis_run(const HypothesisSet& hset, const HypothesisConfig& config) {
  HypothesisPlan plan;
  plan.delta = ground_truth_instance(hset).delta().delta;
  const auto dist = hset.target_distances();
  double min_nonzero = std::numeric_limits<double>::infinity();
  plan.min_distance = std::numeric_limits<double>::infinity();
  for (double d : dist) {
    plan.min_distance = std::min(plan.min_distance, d);
    if (d > 0.0) min_nonzero = std::min(min_nonzero, d);
  }
  plan.epsilon = config.epsilon > 0.0 ? config.epsilon : 0.5 * min_nonzero;
  plan.samples = required_samples(hset.size(), config.delta_prob, plan.epsilon);
  plan.allowed = 9.0 * plan.min_distance + plan.epsilon;
  return plan;
}

std::vector<HypothesisRecord> run_hypothesis_trials(const HypothesisSet& hset,
                                                    const HypothesisConfig& config,
                                                    const HypothesisPlan& plan) {
  std::vector<HypothesisRecord> records(config.trials);
  parallel_for(config.trials, config.jobs, [&](std::size_t t) {
    HypothesisSet local = hset;
    HypothesisRecord& r = records[t];
    r.trial = t;
    r.seed = mix_seed(config.seed, t);
    Rng sampler(r.seed);
    local.draw_samples(plan.samples, sampler);
    const auto out = hypothesis_select(local, config.delta_prob, plan.delta, splitmix64(r.seed));
    r.output_index = out.index;
    r.distance = out.distance;
    r.success = out.distance <= plan.allowed;
    r.tests_run = out.tests_run;
    r.tally = out.tally;
    r.quantum_queries = out.quantum_queries;
    r.classical_queries = out.classical_queries;
  });
  return records;
}

std::string hypothesis_csv(const std::vector<HypothesisRecord>& records, const HypothesisPlan& plan) {
  std::ostringstream out;
  out << "# rqmf-hypothesis v1 delta=" << plan.delta << " epsilon=" << format_double(plan.epsilon)
      << " samples=" << plan.samples << " allowed=" << format_double(plan.allowed) << '\n'
      << "trial,seed,output_index,distance,success,tests,set_queries,sample_ops,mass_queries,"
         "quantum_queries,classical_queries\n";
  for (const auto& r : records) {
    out << r.trial << ',' << r.seed << ',' << r.output_index << ',' << format_double(r.distance)
        << ',' << (r.success ? 1 : 0) << ',' << r.tests_run << ',' << r.tally.set_queries << ','
        << r.tally.sample_ops << ',' << r.tally.mass_queries << ',' << r.quantum_queries << ','
        << r.classical_queries << '\n';
  }
  return out.str();
}

}  // namespace rqmf
