#include "rqmf/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "rqmf/comparator.hpp"
#include "rqmf/grover.hpp"
#include "rqmf/harness.hpp"
#include "rqmf/instance.hpp"
#include "rqmf/minfind.hpp"
#include "rqmf/scheffe.hpp"

namespace rqmf {

namespace {

// Frozen tolerances and trial counts.
constexpr double kGroverTolerance = 1e-10;
constexpr std::size_t kGroverMaxIters = 12;
constexpr std::size_t kMainTrials = 10000;
constexpr std::size_t kRepeatedTrials = 2000;
constexpr std::size_t kScalingTrials = 200;
constexpr std::size_t kHypothesisTrials = 500;
constexpr double kSearchMeanSlack = 0.05;
constexpr double kScalingLow = 0.40;
constexpr double kScalingHigh = 0.65;

struct Check {
  bool ok = true;
  std::ostringstream detail;

  void fail(const std::string& what) {
    if (!ok) detail << "; ";
    else detail.str("");
    ok = false;
    detail << what;
  }
};

std::string fmt(double v, int precision = 4) {
  std::ostringstream out;
  out << std::setprecision(precision) << v;
  return out.str();
}

double frequency(const std::vector<TrialRecord>& records, bool TrialRecord::*field) {
  std::size_t hits = 0;
  for (const auto& r : records) hits += (r.*field) ? 1 : 0;
  return records.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(records.size());
}

// ---------------------------------------------------------------------------

CriterionResult grover_model(const AcceptanceOptions&) {
  CriterionResult res{1, "grover-model", true, "", 0};
  double worst_class = 0.0, worst_uniform = 0.0;
  std::size_t cases = 0;
  for (std::size_t size : {4u, 8u, 16u, 32u}) {
    for (std::size_t t = 0; t <= size; ++t) {
      // Marked entries spread across the list rather than a prefix.
      std::vector<Index> marked;
      std::vector<bool> is_marked(size, false);
      for (std::size_t k = 0; k < t; ++k) {
        const Index j = (k * 7 + 3) % size;
        Index slot = j;
        while (is_marked[slot]) slot = (slot + 1) % size;
        is_marked[slot] = true;
        marked.push_back(slot);
      }
      for (std::size_t g = 0; g <= kGroverMaxIters; ++g) {
        const auto dist = statevector_reference(size, marked, g);
        const double analytic = success_probability({size, t, g});
        double in_class = 0.0;
        for (Index j : marked) in_class += dist[j];
        worst_class = std::max(worst_class, std::abs(in_class - analytic));
        for (std::size_t j = 0; j < size; ++j) {
          const double expected = is_marked[j] ? analytic / static_cast<double>(t)
                                               : (1.0 - analytic) / static_cast<double>(size - t);
          worst_uniform = std::max(worst_uniform, std::abs(dist[j] - expected));
        }
        ++cases;
      }
    }
  }
  res.passed = worst_class <= kGroverTolerance && worst_uniform <= kGroverTolerance;
  res.detail = std::to_string(cases) + " cases; max class deviation " + fmt(worst_class, 3) +
               ", max within-class deviation " + fmt(worst_uniform, 3) + " (tol 1e-10)";
  return res;
}

CriterionResult exponential_search_mean(const AcceptanceOptions& opt) {
  CriterionResult res{2, "exponential-search-mean", true, "", 0};
  const std::size_t n = 1024;
  const auto instance = generate(GeneratorKind::uniform_spread, n, 0, mix_seed(opt.seed, 2));
  const Index pivot = instance.index_of_rank(2);
  double total = 0.0;
  for (std::size_t t = 0; t < kMainTrials; ++t) {
    NoisyComparator comparator(instance, Strategy::exact, mix_seed(opt.seed ^ 0x2002, t));
    total += qsearch_with_cutoff(comparator, pivot, kUnbounded, false, n).search_time;
  }
  const double mean = total / static_cast<double>(kMainTrials);
  const double bound = 4.5 * std::sqrt(static_cast<double>(n) / 1.0) * (1.0 + kSearchMeanSlack);
  res.passed = mean <= bound;
  res.detail = "mean Grover iterations " + fmt(mean) + " <= " + fmt(bound);
  return res;
}

CriterionResult cutoff_success(const AcceptanceOptions& opt) {
  CriterionResult res{3, "cutoff-success-probability", true, "", 0};
  Check check;
  const std::size_t n = 4096;
  const double floor = binomial_floor(0.5, kMainTrials);
  double worst = 1.0;
  std::string worst_case;
  for (std::size_t delta : {0u, 2u, 8u}) {
    const auto instance = generate(GeneratorKind::grid, n, delta, mix_seed(opt.seed, 300 + delta));
    const double cutoff = 9.0 * std::sqrt(static_cast<double>(n) / static_cast<double>(1 + delta));
    const std::size_t lowest = std::max<std::size_t>(2 * delta + 1, 2);
    for (std::size_t r : {lowest, 4 * delta + 4, std::size_t{64}, n / 2}) {
      for (Strategy s : {Strategy::exact, Strategy::mark_all_below, Strategy::mark_none_below,
                         Strategy::random_adaptive}) {
        const Index pivot = instance.index_of_rank(r);
        std::size_t hits = 0;
        for (std::size_t t = 0; t < kMainTrials; ++t) {
          NoisyComparator comparator(instance, s, mix_seed(opt.seed ^ (r * 131 + delta), t));
          hits += qsearch_with_cutoff(comparator, pivot, cutoff, false, n).found_marked ? 1 : 0;
        }
        const double f = static_cast<double>(hits) / static_cast<double>(kMainTrials);
        const std::string label = "delta=" + std::to_string(delta) + " r=" + std::to_string(r) +
                                  " " + std::string(to_string(s));
        if (f <= worst) {
          worst = f;
          worst_case = label;
        }
        if (f < floor) check.fail(label + " freq " + fmt(f));
      }
    }
  }
  res.passed = check.ok;
  res.detail = check.ok ? "lowest frequency " + fmt(worst) + " (" + worst_case + ") >= " + fmt(floor)
                        : check.detail.str() + " < " + fmt(floor);
  return res;
}

CriterionResult noiseless_qmf(const AcceptanceOptions& opt) {
  CriterionResult res{4, "noiseless-qmf", true, "", 0};
  Check check;
  const double floor = binomial_floor(0.5, kMainTrials);
  std::ostringstream summary;
  for (std::size_t n : {64u, 256u}) {
    ExperimentConfig c;
    c.algorithm = Algorithm::qmf;
    c.generator = GeneratorKind::uniform_spread;
    c.n = n;
    c.adversary = Strategy::exact;
    c.trials = kMainTrials;
    c.seed = mix_seed(opt.seed, 400 + n);
    c.jobs = opt.jobs;
    const double f = frequency(run_trials(c), &TrialRecord::success_rank);
    summary << "n=" << n << ": " << fmt(f) << " ";
    if (f < floor) check.fail("n=" + std::to_string(n) + " freq " + fmt(f));
  }
  res.passed = check.ok;
  res.detail = (check.ok ? summary.str() : check.detail.str()) + ">= " + fmt(floor);
  return res;
}

std::vector<Strategy> adversarial_roster() {
  return {Strategy::exact, Strategy::mark_all_below, Strategy::mark_none_below,
          Strategy::random_adaptive};
}

CriterionResult grid_frequency(int id, const std::string& name, const AcceptanceOptions& opt,
                               Algorithm algorithm, const std::vector<std::size_t>& deltas,
                               const std::vector<Strategy>& strategies, std::size_t trials,
                               double level, bool TrialRecord::*field) {
  CriterionResult res{id, name, true, "", 0};
  Check check;
  const double floor = binomial_floor(level, trials);
  double worst = 1.0;
  std::string worst_case;
  for (std::size_t delta : deltas) {
    ExperimentConfig c;
    c.algorithm = algorithm;
    c.generator = GeneratorKind::clustered;
    c.n = 4096;
    c.delta = delta;
    c.delta_prob = 0.1;
    c.trials = trials;
    c.jobs = opt.jobs;
    c.seed = mix_seed(opt.seed, static_cast<std::uint64_t>(id) * 1000 + delta);
    const auto instance = make_instance(c);
    for (Strategy s : strategies) {
      c.adversary = s;
      const double f = frequency(run_trials(c, instance), field);
      const std::string label = "delta=" + std::to_string(delta) + " " + std::string(to_string(s));
      if (f <= worst) {
        worst = f;
        worst_case = label;
      }
      if (f < floor) check.fail(label + " freq " + fmt(f));
    }
  }
  res.passed = check.ok;
  res.detail = check.ok ? "lowest frequency " + fmt(worst) + " (" + worst_case + ") >= " + fmt(floor)
                        : check.detail.str() + " < " + fmt(floor);
  return res;
}

CriterionResult pivot_qmf_rank(const AcceptanceOptions& opt) {
  return grid_frequency(5, "pivot-qmf-rank", opt, Algorithm::pivot_qmf, {0, 1, 4},
                        adversarial_roster(), kMainTrials, 0.75, &TrialRecord::success_rank);
}

CriterionResult worst_case_progress(const AcceptanceOptions& opt) {
  CriterionResult res{6, "worst-case-progress", true, "", 0};
  Check check;
  std::size_t buckets = 0, excluded = 0;
  for (std::size_t delta : {2u, 10u}) {
    const auto instance = generate(GeneratorKind::grid, 4096, delta, mix_seed(opt.seed, 600 + delta));
    ProbeConfig pc;
    pc.delta = delta;
    pc.trials = kMainTrials;
    pc.seed = mix_seed(opt.seed, 610 + delta);
    for (std::size_t r = 1; r <= 3 * (delta + 1); ++r) pc.ranks.push_back(r);
    for (std::size_t r : {3 * delta + 4, 5 * delta + 7, std::size_t{100}, std::size_t{1000},
                          std::size_t{4000}}) {
      pc.ranks.push_back(r);
    }
    for (Strategy s : {Strategy::mark_all_below, Strategy::exact}) {
      pc.adversary = s;
      for (const auto& b : progress_probe(instance, pc)) {
        ++buckets;
        if (b.excluded) {
          ++excluded;
          continue;
        }
        if (!b.passed) {
          check.fail(std::string(to_string(s)) + " delta=" + std::to_string(delta) +
                     " r=" + std::to_string(b.rank) +
                     (b.converged_zone ? " max next rank " + std::to_string(b.max_next_rank)
                                       : " mean " + fmt(b.mean)) +
                     " > " + fmt(b.bound));
        }
      }
    }
  }
  res.passed = check.ok;
  res.detail = check.ok ? std::to_string(buckets - excluded) + " buckets within bounds, " +
                              std::to_string(excluded) + " excluded (nothing marked)"
                        : check.detail.str();
  return res;
}

CriterionResult repeated_rank(const AcceptanceOptions& opt) {
  const auto all = all_strategies();
  return grid_frequency(7, "repeated-pivot-qmf-rank", opt, Algorithm::repeated, {0, 4},
                        {all.begin(), all.end()}, kRepeatedTrials, 0.9, &TrialRecord::success_rank);
}

CriterionResult robust_distance(const AcceptanceOptions& opt) {
  const auto all = all_strategies();
  auto res = grid_frequency(8, "robust-qmf-2-approximation", opt, Algorithm::robust, {0, 4},
                            {all.begin(), all.end()}, kRepeatedTrials, 0.9,
                            &TrialRecord::success_distance);
  // With an exact comparator and no noise, a Stage-I output that is already the minimum
  // finds nothing in Stage II and is returned as is.
  const auto instance = generate(GeneratorKind::uniform_spread, 1024, 0, mix_seed(opt.seed, 800));
  std::size_t hits = 0;
  bool ok = true;
  for (std::size_t t = 0; t < 20; ++t) {
    NoisyComparator comparator(instance, Strategy::exact, mix_seed(opt.seed ^ 0x8008, t));
    const auto out = robust_qmf(comparator, 0.1, 0);
    if (out.stage1_output != instance.argmin()) continue;
    ++hits;
    ok = ok && out.pool.size() == 1 && out.index == out.stage1_output;
  }
  ok = ok && hits > 0;
  res.passed = res.passed && ok;
  res.detail += "; minimum-at-Stage-I path: " + std::to_string(hits) + " runs, " +
                (ok ? "pool {Y_out} returned unchanged" : "FAILED");
  return res;
}

CriterionResult tournament_exhaustive(const AcceptanceOptions& opt) {
  CriterionResult res{9, "tournament-exhaustive", true, "", 0};
  Rng rng(mix_seed(opt.seed, 900));
  std::vector<std::vector<double>> pools = {
      {0.0, 1.0, 2.0, 3.0},           {0.0, 0.5, 3.0},
      {0.0, 0.9, 1.8, 2.7, 3.6, 4.5}, {0.0, 0.2, 0.4, 0.6, 0.8, 1.0},
      {0.0, 1.0, 2.0, 2.5, 3.0, 4.0}, {0.0, 2.0},
  };
  for (std::size_t size = 2; size <= 6; ++size) {
    for (std::size_t rep = 0; rep < 60; ++rep) {
      std::vector<double> v(size);
      const double spread = 0.5 + 3.5 * rng.uniform_real();
      for (double& x : v) x = spread * rng.uniform_real();
      pools.push_back(std::move(v));
    }
  }
  std::size_t tables = 0;
  double worst = 0.0;
  for (const auto& values : pools) {
    const Instance inst(values);
    std::vector<std::pair<Index, Index>> close;
    for (Index a = 0; a < inst.size(); ++a) {
      for (Index b = a + 1; b < inst.size(); ++b) {
        if (inst.close(a, b)) close.emplace_back(a, b);
      }
    }
    std::vector<Index> pool(inst.size());
    std::iota(pool.begin(), pool.end(), Index{0});
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << close.size()); ++mask) {
      NoisyComparator comparator(inst, Strategy::exact, 0);
      for (std::size_t k = 0; k < close.size(); ++k) {
        const auto [a, b] = close[k];
        comparator.fix_outcome(a, b, (mask >> k) & 1 ? b : a);
      }
      const Index w = min_select(comparator, pool, 0.1);
      worst = std::max(worst, inst.value(w) - inst.min_value());
      ++tables;
    }
  }
  res.passed = worst <= 2.0;
  res.detail = std::to_string(pools.size()) + " pools, " + std::to_string(tables) +
               " decision tables; largest distance to pool minimum " + fmt(worst) + " (<= 2)";
  return res;
}

CriterionResult query_scaling(const AcceptanceOptions& opt) {
  CriterionResult res{10, "query-scaling", true, "", 0};
  ScalingConfig sc;
  sc.algorithm = Algorithm::robust;
  for (std::size_t e = 8; e <= 14; ++e) sc.n_list.push_back(std::size_t{1} << e);
  sc.delta = 0;
  sc.adversary = Strategy::exact;
  sc.trials_per_n = kScalingTrials;
  sc.seed = mix_seed(opt.seed, 1000);
  sc.jobs = opt.jobs;
  const auto out = scaling_study(sc);
  res.passed = !out.degenerate && out.slope >= kScalingLow && out.slope <= kScalingHigh;
  res.detail = "slope " + fmt(out.slope) + " in [" + fmt(kScalingLow) + ", " + fmt(kScalingHigh) +
               "]; mean queries n=256: " + fmt(out.points.front().mean_queries, 6) +
               ", n=16384: " + fmt(out.points.back().mean_queries, 6);
  return res;
}

CriterionResult hypothesis_selection(const AcceptanceOptions& opt) {
  CriterionResult res{11, "hypothesis-selection", true, "", 0};
  const auto hset =
      generate_hypotheses(HypothesisFamily::gridded, 256, 64, 32.0, mix_seed(opt.seed, 1100));
  HypothesisConfig hc;
  hc.delta_prob = 0.1;
  hc.trials = kHypothesisTrials;
  hc.seed = mix_seed(opt.seed, 1101);
  hc.jobs = opt.jobs;
  const auto plan = plan_hypothesis_run(hset, hc);
  const auto records = run_hypothesis_trials(hset, hc, plan);

  std::size_t hits = 0;
  bool tally_ok = true;
  for (const auto& r : records) {
    hits += r.success ? 1 : 0;
    // K (EO_S + 1) + 2 EO_p per test, checked per elementary operation.
    tally_ok = tally_ok && r.tally.set_queries == plan.samples * r.tests_run &&
               r.tally.sample_ops == plan.samples * r.tests_run &&
               r.tally.mass_queries == 2 * r.tests_run;
  }
  const double f = static_cast<double>(hits) / static_cast<double>(records.size());
  const double floor = binomial_floor(1.0 - hc.delta_prob, records.size());
  res.passed = f >= floor && tally_ok;
  res.detail = "delta=" + std::to_string(plan.delta) + " eps=" + fmt(plan.epsilon, 3) +
               " K=" + std::to_string(plan.samples) + "; freq " + fmt(f) + " >= " + fmt(floor) +
               "; cost tally " + (tally_ok ? "exact" : "MISMATCH");
  return res;
}

CriterionResult determinism(const AcceptanceOptions& opt) {
  CriterionResult res{12, "determinism", true, "", 0};
  Check check;
  std::size_t runs = 0;
  for (Algorithm a : {Algorithm::robust, Algorithm::pivot_qmf, Algorithm::repeated, Algorithm::qmf}) {
    for (Strategy s : {Strategy::random_adaptive, Strategy::random_fixed, Strategy::mark_all_below}) {
      ExperimentConfig c;
      c.algorithm = a;
      c.generator = GeneratorKind::clustered;
      c.n = 512;
      c.delta = a == Algorithm::qmf ? 0 : 3;
      c.adversary = a == Algorithm::qmf ? Strategy::exact : s;
      c.trials = 60;
      c.seed = mix_seed(opt.seed, 1200 + runs);
      c.jobs = 1;
      const auto first = to_csv(run_trials(c));
      const auto second = to_csv(run_trials(c));
      c.jobs = 3;
      const auto parallel = to_csv(run_trials(c));
      std::ostringstream streamed;
      c.jobs = 2;
      run_to_csv(c, streamed);
      if (first != second || first != parallel || first != streamed.str()) {
        check.fail(std::string(to_string(a)) + "/" + std::string(to_string(s)) + " differs");
      }
      ++runs;
    }
  }
  res.passed = check.ok;
  res.detail = check.ok ? std::to_string(runs) + " configurations byte-identical across reruns, "
                                                 "thread counts and streaming"
                        : check.detail.str();
  return res;
}

using CriterionFn = std::function<CriterionResult(const AcceptanceOptions&)>;

const std::vector<CriterionFn>& registry() {
  static const std::vector<CriterionFn> fns = {
      grover_model,        exponential_search_mean, cutoff_success,   noiseless_qmf,
      pivot_qmf_rank,      worst_case_progress,     repeated_rank,    robust_distance,
      tournament_exhaustive, query_scaling,         hypothesis_selection, determinism,
  };
  return fns;
}

}  // namespace

double binomial_floor(double level, std::size_t trials) {
  return level - 3.0 * std::sqrt(level * (1.0 - level) / static_cast<double>(trials));
}

int acceptance_criteria_count() { return static_cast<int>(registry().size()); }

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options) {
  std::vector<CriterionResult> results;
  const auto& fns = registry();
  for (int id = 1; id <= static_cast<int>(fns.size()); ++id) {
    if (!options.only.empty() &&
        std::find(options.only.begin(), options.only.end(), id) == options.only.end()) {
      continue;
    }
    const auto start = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      r = fns[static_cast<std::size_t>(id - 1)](options);
    } catch (const std::exception& e) {
      r.id = id;
      r.name = "criterion-" + std::to_string(id);
      r.passed = false;
      r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (options.log) {
      *options.log << (r.passed ? "[PASS] " : "[FAIL] ") << "C" << std::setw(2)
                   << std::setfill('0') << r.id << std::setfill(' ') << ' ' << r.name << ": "
                   << r.detail << " (" << std::fixed << std::setprecision(1) << r.seconds
                   << "s)" << std::defaultfloat << std::endl;
    }
    results.push_back(std::move(r));
  }
  return results;
}

std::string acceptance_summary_json(const std::vector<CriterionResult>& results) {
  nlohmann::json j;
  j["passed"] = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
  j["criteria"] = nlohmann::json::array();
  for (const auto& r : results) {
    j["criteria"].push_back(
        {{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail},
         {"seconds", r.seconds}});
  }
  return j.dump(2);
}

}  // namespace rqmf
