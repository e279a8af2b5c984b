#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rqmf/acceptance.hpp"
#include "rqmf/harness.hpp"
#include "rqmf/rng.hpp"

using namespace rqmf;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.algorithm = Algorithm::robust;
  c.generator = GeneratorKind::clustered;
  c.n = 128;
  c.delta = 2;
  c.adversary = Strategy::random_adaptive;
  c.trials = 12;
  c.seed = 42;
  return c;
}

// Reference splitmix64 finalizer written out from its published constants.
std::uint64_t splitmix_ref(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

TEST_CASE("seed mixing") {
  for (std::uint64_t base : {0ull, 1ull, 0xdeadbeefull}) {
    for (std::uint64_t i = 0; i < 5; ++i) {
      CHECK(mix_seed(base, i) == splitmix_ref(base ^ splitmix_ref(i)));
    }
  }
  CHECK(mix_seed(1, 0) != mix_seed(1, 1));
}

TEST_CASE("rank thresholds and names") {
  CHECK(rank_threshold(Algorithm::qmf, 3) == 1);
  CHECK(rank_threshold(Algorithm::pivot_qmf, 4) == 80);
  CHECK(rank_threshold(Algorithm::repeated, 2) == 52);
  CHECK(rank_threshold(Algorithm::robust, 0) == 16);
  for (auto a : {Algorithm::qmf, Algorithm::pivot_qmf, Algorithm::repeated, Algorithm::robust,
                 Algorithm::tournament}) {
    CHECK(parse_algorithm(to_string(a)) == a);
  }
  CHECK_THROWS(parse_algorithm("fastest"));
}

TEST_CASE("config round trip and validation") {
  auto c = small_config();
  c.delta_prob = 0.037;
  c.out = "runs/a.csv";
  c.jobs = 3;
  c.instance_file = "inst.txt";
  const auto back = ExperimentConfig::parse(c.serialize());
  CHECK(back.serialize() == c.serialize());
  CHECK(back.delta_prob == c.delta_prob);
  CHECK(back.instance_file == "inst.txt");

  CHECK_THROWS_AS(ExperimentConfig::parse("colour=blue\n"), std::invalid_argument);
  CHECK_THROWS_AS(ExperimentConfig::parse("n=5\nn=6\n"), std::invalid_argument);
  CHECK_THROWS_AS(ExperimentConfig::parse("n=five\n"), std::invalid_argument);
  CHECK_THROWS_AS(ExperimentConfig::parse("just text\n"), std::invalid_argument);
  const auto partial = ExperimentConfig::parse("# comment\n\nn=300\nalgorithm=qmf\n");
  CHECK(partial.n == 300);
  CHECK(partial.algorithm == Algorithm::qmf);
}

TEST_CASE("run trials basics") {
  auto c = small_config();
  c.trials = 0;
  CHECK(run_trials(c).empty());

  c = small_config();
  const auto records = run_trials(c);
  REQUIRE(records.size() == c.trials);
  const auto inst = make_instance(c);
  for (std::size_t t = 0; t < records.size(); ++t) {
    const auto& r = records[t];
    CHECK(r.trial == t);
    CHECK(r.seed == mix_seed(c.seed, t));
    CHECK(r.output_rank >= 1);
    CHECK(r.output_rank <= c.n);
    CHECK(r.output_rank == inst.rank(r.output_index));
    CHECK(r.delta == inst.delta().delta);
    CHECK(r.success_distance == (r.output_distance <= 2.0));
  }
}

TEST_CASE("determinism across reruns, threads and streaming") {
  auto c = small_config();
  const auto a = to_csv(run_trials(c));
  const auto b = to_csv(run_trials(c));
  CHECK(a == b);
  c.jobs = 4;
  CHECK(to_csv(run_trials(c)) == a);
  std::ostringstream streamed;
  run_to_csv(c, streamed);
  CHECK(streamed.str() == a);
  CHECK(a.rfind(std::string(kCsvSchema), 0) == 0);
}

TEST_CASE("failed runs keep their partial output and are marked incomplete") {
  ExperimentConfig c;
  c.algorithm = Algorithm::robust;
  c.generator = GeneratorKind::clustered;
  c.n = 4;  // clustered with delta 1 gives n <= 2(1 + delta)
  c.delta = 1;
  c.trials = 3;
  std::ostringstream out;
  CHECK_THROWS(run_to_csv(c, out));
  const auto text = out.str();
  CHECK(text.rfind(std::string(kCsvSchema), 0) == 0);
  CHECK(text.find("# incomplete") != std::string::npos);
}

TEST_CASE("instance file feeds a run") {
  const auto path = std::string("test_harness_instance.txt");
  save_instance(path, generate(GeneratorKind::grid, 64, 1, 2));
  auto c = small_config();
  c.instance_file = path;
  c.delta = 99;  // ignored for file instances
  const auto inst = make_instance(c);
  CHECK(inst.size() == 64);
  const auto records = run_trials(c);
  CHECK(records.front().delta == 1);
  std::remove(path.c_str());
}

TEST_CASE("line fitting") {
  const auto [a, b] = fit_line({1, 2, 3, 4}, {3, 5, 7, 9});
  CHECK(a == doctest::Approx(1.0));
  CHECK(b == doctest::Approx(2.0));
  CHECK_THROWS(fit_line({1, 1}, {2, 3}));
}

TEST_CASE("scaling study") {
  ScalingConfig c;
  c.algorithm = Algorithm::tournament;
  c.n_list = {16, 32, 64, 128};
  c.trials_per_n = 2;
  const auto t = scaling_study(c);
  CHECK(t.slope == doctest::Approx(2.0).epsilon(0.05));  // n(n-1)/2 pairs
  for (const auto& p : t.points) CHECK(p.mean_queries == double(p.n * (p.n - 1) / 2));

  c.n_list = {16, 32, 64};
  CHECK_THROWS(scaling_study(c));

  // Doubling delta shrinks the cutoff and the quantum query count of pivot-qmf.
  ScalingConfig lo, hi;
  lo.algorithm = hi.algorithm = Algorithm::pivot_qmf;
  lo.n_list = hi.n_list = {512, 1024, 2048, 4096};
  lo.trials_per_n = hi.trials_per_n = 40;
  lo.delta = 4;
  hi.delta = 8;
  const auto rl = scaling_study(lo), rh = scaling_study(hi);
  for (std::size_t k = 0; k < rl.points.size(); ++k) {
    CHECK(rh.points[k].mean_queries < rl.points[k].mean_queries);
  }
}

TEST_CASE("progress probe") {
  const auto inst = generate(GeneratorKind::grid, 2048, 10, 5);
  ProbeConfig c;
  c.delta = 10;
  c.trials = 2000;
  c.ranks = {5, 20, 33, 200, 1000};
  c.adversary = Strategy::mark_all_below;
  for (const auto& b : progress_probe(inst, c)) {
    CHECK_MESSAGE(b.passed, b.diagnostic);
    if (b.rank == 1000) CHECK(b.bound >= 505.5);
    if (b.converged_zone) CHECK(b.max_next_rank <= 43);
  }
  c.adversary = Strategy::exact;
  c.ranks = {200, 1000};
  for (const auto& b : progress_probe(inst, c)) {
    CHECK(b.passed);
    // Exact marking gives a uniform draw below the pivot: mean r/2.
    CHECK(std::abs(b.mean - double(b.rank) / 2.0) <= 4 * b.stddev / std::sqrt(double(b.samples)) + 0.5);
  }
  c.ranks = {1};
  const auto excluded = progress_probe(inst, c);
  CHECK(excluded.front().excluded);
  CHECK_THROWS(progress_probe(generate(GeneratorKind::grid, 30, 10, 1), c));
}

TEST_CASE("hypothesis runs") {
  const auto hset = generate_hypotheses(HypothesisFamily::mixture, 40, 16, 2.0, 4);
  HypothesisConfig c;
  c.trials = 6;
  c.seed = 9;
  CHECK_THROWS_AS(plan_hypothesis_run(hset, c), std::overflow_error);  // distances reach 3^-20
  c.epsilon = 0.05;
  const auto plan = plan_hypothesis_run(hset, c);
  CHECK(plan.min_distance == 0.0);
  CHECK(plan.samples == required_samples(40, 0.1, plan.epsilon));
  const auto a = run_hypothesis_trials(hset, c, plan);
  c.jobs = 3;
  const auto b = run_hypothesis_trials(hset, c, plan);
  CHECK(hypothesis_csv(a, plan) == hypothesis_csv(b, plan));
  for (const auto& r : a) {
    CHECK(r.tally.set_queries == plan.samples * r.tests_run);
    CHECK(r.tally.mass_queries == 2 * r.tests_run);
  }
}

TEST_CASE("acceptance helpers") {
  CHECK(binomial_floor(0.5, 10000) == doctest::Approx(0.485));
  CHECK(acceptance_criteria_count() == 12);
  AcceptanceOptions opt;
  opt.only = {1};
  const auto r = run_acceptance(opt);
  REQUIRE(r.size() == 1);
  CHECK(r.front().passed);
  const auto json = acceptance_summary_json(r);
  CHECK(json.find("\"passed\"") != std::string::npos);
}
