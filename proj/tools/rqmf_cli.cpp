// Command-line front end: minfind-run, scaling, hypothesis, verify-grover, accept, instance.
#include <cmath>
#include <cstdint>
#include <exception>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rqmf/acceptance.hpp"
#include "rqmf/grover.hpp"
#include "rqmf/harness.hpp"
#include "rqmf/instance.hpp"
#include "rqmf/scheffe.hpp"

namespace {

using namespace rqmf;

// Writes to `path`, or stdout when the path is empty or "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw IoError("cannot open " + path + " for writing");
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  void finish() {
    stream().flush();
    if (!stream()) throw IoError("write failed");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
};

struct Common {
  std::uint64_t seed = 1;
  std::size_t trials = 100;
  std::string out;
  std::size_t jobs = 1;
};

void add_common(CLI::App* cmd, Common& c, std::size_t default_trials) {
  c.trials = default_trials;
  cmd->add_option("--seed", c.seed, "Base seed")->capture_default_str();
  cmd->add_option("--trials", c.trials, "Number of trials")->capture_default_str();
  cmd->add_option("--out", c.out, "Output path (default stdout)");
  cmd->add_option("--jobs", c.jobs, "Worker threads")->capture_default_str()->check(
      CLI::PositiveNumber);
}

std::string format(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

// ---------------------------------------------------------------------------

struct MinfindArgs {
  Common common;
  std::string config;
  std::string algo = "robust";
  std::string generator = "clustered";
  std::size_t n = 1024;
  std::size_t delta = 0;
  std::string adversary = "exact";
  double delta_prob = 0.1;
  std::string instance;
};

int run_minfind(const MinfindArgs& a, const CLI::App& cmd) {
  ExperimentConfig c;
  if (!a.config.empty()) c = ExperimentConfig::load(a.config);
  // Explicit flags override the config file.
  auto given = [&](const char* flag) { return cmd.count(flag) > 0 || a.config.empty(); };
  if (given("--algo")) c.algorithm = parse_algorithm(a.algo);
  if (given("--generator")) c.generator = parse_generator(a.generator);
  if (given("--n")) c.n = a.n;
  if (given("--delta")) c.delta = a.delta;
  if (given("--adversary")) c.adversary = parse_strategy(a.adversary);
  if (given("--delta-prob")) c.delta_prob = a.delta_prob;
  if (given("--trials")) c.trials = a.common.trials;
  if (given("--seed")) c.seed = a.common.seed;
  if (given("--out")) c.out = a.common.out;
  if (given("--instance")) c.instance_file = a.instance;
  if (given("--jobs")) c.jobs = a.common.jobs;
  if (c.generator == GeneratorKind::uniform_spread && c.delta != 0 && c.instance_file.empty() &&
      a.config.empty() && cmd.count("--generator") == 0) {
    c.generator = GeneratorKind::clustered;
  }
  Output out(c.out);
  run_to_csv(c, out.stream());
  out.finish();
  return 0;
}

// ---------------------------------------------------------------------------

struct ScalingArgs {
  Common common;
  std::string algo = "robust";
  std::vector<std::size_t> n_list{256, 512, 1024, 2048, 4096, 8192, 16384};
  std::size_t delta = 0;
  std::string adversary = "exact";
  double delta_prob = 0.1;
};

int run_scaling(const ScalingArgs& a) {
  ScalingConfig c;
  c.algorithm = parse_algorithm(a.algo);
  c.n_list = a.n_list;
  c.delta = a.delta;
  c.adversary = parse_strategy(a.adversary);
  c.trials_per_n = a.common.trials;
  c.seed = a.common.seed;
  c.delta_prob = a.delta_prob;
  c.jobs = a.common.jobs;
  const auto result = scaling_study(c);
  Output out(a.common.out);
  auto& s = out.stream();
  s << "# rqmf-scaling v1 algorithm=" << to_string(c.algorithm) << " delta=" << c.delta
    << " adversary=" << to_string(c.adversary) << " slope=" << format(result.slope)
    << " intercept=" << format(result.intercept) << " degenerate=" << (result.degenerate ? 1 : 0)
    << '\n'
    << "n,mean_queries\n";
  for (const auto& p : result.points) s << p.n << ',' << format(p.mean_queries) << '\n';
  out.finish();
  std::cerr << "slope " << result.slope << (result.degenerate ? " (degenerate: all means equal)" : "")
            << '\n';
  return 0;
}

// ---------------------------------------------------------------------------

struct HypothesisArgs {
  Common common;
  std::string file;
  std::string generate;
  std::size_t n = 256;
  std::size_t domain = 64;
  double density = 32.0;
  double epsilon = 0.0;
  double delta_prob = 0.1;
  std::string save;
};

int run_hypothesis(const HypothesisArgs& a) {
  const HypothesisSet hset =
      a.file.empty()
          ? generate_hypotheses(parse_family(a.generate), a.n, a.domain, a.density, a.common.seed)
          : load_hypotheses(a.file);
  if (!a.save.empty()) save_hypotheses(a.save, hset);
  HypothesisConfig c;
  c.delta_prob = a.delta_prob;
  c.epsilon = a.epsilon;
  c.trials = a.common.trials;
  c.seed = a.common.seed;
  c.jobs = a.common.jobs;
  const auto plan = plan_hypothesis_run(hset, c);
  const auto records = run_hypothesis_trials(hset, c, plan);
  Output out(a.common.out);
  out.stream() << hypothesis_csv(records, plan);
  out.finish();
  std::size_t hits = 0;
  for (const auto& r : records) hits += r.success ? 1 : 0;
  std::cerr << "success " << hits << '/' << records.size() << " (distance <= " << plan.allowed
            << ")\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct GroverArgs {
  std::size_t max_size = 32;
  std::size_t max_iters = 12;
  double tolerance = 1e-10;
  std::string out;
};

int run_verify_grover(const GroverArgs& a) {
  if (a.max_size > kStatevectorLimit) {
    throw CapacityError("--max-size exceeds the statevector limit of " +
                        std::to_string(kStatevectorLimit));
  }
  Output out(a.out);
  auto& s = out.stream();
  s << "size,t,g,analytic,reference,abs_error\n";
  double worst = 0.0;
  for (std::size_t size = 1; size <= a.max_size; ++size) {
    for (std::size_t t = 0; t <= size; ++t) {
      std::vector<Index> marked(t);
      for (std::size_t k = 0; k < t; ++k) marked[k] = k;
      for (std::size_t g = 0; g <= a.max_iters; ++g) {
        const auto dist = statevector_reference(size, marked, g);
        double reference = 0.0;
        for (Index j : marked) reference += dist[j];
        const double analytic = success_probability({size, t, g});
        const double err = std::abs(analytic - reference);
        worst = std::max(worst, err);
        s << size << ',' << t << ',' << g << ',' << format(analytic) << ',' << format(reference)
          << ',' << format(err) << '\n';
      }
    }
  }
  out.finish();
  const bool ok = worst <= a.tolerance;
  std::cerr << "max deviation " << worst << (ok ? " within " : " exceeds ") << a.tolerance << '\n';
  return ok ? 0 : 1;
}

// ---------------------------------------------------------------------------

struct AcceptArgs {
  std::uint64_t seed = AcceptanceOptions{}.seed;
  std::size_t jobs = 1;
  std::vector<int> only;
  std::string out;
};

int run_accept(const AcceptArgs& a) {
  AcceptanceOptions opt;
  opt.seed = a.seed;
  opt.jobs = a.jobs;
  opt.only = a.only;
  opt.log = &std::cout;
  const auto results = run_acceptance(opt);
  if (!a.out.empty()) {
    Output out(a.out);
    out.stream() << acceptance_summary_json(results) << '\n';
    out.finish();
  }
  for (const auto& r : results) {
    if (!r.passed) return 1;
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct InstanceArgs {
  std::string kind = "clustered";
  std::size_t n = 1024;
  std::size_t delta = 0;
  std::uint64_t seed = 1;
  std::string out;
};

int run_instance(const InstanceArgs& a) {
  const auto instance = generate(parse_generator(a.kind), a.n, a.delta, a.seed);
  Output out(a.out);
  write_instance(out.stream(), instance);
  out.finish();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust quantum minimum finding with an imprecise comparator"};
  app.require_subcommand(1);

  MinfindArgs mf;
  auto* minfind = app.add_subcommand("minfind-run", "Run minimum-finding trials, one CSV row each");
  add_common(minfind, mf.common, 100);
  minfind->add_option("--config", mf.config, "key=value config file; flags override it");
  minfind->add_option("--algo", mf.algo, "qmf | pivot-qmf | repeated | robust | tournament")
      ->capture_default_str();
  minfind->add_option("--generator", mf.generator, "uniform-spread | clustered | grid")
      ->capture_default_str();
  minfind->add_option("--n", mf.n, "List size")->capture_default_str();
  minfind->add_option("--delta", mf.delta, "Target fudge density")->capture_default_str();
  minfind->add_option("--adversary", mf.adversary,
                      "exact | random-fixed | mark-all-below | mark-none-below | random-adaptive")
      ->capture_default_str();
  minfind->add_option("--delta-prob", mf.delta_prob, "Failure probability")->capture_default_str();
  minfind->add_option("--instance", mf.instance, "Instance file instead of a generated list");

  ScalingArgs sc;
  auto* scaling = app.add_subcommand("scaling", "Fit log2(mean queries) against log2(n)");
  add_common(scaling, sc.common, 200);
  scaling->add_option("--algo", sc.algo, "Algorithm")->capture_default_str();
  scaling->add_option("--n-list", sc.n_list, "List sizes (at least 4 distinct)")
      ->delimiter(',')
      ->capture_default_str();
  scaling->add_option("--delta", sc.delta, "Target fudge density")->capture_default_str();
  scaling->add_option("--adversary", sc.adversary, "Comparator strategy")->capture_default_str();
  scaling->add_option("--delta-prob", sc.delta_prob, "Failure probability")->capture_default_str();

  HypothesisArgs hy;
  auto* hypothesis = app.add_subcommand("hypothesis", "Hypothesis selection via Scheffe tests");
  add_common(hypothesis, hy.common, 100);
  auto* file_opt = hypothesis->add_option("--file", hy.file, "Hypothesis file");
  auto* gen_opt = hypothesis->add_option("--generate", hy.generate, "gridded | mixture");
  file_opt->excludes(gen_opt);
  hypothesis->add_option("--n", hy.n, "Number of hypotheses")->capture_default_str();
  hypothesis->add_option("--domain", hy.domain, "Domain size")->capture_default_str();
  hypothesis->add_option("--density", hy.density, "Hypotheses per unit of x (gridded)")
      ->capture_default_str();
  hypothesis->add_option("--epsilon", hy.epsilon, "Accuracy (default: half the smallest gap)");
  hypothesis->add_option("--delta-prob", hy.delta_prob, "Failure probability")
      ->capture_default_str();
  hypothesis->add_option("--save", hy.save, "Write the hypothesis set used");

  GroverArgs gv;
  auto* grover = app.add_subcommand("verify-grover", "Compare the analytic model with a statevector");
  grover->add_option("--max-size", gv.max_size, "Largest list size")->capture_default_str();
  grover->add_option("--max-iters", gv.max_iters, "Largest iteration count")->capture_default_str();
  grover->add_option("--tolerance", gv.tolerance, "Allowed absolute deviation")
      ->capture_default_str();
  grover->add_option("--out", gv.out, "CSV path (default stdout)");

  AcceptArgs ac;
  auto* accept = app.add_subcommand("accept", "Run the acceptance suite");
  accept->add_option("--seed", ac.seed, "Base seed")->capture_default_str();
  accept->add_option("--jobs", ac.jobs, "Worker threads")->capture_default_str();
  accept->add_option("--only", ac.only, "Criterion ids to run")->delimiter(',');
  accept->add_option("--out", ac.out, "JSON summary path");

  InstanceArgs in;
  auto* instance = app.add_subcommand("instance", "Generate an instance file");
  instance->add_option("--kind", in.kind, "uniform-spread | clustered | grid")->capture_default_str();
  instance->add_option("--n", in.n, "List size")->capture_default_str();
  instance->add_option("--delta", in.delta, "Target fudge density")->capture_default_str();
  instance->add_option("--seed", in.seed, "Seed")->capture_default_str();
  instance->add_option("--out", in.out, "Output path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*minfind) return run_minfind(mf, *minfind);
    if (*scaling) return run_scaling(sc);
    if (*hypothesis) {
      if (hy.file.empty() && hy.generate.empty()) {
        std::cerr << "hypothesis: one of --file or --generate is required\n";
        return 2;
      }
      return run_hypothesis(hy);
    }
    if (*grover) return run_verify_grover(gv);
    if (*accept) return run_accept(ac);
    if (*instance) return run_instance(in);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
