// Python bindings for the main operations.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "rqmf/grover.hpp"
#include "rqmf/harness.hpp"
#include "rqmf/instance.hpp"
#include "rqmf/minfind.hpp"
#include "rqmf/rng.hpp"
#include "rqmf/scheffe.hpp"

namespace py = pybind11;
using namespace rqmf;

namespace {

py::dict constants_dict(const DerivedConstants& c) {
  py::dict d;
  d["n_p"] = c.n_p;
  d["n_trials"] = c.n_trials;
  d["t_max"] = c.t_max;
  d["cutoff"] = c.cutoff;
  d["t_tilde"] = c.t_tilde;
  d["k_dummies"] = c.k_dummies;
  d["stage1_reps"] = c.stage1_reps;
  d["stage2_iters"] = c.stage2_iters;
  return d;
}

py::dict record_dict(const TrialRecord& r) {
  py::dict d;
  d["trial"] = r.trial;
  d["seed"] = r.seed;
  d["output_index"] = r.output_index;
  d["output_rank"] = r.output_rank;
  d["output_distance"] = r.output_distance;
  d["quantum_queries"] = r.quantum_queries;
  d["classical_queries"] = r.classical_queries;
  d["success_rank"] = r.success_rank;
  d["success_distance"] = r.success_distance;
  return d;
}

HypothesisSet make_hypotheses(const std::vector<std::vector<double>>& hypotheses,
                              const std::vector<double>& target) {
  std::vector<DiscreteDistribution> hyps;
  hyps.reserve(hypotheses.size());
  for (const auto& p : hypotheses) hyps.emplace_back(p);
  return HypothesisSet(std::move(hyps), DiscreteDistribution(target));
}

}  // namespace

PYBIND11_MODULE(rqmf, m) {
  m.doc() = "Robust quantum minimum finding with an imprecise comparator (simulated)";

  m.def("mix_seed", &mix_seed, py::arg("base"), py::arg("index"),
        "splitmix64(base ^ splitmix64(index))");

  py::class_<Instance>(m, "Instance")
      .def(py::init<std::vector<double>, double>(), py::arg("values"), py::arg("alpha") = 1.0)
      .def("__len__", &Instance::size)
      .def_property_readonly("values", [](const Instance& i) {
        return std::vector<double>(i.values().begin(), i.values().end());
      })
      .def("rank", &Instance::rank, py::arg("j"))
      .def("index_of_rank", &Instance::index_of_rank, py::arg("r"))
      .def("argmin", &Instance::argmin)
      .def("fudge_zone", &Instance::fudge_zone, py::arg("j"))
      .def("delta", [](const Instance& i) { return i.delta().delta; })
      .def("save", [](const Instance& i, const std::string& path) { save_instance(path, i); })
      .def_static("load", [](const std::string& path) { return load_instance(path); });

  m.def(
      "generate_instance",
      [](const std::string& kind, std::size_t n, std::size_t delta, std::uint64_t seed) {
        return generate(parse_generator(kind), n, delta, seed);
      },
      py::arg("kind"), py::arg("n"), py::arg("delta") = 0, py::arg("seed") = 1);

  m.def(
      "success_probability",
      [](std::size_t list_size, std::size_t marked, std::size_t iterations) {
        return success_probability({list_size, marked, iterations});
      },
      py::arg("list_size"), py::arg("marked"), py::arg("iterations"));
  m.def(
      "statevector_reference",
      [](std::size_t list_size, const std::vector<Index>& marked, std::size_t iterations) {
        return statevector_reference(list_size, marked, iterations);
      },
      py::arg("list_size"), py::arg("marked"), py::arg("iterations"));

  m.def(
      "derived_constants",
      [](std::size_t n, std::size_t delta, double delta_prob) {
        return constants_dict(derived_constants(n, delta, delta_prob));
      },
      py::arg("n"), py::arg("delta"), py::arg("delta_prob") = 0.1);

  m.def(
      "find_minimum",
      [](const Instance& instance, const std::string& algorithm, const std::string& adversary,
         double delta_prob, std::uint64_t seed) {
        ExperimentConfig c;
        c.algorithm = parse_algorithm(algorithm);
        c.adversary = parse_strategy(adversary);
        c.delta_prob = delta_prob;
        c.seed = seed;
        return record_dict(run_trial(c, instance, instance.delta().delta, 0));
      },
      py::arg("instance"), py::arg("algorithm") = "robust", py::arg("adversary") = "exact",
      py::arg("delta_prob") = 0.1, py::arg("seed") = 1,
      "One run on the instance; its density parameter is computed from the values.");

  m.def(
      "run_experiment",
      [](const std::string& config_text) {
        const auto config = ExperimentConfig::parse(config_text);
        py::gil_scoped_release release;
        return to_csv(run_trials(config));
      },
      py::arg("config"), "Runs a key=value config and returns the CSV text.");

  m.def(
      "scaling_study",
      [](const std::string& algorithm, std::vector<std::size_t> n_list, std::size_t delta,
         const std::string& adversary, std::size_t trials_per_n, std::uint64_t seed) {
        ScalingConfig c;
        c.algorithm = parse_algorithm(algorithm);
        c.n_list = std::move(n_list);
        c.delta = delta;
        c.adversary = parse_strategy(adversary);
        c.trials_per_n = trials_per_n;
        c.seed = seed;
        ScalingResult r;
        {
          py::gil_scoped_release release;
          r = scaling_study(c);
        }
        py::dict d;
        d["slope"] = r.slope;
        d["intercept"] = r.intercept;
        d["degenerate"] = r.degenerate;
        std::vector<std::pair<std::size_t, double>> points;
        for (const auto& p : r.points) points.emplace_back(p.n, p.mean_queries);
        d["points"] = points;
        return d;
      },
      py::arg("algorithm"), py::arg("n_list"), py::arg("delta") = 0, py::arg("adversary") = "exact",
      py::arg("trials_per_n") = 50, py::arg("seed") = 1);

  m.def("l1_distance", [](const std::vector<double>& p, const std::vector<double>& q) {
    return l1_distance(DiscreteDistribution(p), DiscreteDistribution(q));
  });
  m.def("required_samples", &required_samples, py::arg("n"), py::arg("delta_prob"),
        py::arg("epsilon"));

  m.def(
      "select_hypothesis",
      [](const std::vector<std::vector<double>>& hypotheses, const std::vector<double>& target,
         double epsilon, double delta_prob, std::uint64_t seed) {
        auto hset = make_hypotheses(hypotheses, target);
        HypothesisConfig c;
        c.delta_prob = delta_prob;
        c.epsilon = epsilon;
        c.seed = seed;
        const auto plan = plan_hypothesis_run(hset, c);
        Rng rng(mix_seed(seed, 0));
        hset.draw_samples(plan.samples, rng);
        const auto r = hypothesis_select(hset, delta_prob, plan.delta, splitmix64(mix_seed(seed, 0)));
        py::dict d;
        d["index"] = r.index;
        d["distance"] = r.distance;
        d["samples"] = plan.samples;
        d["delta"] = plan.delta;
        d["tests_run"] = r.tests_run;
        d["quantum_queries"] = r.quantum_queries;
        d["classical_queries"] = r.classical_queries;
        return d;
      },
      py::arg("hypotheses"), py::arg("target"), py::arg("epsilon"), py::arg("delta_prob") = 0.1,
      py::arg("seed") = 1,
      "Draws samples from the target and runs the selection once.");
}
