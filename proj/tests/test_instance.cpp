#include <doctest.h>

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "oracles.hpp"
#include "rqmf/instance.hpp"
#include "rqmf/rng.hpp"

using namespace rqmf;

namespace {

Index index_of(const Instance& inst, double v) {
  const auto vals = inst.values();
  return static_cast<Index>(std::find(vals.begin(), vals.end(), v) - vals.begin());
}

std::vector<Index> zone(const Instance& inst, double v) { return inst.fudge_zone(index_of(inst, v)); }

}  // namespace

TEST_CASE("rank examples") {
  const Instance a({3.0, 1.0, 2.0});
  CHECK(a.rank(index_of(a, 1.0)) == 1);
  CHECK(a.rank(index_of(a, 3.0)) == 3);
  const std::vector<double> v{0.0, 0.5, 2.0, 2.4, 5.0};
  const Instance b(v);
  CHECK(b.rank(3) == oracle::rank(v, 3));
  CHECK(b.rank(3) == 4);
}

TEST_CASE("fudge zone examples") {
  const Instance a({0.0, 0.5, 2.0});
  CHECK(zone(a, 0.0) == std::vector<Index>{1});
  CHECK(zone(a, 2.0).empty());
  const Instance b({0.0, 0.5, 2.0, 2.4, 5.0});
  CHECK(zone(b, 2.0) == std::vector<Index>{3});
}

TEST_CASE("delta examples") {
  CHECK(Instance({0.0, 0.5, 2.0}).delta().delta == 1);
  CHECK(Instance({0.0, 0.5, 2.0}).delta().max_size() == 1);
  CHECK(Instance({0.0, 10.0, 20.0}).delta().delta == 0);
  const std::vector<double> v{0.0, 0.3, 0.6, 0.9, 5.0};
  CHECK(Instance(v).delta().delta == oracle::delta(v));
  CHECK(Instance(v).delta().delta == 2);
}

TEST_CASE("distance exactly 1 is inside the fudge zone") {
  const Instance a({0.0, 1.0, 3.0});
  CHECK(a.close(0, 1));
  CHECK_FALSE(a.close(0, 2));
}

TEST_CASE("construction errors") {
  CHECK_THROWS_AS(Instance({1.0}), std::invalid_argument);
  CHECK_THROWS_AS(Instance({1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS(Instance({0.0, std::nan("")}));
}

TEST_CASE("alpha rescales values") {
  const Instance a({0.0, 1.5, 10.0}, 2.0);
  CHECK(a.value(1) == doctest::Approx(0.75));
  CHECK(a.close(0, 1));
}

TEST_CASE("random instances agree with brute force") {
  Rng rng(7);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t n = 2 + rng.uniform_index(30);
    std::vector<double> v;
    while (v.size() < n) {
      const double x = rng.uniform_real(0.0, 0.4 * double(n));
      if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
    }
    const Instance inst(v);
    std::vector<std::size_t> ranks;
    for (std::size_t j = 0; j < n; ++j) {
      CHECK(inst.rank(j) == oracle::rank(v, j));
      CHECK(inst.index_of_rank(inst.rank(j)) == j);
      const auto z = oracle::fudge(v, j);
      CHECK(inst.fudge_zone(j) == std::vector<Index>(z.begin(), z.end()));
      CHECK(inst.fudge_size(j) == z.size());
      CHECK(inst.fudge_size(j) <= 2 * inst.delta().delta);
      for (Index i : z) CHECK(oracle::fudge(v, i).count(j) == 1);  // symmetry
      const auto [lo, hi] = inst.fudge_range(j);
      CHECK(hi - lo == z.size() + 1);
      ranks.push_back(inst.rank(j));
    }
    std::sort(ranks.begin(), ranks.end());
    for (std::size_t k = 0; k < n; ++k) CHECK(ranks[k] == k + 1);
    CHECK(inst.delta().delta == oracle::delta(v));
    CHECK(inst.argmin() == inst.index_of_rank(1));
  }
}

TEST_CASE("generators hit their targets and are reproducible") {
  CHECK(generate(GeneratorKind::uniform_spread, 10, 0, 3).delta().delta == 0);
  CHECK(generate(GeneratorKind::clustered, 100, 3, 3).delta().delta == 3);
  const auto g = generate(GeneratorKind::grid, 50, 2, 3);
  CHECK(g.delta().delta == 2);
  for (std::size_t j = 0; j < g.size(); ++j) {
    const auto v = std::vector<double>(g.values().begin(), g.values().end());
    CHECK(oracle::fudge(v, j).size() <= 4);
  }
  for (auto kind : {GeneratorKind::uniform_spread, GeneratorKind::clustered, GeneratorKind::grid}) {
    const std::size_t d = kind == GeneratorKind::uniform_spread ? 0 : 4;
    const auto a = generate(kind, 300, d, 99);
    const auto b = generate(kind, 300, d, 99);
    CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
    CHECK(a.delta().delta == d);
  }
  CHECK_THROWS(generate(GeneratorKind::uniform_spread, 10, 2, 1));
  CHECK(parse_generator(to_string(GeneratorKind::grid)) == GeneratorKind::grid);
}

TEST_CASE("instance file round trip") {
  const auto a = generate(GeneratorKind::clustered, 64, 2, 5);
  std::stringstream s;
  write_instance(s, a);
  const auto b = read_instance(s);
  CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin(), b.values().end()));

  std::istringstream bad_count("# n=3 alpha=1\n1\n2\n");
  CHECK_THROWS(read_instance(bad_count));
  std::istringstream no_header("1\n2\n");
  CHECK_THROWS(read_instance(no_header));
  std::istringstream alpha("# n=2 alpha=2\n0\n3\n");
  CHECK(read_instance(alpha).value(1) == doctest::Approx(1.5));
}
