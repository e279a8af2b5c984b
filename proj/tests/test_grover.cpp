#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "oracles.hpp"
#include "rqmf/comparator.hpp"
#include "rqmf/grover.hpp"
#include "rqmf/instance.hpp"

using namespace rqmf;

TEST_CASE("success probability examples") {
  CHECK(success_probability({37, 0, 5}) == 0.0);
  CHECK(success_probability({16, 4, 0}) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(success_probability({4, 1, 1}) == doctest::Approx(1.0).epsilon(1e-12));
  const std::vector<Index> one{2};
  const auto dist = statevector_reference(4, one, 1);
  CHECK(dist[2] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("analytic model against a two-amplitude recursion") {
  for (std::size_t n = 1; n <= 40; ++n) {
    for (std::size_t t = 0; t <= n; ++t) {
      for (std::size_t g = 0; g <= 15; ++g) {
        CHECK(std::abs(success_probability({n, t, g}) - oracle::grover_marked_probability(n, t, g)) <
              1e-10);
      }
    }
  }
}

TEST_CASE("statevector reference edge cases") {
  for (std::size_t g = 0; g < 6; ++g) {
    const auto none = statevector_reference(8, {}, g);
    for (double p : none) CHECK(p == doctest::Approx(0.125).epsilon(1e-12));
    const std::vector<Index> all{0, 1, 2, 3, 4, 5, 6, 7};
    const auto full = statevector_reference(8, all, g);
    for (double p : full) CHECK(p == doctest::Approx(0.125).epsilon(1e-12));
  }
  const std::vector<Index> two{1, 6};
  const auto dist = statevector_reference(8, two, 1);
  const double s = success_probability({8, 2, 1});
  for (std::size_t j = 0; j < 8; ++j) {
    const double expected = (j == 1 || j == 6) ? s / 2 : (1 - s) / 6;
    CHECK(std::abs(dist[j] - expected) < 1e-12);
  }
  CHECK_THROWS_AS(statevector_reference(kStatevectorLimit + 1, {}, 1), CapacityError);
}

TEST_CASE("sample measurement class behaviour and query accounting") {
  const Instance inst(std::vector<double>{0.0, 3.0, 6.0, 9.0, 12.0, 15.0, 18.0, 21.0});
  NoisyComparator c(inst, Strategy::exact, 5);
  const auto none = c.marked_set(0);  // minimum: nothing marked
  std::set<Index> seen;
  for (int k = 0; k < 400; ++k) seen.insert(sample_measurement(c, {8, 0, 3}, none));
  CHECK(c.quantum_queries() == 400 * 6);
  CHECK(seen.size() == 8);

  const auto top = c.marked_set(7, 0);  // maximum: everything else marked
  const double p = success_probability({8, 7, 2});
  std::size_t hits = 0;
  for (int k = 0; k < 4000; ++k) hits += top.contains(sample_measurement(c, {8, 7, 2}, top));
  CHECK(std::abs(double(hits) / 4000.0 - p) <= 3 * std::sqrt(p * (1 - p) / 4000.0));
  CHECK_THROWS(sample_measurement(c, {8, 3, 2}, top));  // marked count mismatch
}

TEST_CASE("sample measurement frequency near the optimal iteration count") {
  std::vector<double> v(1024);
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = 3.0 * double(k);
  const Instance inst(v);
  NoisyComparator c(inst, Strategy::exact, 11);
  const auto marked = c.marked_set(1);  // rank 2: one marked element
  const std::size_t g = 22;             // ~ pi/4 sqrt(1024) - 3, so p is not 1
  const double p = success_probability({1024, 1, g});
  const std::size_t draws = 100000;
  std::size_t hits = 0;
  for (std::size_t k = 0; k < draws; ++k) hits += sample_measurement(c, {1024, 1, g}, marked) == 0;
  const double f = double(hits) / double(draws);
  CHECK(std::abs(f - p) <= 3 * std::sqrt(p * (1 - p) / double(draws)) + 1e-12);
}

TEST_CASE("qsearch with cutoff") {
  const Instance inst(std::vector<double>{0.0, 3.0, 6.0, 9.0, 12.0, 15.0});
  SUBCASE("nothing marked runs past the cutoff") {
    NoisyComparator c(inst, Strategy::exact, 2);
    const auto out = qsearch_with_cutoff(c, 0, 40.0, false, 6);
    CHECK_FALSE(out.found_marked);
    CHECK(out.search_time > 40.0);
    CHECK(c.quantum_queries() == 2 * static_cast<std::uint64_t>(out.search_time));
    CHECK_THROWS(qsearch_with_cutoff(c, 0, kUnbounded, false, 6));
  }
  SUBCASE("an initial draw on a marked element returns at time 0") {
    NoisyComparator c(inst, Strategy::exact, 2);
    const auto out = qsearch_with_cutoff(c, 5, kUnbounded, false, 6);  // 5 of 6 marked
    CHECK(out.found_marked);
    CHECK(inst.value(out.result_index) < inst.value(5));
  }
  SUBCASE("marked results, cutoff respected, counters consistent") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      NoisyComparator c(inst, Strategy::exact, seed);
      const auto out = qsearch_with_cutoff(c, 3, 5.0, false, 6);
      if (out.found_marked) {
        CHECK(inst.value(out.result_index) < inst.value(3));
      } else {
        CHECK(out.search_time > 5.0);
      }
      CHECK(c.quantum_queries() == 2 * static_cast<std::uint64_t>(out.search_time));
    }
  }
  SUBCASE("log counting adds log2 of the list size per measurement") {
    NoisyComparator c(inst, Strategy::exact, 2);
    const auto out = qsearch_with_cutoff(c, 0, 10.0, true, 6);
    const double lg = std::log2(6.0);
    const double g_total = double(c.quantum_queries()) / 2.0;
    const double measurements = (out.search_time - g_total) / lg;
    CHECK(std::abs(measurements - std::round(measurements)) < 1e-9);
    CHECK(measurements >= 1.0);
  }
}

TEST_CASE("exponential search mean over a rank-2 pivot") {
  std::vector<double> v(256);
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = 2.0 * double((k * 37) % 256);
  const Instance inst(v);
  const Index pivot = inst.index_of_rank(2);
  double total = 0;
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    NoisyComparator c(inst, Strategy::exact, seed);
    total += qsearch_with_cutoff(c, pivot, kUnbounded, false, 256).search_time;
  }
  CHECK(total / 2000.0 <= 4.5 * std::sqrt(256.0));
}
