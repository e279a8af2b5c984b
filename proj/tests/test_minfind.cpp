#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include "oracles.hpp"
#include "rqmf/comparator.hpp"
#include "rqmf/grover.hpp"
#include "rqmf/instance.hpp"
#include "rqmf/minfind.hpp"

using namespace rqmf;

namespace {

// Direct evaluation of the constant formulas.
std::size_t ceil_of(double x) { return static_cast<std::size_t>(std::ceil(x - 1e-12)); }

std::vector<double> spread(std::size_t n, std::uint64_t seed) {
  const auto inst = generate(GeneratorKind::uniform_spread, n, 0, seed);
  return {inst.values().begin(), inst.values().end()};
}

}  // namespace

TEST_CASE("derived constants examples") {
  const auto a = derived_constants(1024, 0, 0.1);
  CHECK(a.n_p == 15);
  CHECK(a.n_trials == 120);
  CHECK(derived_constants(256, 0, 0.1).t_max == doctest::Approx(449.6));
  CHECK(derived_constants(1024, 3, 0.1).cutoff == doctest::Approx(144.0));
  CHECK(derived_constants(100, 0, 0.5).stage1_reps == 1);
  const auto b = derived_constants(4096, 4, 0.1);
  CHECK(b.t_tilde == 19 * 4 + 16);
  CHECK(b.k_dummies == 8);
  CHECK(b.n_p == ceil_of(std::log(4096.0 / 19.0) / std::log(1.5)));
  CHECK(b.n_trials == ceil_of(8 * std::max<double>(double(b.n_p), 2 * std::log(4096.0))));
  CHECK(b.stage1_reps == ceil_of(std::log(2 / 0.1) / std::log(4.0)));
  CHECK(b.stage2_iters == ceil_of(2 * std::log(2.0) * std::log2(4 / 0.1) * 92));
  CHECK_THROWS_AS(derived_constants(4, 1, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(derived_constants(100, 0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(derived_constants(100, 0, 1.0), std::invalid_argument);
}

TEST_CASE("extend with dummies") {
  const auto a = extend_with_dummies(10, 4);
  CHECK(a.size() == 14);
  CHECK(a.is_dummy(10));
  CHECK_FALSE(a.is_dummy(9));
  CHECK(extend_with_dummies(10, 0).size() == 10);
  const Instance inst(spread(10, 1));
  NoisyComparator c(inst, Strategy::exact, 1);
  CHECK(c.marked_set(inst.argmin(), 4).size() == 4);
}

TEST_CASE("qmf noiseless on two elements") {
  const Instance inst({0.0, 5.0});
  std::size_t hits = 0;
  for (std::uint64_t s = 0; s < 10000; ++s) {
    NoisyComparator c(inst, Strategy::exact, s);
    hits += qmf_noiseless(c) == 0;
  }
  CHECK(double(hits) / 10000.0 >= 0.5);
}

TEST_CASE("qmf noiseless on 256 elements") {
  const Instance inst(spread(256, 4));
  const std::size_t trials = 2000;
  std::size_t hits = 0;
  for (std::uint64_t s = 0; s < trials; ++s) {
    NoisyComparator c(inst, Strategy::exact, s);
    hits += qmf_noiseless(c) == inst.argmin();
  }
  CHECK(double(hits) / double(trials) >= 0.5 - 3 * std::sqrt(0.25 / double(trials)));
}

TEST_CASE("pivot qmf trace") {
  const Instance inst(spread(512, 9));
  SUBCASE("no rounds returns the initial pivot") {
    NoisyComparator c(inst, Strategy::exact, 3);
    const auto r = pivot_qmf(c, 0, 0);
    CHECK(r.trace.attempted.empty());
    CHECK(r.trace.successful.empty());
    CHECK(r.index == r.trace.final_pivot);
    CHECK(c.quantum_queries() == 0);
  }
  SUBCASE("successful changes strictly decrease rank under the exact strategy") {
    for (std::uint64_t s = 0; s < 50; ++s) {
      NoisyComparator c(inst, Strategy::exact, s);
      const auto r = pivot_qmf(c, 0, 60);
      CHECK(r.trace.attempted.size() == 60);
      std::vector<Index> chain = r.trace.successful;
      chain.push_back(r.index);
      for (std::size_t k = 1; k < chain.size(); ++k) CHECK(inst.rank(chain[k]) < inst.rank(chain[k - 1]));
      // Attempted pivots only change after a success.
      std::size_t changes = 0;
      for (std::size_t k = 1; k < r.trace.attempted.size(); ++k) {
        changes += r.trace.attempted[k] != r.trace.attempted[k - 1];
      }
      CHECK(changes + (r.trace.attempted.back() != r.index) == r.trace.successful.size());
    }
  }
  SUBCASE("rank bound with probability 3/4") {
    const auto c0 = derived_constants(inst.size(), 0, 0.1);
    std::size_t hits = 0;
    const std::size_t trials = 1000;
    for (std::uint64_t s = 0; s < trials; ++s) {
      NoisyComparator c(inst, Strategy::exact, s);
      hits += inst.rank(pivot_qmf(c, 0, c0.n_trials).index) <= 16;
    }
    CHECK(double(hits) / double(trials) >= 0.75 - 3 * std::sqrt(0.75 * 0.25 / double(trials)));
  }
}

TEST_CASE("min select") {
  const Instance inst({0.0, 0.5, 3.0, 10.0});
  SUBCASE("singleton and repeated pools") {
    NoisyComparator c(inst, Strategy::exact, 1);
    const std::vector<Index> one{2};
    CHECK(min_select(c, one, 0.1) == 2);
    const std::vector<Index> same{3, 3, 3};
    CHECK(min_select(c, same, 0.1) == 3);
    CHECK(c.classical_queries() == 0);
    CHECK_THROWS(min_select(c, std::vector<Index>{}, 0.1));
  }
  SUBCASE("adversary prefers 0.5 over 0.0") {
    NoisyComparator c(inst, Strategy::exact, 1);
    c.fix_outcome(0, 1, 1);
    const std::vector<Index> pool{0, 1, 2};
    const Index w = min_select(c, pool, 0.1);
    CHECK(w == 1);
    CHECK(c.classical_queries() == 3);
    CHECK(inst.value(w) - inst.min_value() <= 2.0);
  }
  SUBCASE("query budget and accuracy over random close pools") {
    Rng rng(5);
    for (int rep = 0; rep < 200; ++rep) {
      std::vector<double> v;
      const std::size_t n = 2 + rng.uniform_index(7);
      while (v.size() < n) {
        const double x = rng.uniform_real(0.0, 4.0);
        if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
      }
      const Instance pool_inst(v);
      NoisyComparator c(pool_inst, Strategy::random_adaptive, rep);
      std::vector<Index> pool(n);
      for (std::size_t k = 0; k < n; ++k) pool[k] = k;
      const Index w = min_select(c, pool, 0.1);
      CHECK(c.classical_queries() <= n * (n - 1) / 2);
      CHECK(pool_inst.value(w) - pool_inst.min_value() <= 2.0);
    }
  }
}

TEST_CASE("repeated pivot qmf") {
  const Instance inst(spread(256, 2));
  NoisyComparator c(inst, Strategy::exact, 1);
  const auto r = repeated_pivot_qmf(c, 0.5, 0);
  CHECK(r.pool.size() == 1);  // one Stage-I repetition at delta_prob 0.5
  CHECK(r.index == r.pool.front());
}

TEST_CASE("robust qmf") {
  SUBCASE("minimum at Stage I: only dummies are ever marked") {
    const Instance inst(spread(128, 6));
    std::size_t checked = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
      NoisyComparator c(inst, Strategy::exact, s);
      const auto r = robust_qmf(c, 0.1, 2);
      if (r.stage1_output != inst.argmin()) continue;
      ++checked;
      CHECK(r.pool == std::vector<Index>{r.stage1_output});
      CHECK(r.index == inst.argmin());
    }
    CHECK(checked > 0);
  }
  SUBCASE("pool is deduplicated and free of dummies; queries bounded") {
    const auto inst = generate(GeneratorKind::clustered, 512, 3, 8);
    const auto k = derived_constants(512, 3, 0.1);
    const auto k1 = derived_constants(512, 3, 0.05);
    for (std::uint64_t s = 0; s < 10; ++s) {
      NoisyComparator c(inst, Strategy::mark_all_below, s);
      const auto r = robust_qmf(c, 0.1, 3);
      CHECK(std::is_sorted(r.pool.begin(), r.pool.end()));
      CHECK(std::adjacent_find(r.pool.begin(), r.pool.end()) == r.pool.end());
      for (Index j : r.pool) CHECK(j < inst.size());
      // A search stops once its time passes the cutoff, so the last iteration can overrun
      // it by at most ceil(m) - 1 < sqrt(N').
      const double searches = double(k1.stage1_reps * k1.n_trials + k.stage2_iters);
      const double per_search = k.cutoff + std::sqrt(512.0 + double(k.k_dummies));
      CHECK(double(c.quantum_queries()) <= 2 * per_search * searches);
      CHECK(inst.value(r.index) - inst.min_value() <= 2.0);
    }
  }
  SUBCASE("exact strategy finds the minimum of a spread list") {
    const Instance inst(spread(256, 3));
    std::size_t hits = 0;
    const std::size_t trials = 300;
    for (std::uint64_t s = 0; s < trials; ++s) {
      NoisyComparator c(inst, Strategy::exact, s);
      hits += robust_qmf(c, 0.1, 0).index == inst.argmin();
    }
    CHECK(double(hits) / double(trials) >= 0.9 - 3 * std::sqrt(0.09 / double(trials)));
  }
}
