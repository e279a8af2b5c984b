#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace rqmf {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  std::uint64_t seed = 20240611;
  std::size_t jobs = 1;
  std::vector<int> only;        // empty: every criterion
  std::ostream* log = nullptr;  // one PASS/FAIL line per criterion as they finish
};

/// Number of criteria in the suite (ids 1..count).
int acceptance_criteria_count();

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options);

/// Machine-readable summary: {"passed": bool, "criteria": [{id, name, passed, detail, seconds}]}.
std::string acceptance_summary_json(const std::vector<CriterionResult>& results);

/// One-sided Monte Carlo threshold: level - 3 sqrt(level (1 - level) / trials).
double binomial_floor(double level, std::size_t trials);

}  // namespace rqmf
