#include "rqmf/scheffe.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include "rqmf/minfind.hpp"

namespace rqmf {

namespace {

void require_same_domain(const DiscreteDistribution& a, const DiscreteDistribution& b) {
  if (a.domain_size() != b.domain_size()) {
    throw std::invalid_argument("distributions over different domains (" +
                                std::to_string(a.domain_size()) + " vs " +
                                std::to_string(b.domain_size()) + ")");
  }
}

std::uint64_t pair_key(Index i, Index j) {
  return (static_cast<std::uint64_t>(std::min(i, j)) << 32) | std::max(i, j);
}

std::vector<double> normalized(std::vector<double> w) {
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& v : w) v /= total;
  return w;
}

std::vector<double> bell(std::size_t domain, double center, double width) {
  std::vector<double> w(domain);
  for (std::size_t x = 0; x < domain; ++x) {
    const double z = (static_cast<double>(x) - center) / width;
    w[x] = std::exp(-0.5 * z * z);
  }
  return normalized(std::move(w));
}

std::vector<double> random_pmf(std::size_t domain, Rng& rng) {
  std::vector<double> w(domain);
  for (double& v : w) v = -std::log(1.0 - rng.uniform_real());  // Dirichlet(1, ..., 1)
  return normalized(std::move(w));
}

std::vector<double> parse_pmf_line(const std::string& text, std::size_t expected) {
  std::istringstream in(text);
  std::vector<double> values;
  std::string token;
  while (in >> token) {
    std::size_t used = 0;
    values.push_back(std::stod(token, &used));
    if (used != token.size()) throw std::invalid_argument("bad number '" + token + "'");
  }
  if (values.size() != expected) {
    throw std::invalid_argument("pmf line has " + std::to_string(values.size()) +
                                " entries, expected " + std::to_string(expected));
  }
  return values;
}

}  // namespace

DiscreteDistribution::DiscreteDistribution(std::vector<double> pmf) : pmf_(std::move(pmf)) {
  if (pmf_.empty()) throw std::invalid_argument("distribution over an empty domain");
  double total = 0.0;
  for (double v : pmf_) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("pmf entries must be finite and non-negative");
    }
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("pmf sums to " + std::to_string(total) + ", not 1");
  }
}

std::vector<std::size_t> scheffe_set(const DiscreteDistribution& p_i,
                                     const DiscreteDistribution& p_j, CostTally* tally) {
  require_same_domain(p_i, p_j);
  std::vector<std::size_t> set;
  for (std::size_t x = 0; x < p_i.domain_size(); ++x) {
    if (p_i[x] > p_j[x]) set.push_back(x);
  }
  if (tally) tally->set_queries += p_i.domain_size();
  return set;
}

double mass(const DiscreteDistribution& p, std::span<const std::size_t> set, CostTally* tally) {
  double total = 0.0;
  for (auto x : set) {
    if (x >= p.domain_size()) throw std::out_of_range("set point outside the domain");
    total += p[x];
  }
  if (tally) ++tally->mass_queries;
  return total;
}

double empirical_mass(const SampleCounts& samples, std::span<const std::size_t> set) {
  if (samples.total == 0) throw std::invalid_argument("empirical mass of an empty sample");
  std::uint64_t inside = 0;
  for (auto x : set) {
    if (x >= samples.counts.size()) throw std::out_of_range("set point outside the domain");
    inside += samples.counts[x];
  }
  return static_cast<double>(inside) / static_cast<double>(samples.total);
}

double l1_distance(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  require_same_domain(p, q);
  double total = 0.0;
  for (std::size_t x = 0; x < p.domain_size(); ++x) total += std::abs(p[x] - q[x]);
  return total;
}

double x_value(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  const double d = l1_distance(p, q);
  if (d == 0.0) throw std::domain_error("x_value undefined for a hypothesis equal to the target");
  return -std::log(d) / std::log(3.0);
}

std::uint64_t required_samples(std::size_t n, double delta_prob, double epsilon) {
  if (n < 2) throw std::invalid_argument("required_samples: n must be at least 2");
  if (!(delta_prob > 0.0 && delta_prob < 1.0)) {
    throw std::invalid_argument("required_samples: delta_prob must lie in (0, 1)");
  }
  if (!(epsilon > 0.0)) throw std::invalid_argument("required_samples: epsilon must be positive");
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  const double k = 160.0 * std::log2(pairs / delta_prob) / (epsilon * epsilon);
  if (!(k < 0x1p62)) {
    throw std::overflow_error("required_samples: epsilon " + std::to_string(epsilon) +
                              " needs more than 2^62 samples");
  }
  // Guard against k landing a hair above an integer through rounding.
  const double r = std::round(k);
  if (std::abs(k - r) < 1e-9 * std::max(1.0, r)) return static_cast<std::uint64_t>(r);
  return static_cast<std::uint64_t>(std::ceil(k));
}

// ---------------------------------------------------------------------------
// HypothesisSet

HypothesisSet::HypothesisSet(std::vector<DiscreteDistribution> hypotheses,
                             DiscreteDistribution target)
    : hypotheses_(std::move(hypotheses)), target_(std::move(target)) {
  if (hypotheses_.size() < 2) throw std::invalid_argument("need at least 2 hypotheses");
  for (const auto& h : hypotheses_) require_same_domain(h, target_);
}

void HypothesisSet::draw_samples(std::uint64_t k, Rng& rng) {
  if (k == 0) throw std::invalid_argument("sample count must be positive");
  // Multinomial(k, q) as a chain of conditional binomials.
  SampleCounts s;
  s.counts.assign(domain_size(), 0);
  s.total = k;
  std::uint64_t remaining = k;
  double mass_left = 1.0;
  for (std::size_t x = 0; x + 1 < domain_size() && remaining > 0; ++x) {
    const double p = mass_left > 0.0 ? std::clamp(target_[x] / mass_left, 0.0, 1.0) : 1.0;
    std::binomial_distribution<std::uint64_t> draw(remaining, p);
    const auto c = draw(rng);
    s.counts[x] = c;
    remaining -= c;
    mass_left -= target_[x];
  }
  s.counts.back() += remaining;
  samples_ = std::move(s);
}

void HypothesisSet::set_samples(SampleCounts samples) {
  if (samples.counts.size() != domain_size()) {
    throw std::invalid_argument("sample counts do not match the domain");
  }
  const auto total = std::accumulate(samples.counts.begin(), samples.counts.end(), std::uint64_t{0});
  if (total != samples.total || total == 0) throw std::invalid_argument("bad sample total");
  samples_ = std::move(samples);
}

std::vector<double> HypothesisSet::target_distances() const {
  std::vector<double> d(size());
  for (std::size_t i = 0; i < size(); ++i) d[i] = l1_distance(hypotheses_[i], target_);
  return d;
}

Index scheffe_test(Index i, Index j, const HypothesisSet& hset, CostTally* tally) {
  if (i == j) throw std::invalid_argument("scheffe_test needs two distinct hypotheses");
  if (!hset.has_samples()) throw std::invalid_argument("scheffe_test before samples were drawn");
  const auto& p_i = hset.hypothesis(i);
  const auto& p_j = hset.hypothesis(j);
  const auto set = scheffe_set(p_i, p_j);
  const double mu = empirical_mass(hset.samples(), set);
  const double dev_i = std::abs(mass(p_i, set, tally) - mu);
  const double dev_j = std::abs(mass(p_j, set, tally) - mu);
  if (tally) {
    // One membership test and one accumulation per sample.
    tally->set_queries += hset.samples().total;
    tally->sample_ops += hset.samples().total;
  }
  return dev_i <= dev_j ? i : j;
}

// ---------------------------------------------------------------------------
// ScheffeComparator

ScheffeComparator::ScheffeComparator(const HypothesisSet& hset, std::uint64_t seed)
    : Comparator(seed), hset_(hset) {
  if (!hset_.has_samples()) throw std::invalid_argument("Scheffe comparator needs samples");
}

Index ScheffeComparator::decide(Index i, Index j) {
  const auto key = pair_key(i, j);
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  // The test is run in canonical order so the outcome does not depend on argument order.
  const Index lo = std::min(i, j);
  const Index hi = std::max(i, j);
  const Index winner = scheffe_test(lo, hi, hset_, &tally_);
  ++tests_run_;
  memo_.emplace(key, winner);
  return winner;
}

MarkedSet::Core ScheffeComparator::build_marked(Index pivot) {
  MarkedSet::Core core;
  core.pivot = pivot;
  core.real_size = hset_.size();
  core.above_begin = core.real_size;
  for (Index j = 0; j < hset_.size(); ++j) {
    if (j != pivot && decide(pivot, j) == j) {
      core.marked_extra.push_back(j);
    } else {
      core.unmarked_extra.push_back(j);
    }
  }
  return core;
}

Instance ground_truth_instance(const HypothesisSet& hset) {
  const auto dist = hset.target_distances();
  std::vector<double> values(dist.size());
  double smallest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (dist[i] > 0.0) {
      values[i] = std::log(dist[i]) / std::log(3.0);
      smallest = std::min(smallest, values[i]);
    }
  }
  if (!std::isfinite(smallest)) throw std::invalid_argument("every hypothesis equals the target");
  std::size_t exact = 0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (dist[i] == 0.0) {
      values[i] = smallest - 10.0 - static_cast<double>(exact);
      ++exact;
    }
  }
  return Instance(std::move(values));
}

HypothesisFamily parse_family(std::string_view name) {
  if (name == "gridded") return HypothesisFamily::gridded;
  if (name == "mixture") return HypothesisFamily::mixture;
  throw std::invalid_argument("unknown hypothesis family '" + std::string(name) + "'");
}

std::string_view to_string(HypothesisFamily family) {
  return family == HypothesisFamily::gridded ? "gridded" : "mixture";
}

HypothesisSet generate_hypotheses(HypothesisFamily family, std::size_t n, std::size_t domain,
                                  double x_density, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("need at least 2 hypotheses");
  if (domain < 2) throw std::invalid_argument("domain must hold at least 2 points");
  if (!(x_density > 0.0)) throw std::invalid_argument("x_density must be positive");
  Rng rng(seed);
  // Consecutive hypotheses sit a factor ratio apart in distance to the target, which is
  // 1/x_density apart in x.
  const double ratio = std::pow(3.0, 1.0 / x_density);
  const double d = static_cast<double>(domain);

  std::vector<std::vector<double>> pmfs;
  pmfs.reserve(n);
  std::vector<double> target;
  if (family == HypothesisFamily::gridded) {
    const double width = d / 10.0;
    const double center = 0.3 * d + rng.uniform_real(-0.5, 0.5);
    const double max_shift = 0.4 * d;
    target = bell(domain, center, width);
    pmfs.push_back(target);
    for (std::size_t k = 1; k < n; ++k) {
      const double shift = max_shift / std::pow(ratio, static_cast<double>(n - 1 - k));
      pmfs.push_back(bell(domain, center + shift, width));
    }
  } else {
    target = random_pmf(domain, rng);
    pmfs.push_back(target);
    for (std::size_t k = 1; k < n; ++k) {
      const double weight = 1.0 / std::pow(ratio, static_cast<double>(n - 1 - k));
      const auto other = random_pmf(domain, rng);
      std::vector<double> mix(domain);
      for (std::size_t x = 0; x < domain; ++x) {
        mix[x] = (1.0 - weight) * target[x] + weight * other[x];
      }
      pmfs.push_back(normalized(std::move(mix)));
    }
  }
  for (std::size_t i = pmfs.size(); i > 1; --i) std::swap(pmfs[i - 1], pmfs[rng.uniform_index(i)]);

  std::vector<DiscreteDistribution> hypotheses;
  hypotheses.reserve(n);
  for (auto& p : pmfs) hypotheses.emplace_back(std::move(p));
  return HypothesisSet(std::move(hypotheses), DiscreteDistribution(std::move(target)));
}

void write_hypotheses(std::ostream& out, const HypothesisSet& hset) {
  out << "# n=" << hset.size() << " d=" << hset.domain_size() << '\n';
  out << std::setprecision(17);
  auto line = [&](const DiscreteDistribution& p) {
    for (std::size_t x = 0; x < p.domain_size(); ++x) out << (x ? " " : "") << p[x];
    out << '\n';
  };
  for (const auto& h : hset.hypotheses()) line(h);
  out << "q: ";
  line(hset.target());
}

HypothesisSet read_hypotheses(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("hypothesis file is empty");
  std::size_t n = 0, d = 0;
  {
    std::istringstream header(line);
    std::string hash, field;
    header >> hash;
    if (hash != "#") throw std::invalid_argument("hypothesis header must start with '# n='");
    while (header >> field) {
      const auto eq = field.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("bad header field '" + field + "'");
      const auto key = field.substr(0, eq);
      const auto val = std::stoul(field.substr(eq + 1));
      if (key == "n") n = val;
      else if (key == "d") d = val;
      else throw std::invalid_argument("unknown header key '" + key + "'");
    }
    if (n == 0 || d == 0) throw std::invalid_argument("hypothesis header needs n= and d=");
  }
  std::vector<DiscreteDistribution> hypotheses;
  std::optional<DiscreteDistribution> target;
  while (std::getline(in, line)) {
    const auto start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;
    if (line.compare(start, 2, "q:") == 0) {
      if (target) throw std::invalid_argument("more than one q: line");
      target.emplace(parse_pmf_line(line.substr(start + 2), d));
    } else {
      hypotheses.emplace_back(parse_pmf_line(line, d));
    }
  }
  if (hypotheses.size() != n) {
    throw std::invalid_argument("header declares n=" + std::to_string(n) + " but file holds " +
                                std::to_string(hypotheses.size()) + " hypotheses");
  }
  if (!target) throw std::invalid_argument("hypothesis file lacks a q: line");
  return HypothesisSet(std::move(hypotheses), std::move(*target));
}

void save_hypotheses(const std::filesystem::path& path, const HypothesisSet& hset) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_hypotheses(out, hset);
  if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

HypothesisSet load_hypotheses(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_hypotheses(in);
}

SelectionResult hypothesis_select(const HypothesisSet& hset, double delta_prob,
                                  std::size_t delta_density, std::uint64_t seed) {
  ScheffeComparator comparator(hset, seed);
  SelectionResult result;
  if (hset.size() > 2 * (1 + delta_density)) {
    result.index = robust_qmf(comparator, delta_prob, delta_density).index;
  } else {
    // Too few hypotheses for the quantum stages: the tournament over all of them.
    std::vector<Index> all(hset.size());
    std::iota(all.begin(), all.end(), Index{0});
    result.index = min_select(comparator, all, delta_prob);
  }
  result.distance = l1_distance(hset.hypothesis(result.index), hset.target());
  result.tests_run = comparator.tests_run();
  result.tally = comparator.tally();
  result.quantum_queries = comparator.quantum_queries();
  result.classical_queries = comparator.classical_queries();
  return result;
}

}  // namespace rqmf
