#include "rqmf/instance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace rqmf {

namespace {

template <class T>
void shuffle(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::swap(items[i - 1], items[rng.uniform_index(i)]);
  }
}

std::vector<double> spread_values(std::size_t n, Rng& rng) {
  std::vector<double> values(n);
  double x = rng.uniform_real(0.0, 1.0);
  for (auto& v : values) {
    v = x;
    x += 1.5 + rng.uniform_real();
  }
  return values;
}

std::vector<double> clustered_values(std::size_t n, std::size_t target_delta, Rng& rng) {
  const std::size_t cluster = 2 * target_delta + 1;
  if (cluster > n) {
    throw std::invalid_argument("clustered: cluster size 2*delta+1 = " + std::to_string(cluster) +
                                " exceeds n = " + std::to_string(n));
  }
  std::vector<double> values;
  values.reserve(n);
  double base = rng.uniform_real();
  while (values.size() < n) {
    const std::size_t take = std::min(cluster, n - values.size());
    // Members sit inside [base, base + 0.9]; the next cluster starts more than 1 above.
    std::vector<double> members(take);
    for (std::size_t k = 0; k < take; ++k) {
      members[k] = base + 0.9 * (static_cast<double>(k) + rng.uniform_real(0.05, 0.95)) /
                              static_cast<double>(take);
    }
    values.insert(values.end(), members.begin(), members.end());
    base += 0.9 + 1.2 + rng.uniform_real();
  }
  return values;
}

std::vector<double> grid_values(std::size_t n, std::size_t target_delta, Rng& rng) {
  const double spacing = 2.0 / static_cast<double>(2 * target_delta + 1);
  const double offset = rng.uniform_real();
  std::vector<double> values(n);
  for (std::size_t k = 0; k < n; ++k) values[k] = offset + spacing * static_cast<double>(k);
  return values;
}

}  // namespace

std::size_t FudgeReport::max_size() const {
  return sizes.empty() ? 0 : *std::max_element(sizes.begin(), sizes.end());
}

GeneratorKind parse_generator(std::string_view name) {
  if (name == "uniform-spread") return GeneratorKind::uniform_spread;
  if (name == "clustered") return GeneratorKind::clustered;
  if (name == "grid") return GeneratorKind::grid;
  throw std::invalid_argument("unknown generator '" + std::string(name) + "'");
}

std::string_view to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::uniform_spread: return "uniform-spread";
    case GeneratorKind::clustered: return "clustered";
    case GeneratorKind::grid: return "grid";
  }
  return "?";
}

Instance::Instance(std::vector<double> values, double alpha) : values_(std::move(values)) {
  if (values_.size() < 2) throw std::invalid_argument("instance needs at least 2 values");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("alpha must be positive and finite");
  }
  for (auto& v : values_) {
    if (!std::isfinite(v)) throw std::invalid_argument("instance values must be finite");
    if (alpha != 1.0) v /= alpha;
  }

  order_.resize(values_.size());
  std::iota(order_.begin(), order_.end(), Index{0});
  std::sort(order_.begin(), order_.end(),
            [&](Index a, Index b) { return values_[a] < values_[b]; });

  position_.resize(values_.size());
  sorted_values_.resize(values_.size());
  for (std::size_t p = 0; p < order_.size(); ++p) {
    position_[order_[p]] = p;
    sorted_values_[p] = values_[order_[p]];
    if (p > 0 && sorted_values_[p] == sorted_values_[p - 1]) {
      std::ostringstream msg;
      msg << "duplicate value " << std::setprecision(17) << sorted_values_[p] << " at indices "
          << order_[p - 1] << " and " << order_[p];
      throw std::invalid_argument(msg.str());
    }
  }
}

void Instance::check_index(Index j) const {
  if (j >= values_.size()) {
    throw std::out_of_range("index " + std::to_string(j) + " out of range for instance of size " +
                            std::to_string(values_.size()));
  }
}

double Instance::value(Index j) const {
  check_index(j);
  return values_[j];
}

std::size_t Instance::rank(Index j) const {
  check_index(j);
  return position_[j] + 1;
}

Index Instance::index_of_rank(std::size_t r) const {
  if (r < 1 || r > order_.size()) {
    throw std::out_of_range("rank " + std::to_string(r) + " out of range");
  }
  return order_[r - 1];
}

bool Instance::close(Index i, Index j) const {
  check_index(i);
  check_index(j);
  return std::abs(values_[i] - values_[j]) <= 1.0;
}

std::pair<std::size_t, std::size_t> Instance::fudge_range(Index j) const {
  check_index(j);
  const double x = values_[j];
  // |v - x| <= 1 holds on a contiguous run of the sorted values.
  const auto first = std::partition_point(sorted_values_.begin(), sorted_values_.end(),
                                          [x](double v) { return x - v > 1.0; });
  const auto last = std::partition_point(first, sorted_values_.end(),
                                         [x](double v) { return v - x <= 1.0; });
  return {static_cast<std::size_t>(first - sorted_values_.begin()),
          static_cast<std::size_t>(last - sorted_values_.begin())};
}

std::size_t Instance::fudge_size(Index j) const {
  const auto [first, last] = fudge_range(j);
  return last - first - 1;
}

std::vector<Index> Instance::fudge_zone(Index j) const {
  const auto [first, last] = fudge_range(j);
  std::vector<Index> zone;
  zone.reserve(last - first - 1);
  for (std::size_t p = first; p < last; ++p) {
    if (order_[p] != j) zone.push_back(order_[p]);
  }
  std::sort(zone.begin(), zone.end());
  return zone;
}

FudgeReport Instance::delta() const {
  FudgeReport report;
  report.sizes.resize(values_.size());
  for (Index j = 0; j < values_.size(); ++j) report.sizes[j] = fudge_size(j);
  report.delta = (report.max_size() + 1) / 2;
  return report;
}

Instance generate(GeneratorKind kind, std::size_t n, std::size_t target_delta, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("generate: n must be at least 2");
  Rng rng(seed);
  std::vector<double> values;
  switch (kind) {
    case GeneratorKind::uniform_spread:
      if (target_delta != 0) {
        throw std::invalid_argument("uniform-spread instances always have delta 0");
      }
      values = spread_values(n, rng);
      break;
    case GeneratorKind::clustered:
      values = clustered_values(n, target_delta, rng);
      break;
    case GeneratorKind::grid:
      values = grid_values(n, target_delta, rng);
      break;
  }
  // Indices carry no information about rank.
  shuffle(values, rng);
  return Instance(std::move(values));
}

void write_instance(std::ostream& out, const Instance& instance) {
  out << "# n=" << instance.size() << " alpha=1\n";
  out << std::setprecision(17);
  for (double v : instance.values()) out << v << '\n';
}

Instance read_instance(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("instance file is empty");
  std::size_t n = 0;
  double alpha = 1.0;
  {
    std::istringstream header(line);
    std::string hash, field;
    header >> hash;
    if (hash != "#") throw std::invalid_argument("instance header must start with '# n='");
    bool have_n = false;
    while (header >> field) {
      const auto eq = field.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("bad header field '" + field + "'");
      const auto key = field.substr(0, eq);
      const auto val = field.substr(eq + 1);
      if (key == "n") {
        n = std::stoul(val);
        have_n = true;
      } else if (key == "alpha") {
        alpha = std::stod(val);
      } else {
        throw std::invalid_argument("unknown header key '" + key + "'");
      }
    }
    if (!have_n) throw std::invalid_argument("instance header lacks n=");
  }
  std::vector<double> values;
  values.reserve(n);
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    std::size_t used = 0;
    const double v = std::stod(line, &used);
    if (line.find_first_not_of(" \t\r", used) != std::string::npos) {
      throw std::invalid_argument("trailing characters in value line '" + line + "'");
    }
    values.push_back(v);
  }
  if (values.size() != n) {
    throw std::invalid_argument("header declares n=" + std::to_string(n) + " but file holds " +
                                std::to_string(values.size()) + " values");
  }
  return Instance(std::move(values), alpha);
}

void save_instance(const std::filesystem::path& path, const Instance& instance) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_instance(out, instance);
  if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

Instance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_instance(in);
}

}  // namespace rqmf
