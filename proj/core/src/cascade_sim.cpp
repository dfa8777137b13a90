#include "cascade/cascade_sim.hpp"

#include <cmath>
#include <iostream>
#include <json.hpp>
#include <string>

#include "cascade/analysis.hpp"
#include "cascade/csv.hpp"
#include "cascade/errors.hpp"
#include "cascade/parallel.hpp"
#include "cascade/words.hpp"

namespace cascade {

namespace {

constexpr std::uint64_t kInteriorTag = 1;
constexpr std::uint64_t kLeafTag = 2;

}  // namespace

SamplePool::SamplePool(std::vector<double> values, PoolMeta meta)
    : values_(std::move(values)), meta_(std::move(meta)) {
  meta_.pool_size = values_.size();
}

double SamplePool::mean() const {
  if (values_.empty()) return 0.0;
  double sum = 0.0;
  double comp = 0.0;
  for (double x : values_) {
    const double t = sum + x;
    comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  return (sum + comp) / static_cast<double>(values_.size());
}

bool SamplePool::mean_within_tolerance() const {
  return std::abs(mean() - 1.0) <= 5.0 / std::sqrt(static_cast<double>(values_.size()));
}

std::string SamplePool::to_csv() const { return column_csv("value", values_); }

std::string SamplePool::meta_json() const {
  nlohmann::ordered_json j;
  j["b"] = meta_.b;
  j["generation"] = meta_.generation;
  j["pool_size"] = meta_.pool_size;
  j["inner_iterations"] = meta_.inner_iterations;
  j["source"] = meta_.source;
  j["seed"] = meta_.seed;
  return j.dump(2) + "\n";
}

WeightSource::WeightSource(const SamplePool& pool) : source_(std::cref(pool)) {
  if (pool.size() == 0) throw InputError("weight source pool is empty");
  const double m = pool.mean();
  if (!(m > 0.0)) throw InputError("weight source pool has non-positive mean");
  scale_ = 1.0 / m;
}

double WeightSource::draw(Stream& rng) const {
  if (const auto* law = std::get_if<WeightLaw>(&source_)) return law->draw(rng);
  const SamplePool& pool = std::get<1>(source_).get();
  return pool[rng.below(pool.size())] * scale_;
}

std::string WeightSource::describe() const {
  if (const auto* law = std::get_if<WeightLaw>(&source_)) return law->describe();
  const auto& meta = std::get<1>(source_).get().meta();
  return "pool(generation=" + std::to_string(meta.generation) + ", mean-one)";
}

double sample_Yn(const WeightLaw& law, int b, int n, Stream& rng) {
  if (b < 2) throw InputError("sample_Yn: b must be >= 2");
  if (n < 0) throw InputError("sample_Yn: n must be >= 0");
  const std::uint64_t leaves = checked_power(b, static_cast<std::size_t>(n));
  // Bottom-up: node value = b^-1 sum_children W(child) * value(child).
  std::vector<double> values(leaves, 1.0);
  const double inv_b = 1.0 / b;
  for (int depth = n; depth >= 1; --depth) {
    const std::size_t parents = values.size() / static_cast<std::size_t>(b);
    std::vector<double> up(parents, 0.0);
    for (std::size_t p = 0; p < parents; ++p) {
      double acc = 0.0;
      for (int c = 0; c < b; ++c) acc += law.draw(rng) * values[p * b + c];
      up[p] = acc * inv_b;
    }
    values = std::move(up);
  }
  return values.front();
}

double exact_yn_second_moment(double m2, int b, int n) {
  double e = 1.0;
  for (int k = 0; k < n; ++k) e = (m2 * e + b - 1.0) / b;
  return e;
}

SamplePool fixed_point_pool(const WeightSource& weights, int b, const PoolConfig& config,
                            std::uint64_t seed, int generation) {
  if (b < 2) throw InputError("fixed_point_pool: b must be >= 2");
  if (config.pool_size < 1000) throw InputError("fixed_point_pool: pool size must be >= 1000");
  if (config.inner_iterations < 1) throw InputError("fixed_point_pool: K must be >= 1");
  if (config.pool_size > kNodeCap) throw ResourceError("fixed_point_pool: pool size exceeds cap");

  const std::size_t size = config.pool_size;
  const std::uint64_t pool_seed = derive(seed, static_cast<std::uint64_t>(generation));
  const double inv_b = 1.0 / b;
  std::vector<double> previous(size, 1.0);
  std::vector<double> next(size);
  for (int round = 0; round < config.inner_iterations; ++round) {
    const std::uint64_t round_id = static_cast<std::uint64_t>(round);
    parallel_for(size, config.workers, [&](std::size_t i) {
      Stream rng(pool_seed, derive(round_id, i));
      double acc = 0.0;
      for (int j = 0; j < b; ++j) {
        const double w = weights.draw(rng);
        acc += w * previous[rng.below(size)];
      }
      next[i] = acc * inv_b;
    });
    // Pin the mean to one; left alone it performs a neutral random walk.
    const double mean = compensated_sum(next) / static_cast<double>(size);
    if (!(mean > 0.0)) throw DomainError("fixed_point_pool: population collapsed to zero");
    for (double& x : next) x /= mean;
    previous.swap(next);
  }

  PoolMeta meta;
  meta.b = b;
  meta.generation = generation;
  meta.inner_iterations = config.inner_iterations;
  meta.source = weights.describe();
  meta.seed = seed;
  SamplePool pool(std::move(previous), std::move(meta));
  if (!pool.mean_within_tolerance()) {
    std::clog << "warning: pool generation " << generation << " mean " << pool.mean()
              << " is more than 5/sqrt(P) from 1\n";
  }
  return pool;
}

std::vector<SamplePool> iterate_T_pools(const WeightLaw& law, int b, int n,
                                        const PoolConfig& config, std::uint64_t seed) {
  const Domain domain = validate_for_cascade(law, b);
  if (domain == Domain::kOutside) {
    throw DomainError("iterate_T_pools: " + law.describe() + " is " +
                      std::string(to_string(domain)) + " for b = " + std::to_string(b) +
                      "; T can only be iterated on laws with 1 < m2 < b - 1");
  }
  std::vector<SamplePool> pools;
  pools.reserve(static_cast<std::size_t>(std::max(n, 0)));
  for (int k = 1; k <= n; ++k) {
    if (k == 1) {
      pools.push_back(fixed_point_pool(WeightSource(law), b, config, seed, 1));
    } else {
      pools.push_back(fixed_point_pool(WeightSource(pools.back()), b, config, seed, k));
    }
  }
  return pools;
}

std::vector<double> sample_Z(std::span<const double> pool, double sigma) {
  if (!(sigma > 0.0)) throw InputError("sample_Z: sigma must be > 0");
  std::vector<double> z(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) z[i] = (pool[i] - 1.0) / sigma;
  return z;
}

double IncrementPath::total() const {
  double sum = 0.0;
  for (double x : increments) sum += x;
  return sum;
}

std::string IncrementPath::to_csv() const {
  CsvWriter csv({"word", "increment"});
  for (std::size_t r = 0; r < increments.size(); ++r) {
    csv.row(word_at(b, static_cast<std::size_t>(depth), r).str(), increments[r]);
  }
  return csv.str();
}

IncrementPath cascade_path(const WeightSource& interior, const WeightSource& leaves, int b, int j,
                           std::uint64_t seed) {
  if (b < 2) throw InputError("cascade_path: b must be >= 2");
  if (j < 0) throw InputError("cascade_path: depth must be >= 0");
  const std::uint64_t width = checked_power(b, static_cast<std::size_t>(j));

  std::vector<double> products{1.0};
  for (int depth = 1; depth <= j; ++depth) {
    std::vector<double> next(products.size() * static_cast<std::size_t>(b));
    for (std::size_t r = 0; r < next.size(); ++r) {
      Stream rng(seed, derive(node_id(b, static_cast<std::size_t>(depth), r), kInteriorTag));
      next[r] = products[r / static_cast<std::size_t>(b)] * interior.draw(rng);
    }
    products = std::move(next);
  }

  IncrementPath path;
  path.b = b;
  path.depth = j;
  path.kind = PathKind::kRaw;
  path.increments.resize(width);
  const double scale = std::pow(static_cast<double>(b), -j);
  for (std::uint64_t r = 0; r < width; ++r) {
    Stream rng(seed, derive(node_id(b, static_cast<std::size_t>(j), r), kLeafTag));
    path.increments[r] = scale * leaves.draw(rng) * products[r];
  }
  return path;
}

IncrementPath normalize_path(const IncrementPath& path, double sigma) {
  if (path.kind != PathKind::kRaw) throw InputError("normalize_path: path is already normalized");
  if (!(sigma > 0.0)) throw InputError("normalize_path: sigma must be > 0");
  IncrementPath out = path;
  out.kind = PathKind::kNormalized;
  out.sigma = sigma;
  const double cell = std::pow(static_cast<double>(path.b), -path.depth);
  for (double& x : out.increments) x = (x - cell) / sigma;
  return out;
}

}  // namespace cascade
