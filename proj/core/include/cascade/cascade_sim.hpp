#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cascade/random.hpp"
#include "cascade/weight_law.hpp"

namespace cascade {

struct PoolMeta {
  int b = 3;
  int generation = 1;  // the pool approximates T^generation mu
  std::size_t pool_size = 0;
  int inner_iterations = 0;
  std::string source;  // description of the weight source
  std::uint64_t seed = 0;
};

// Empirical reservoir approximating a unit-mean law.
class SamplePool {
 public:
  SamplePool(std::vector<double> values, PoolMeta meta);

  std::span<const double> values() const noexcept { return values_; }
  const PoolMeta& meta() const noexcept { return meta_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  double mean() const;
  // |mean - 1| <= 5 / sqrt(P).
  bool mean_within_tolerance() const;

  // Value CSV (header "value") and JSON metadata sidecar.
  std::string to_csv() const;
  std::string meta_json() const;

 private:
  std::vector<double> values_;
  PoolMeta meta_;
};

// Where weights come from: a parametric law or an existing pool (resampled
// uniformly with replacement and rescaled to mean one, since T acts on P_1).
class WeightSource {
 public:
  WeightSource(const WeightLaw& law) : source_(law) {}  // NOLINT(implicit)
  WeightSource(const SamplePool& pool);                  // NOLINT(implicit)

  double draw(Stream& rng) const;
  std::string describe() const;

 private:
  std::variant<WeightLaw, std::reference_wrapper<const SamplePool>> source_;
  double scale_ = 1.0;
};

struct PoolConfig {
  std::size_t pool_size = 100000;  // P
  int inner_iterations = 20;       // K
  unsigned workers = 1;
};

// One exact draw of Y_n = b^-n sum_{|w|=n} prod_k W(w|_k).
double sample_Yn(const WeightLaw& law, int b, int n, Stream& rng);

// E Y_n^2 by e_{k+1} = (m2 e_k + b - 1)/b, e_0 = 1.
double exact_yn_second_moment(double m2, int b, int n);

// Population-dynamics approximation of S^K delta_1: K rounds from the
// constant pool, each value b^-1 sum_j W(j) Y(j) with Y(j) resampled from the
// previous round.
SamplePool fixed_point_pool(const WeightSource& weights, int b, const PoolConfig& config,
                            std::uint64_t seed, int generation = 1);

// Pools approximating T^1 mu, ..., T^n mu. Refuses laws outside P_b.
std::vector<SamplePool> iterate_T_pools(const WeightLaw& law, int b, int n,
                                        const PoolConfig& config, std::uint64_t seed);

// (x - 1) / sigma over the pool.
std::vector<double> sample_Z(std::span<const double> pool, double sigma);

enum class PathKind { kRaw, kNormalized };

// Increments over all depth-j b-adic intervals, lexicographic order.
struct IncrementPath {
  int b = 3;
  int depth = 0;
  PathKind kind = PathKind::kRaw;
  double sigma = 0.0;  // normalization, when kind is kNormalized
  std::vector<double> increments;

  double total() const;
  // CSV with header word,increment.
  std::string to_csv() const;
};

// Increment at w: b^-j Y(w) prod_{k<=j} W(w|_k); one weight per non-root
// node drawn from `interior`, one leaf value per w from `leaves`. Node draws
// come from streams keyed on (seed, node id).
IncrementPath cascade_path(const WeightSource& interior, const WeightSource& leaves, int b, int j,
                           std::uint64_t seed);

// (increment - b^-j) / sigma.
IncrementPath normalize_path(const IncrementPath& path, double sigma);

}  // namespace cascade
