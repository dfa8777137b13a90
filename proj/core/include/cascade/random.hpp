#pragma once

#include <array>
#include <cstdint>

namespace cascade {

// Philox4x32-10 block function (Salmon et al., "Parallel random numbers:
// as easy as 1, 2, 3"). Pure function of (counter, key).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// SplitMix64 finalizer; used to derive stream identifiers from tags.
std::uint64_t mix64(std::uint64_t x);
std::uint64_t derive(std::uint64_t a, std::uint64_t b);

// Standard normal quantile. Acklam's rational approximation followed by one
// Halley step against erfc; absolute error well below 1e-9 on (0, 1).
double normal_quantile(double p);
double normal_cdf(double x);

// Maps 64 random bits to a double strictly inside (0, 1).
inline double bits_to_open_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

// Counter-based random stream. The output is a pure function of
// (seed, stream id, position), so results never depend on scheduling.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t id) noexcept;

  std::uint64_t next_u64() noexcept;
  double uniform() noexcept { return bits_to_open_unit(next_u64()); }
  double normal() noexcept { return normal_quantile(uniform()); }
  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t id() const noexcept { return id_; }

 private:
  std::uint64_t seed_;
  std::uint64_t id_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
};

// One normal variate addressed directly by (seed, id, index).
double keyed_normal(std::uint64_t seed, std::uint64_t id, std::uint64_t index);

}  // namespace cascade
