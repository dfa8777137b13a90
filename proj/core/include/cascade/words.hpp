#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cascade {

// Largest number of nodes (b^n) any single level or path may hold.
inline constexpr std::uint64_t kNodeCap = std::uint64_t{1} << 24;

// A finite word over the alphabet {0, ..., b-1}. Indexes tree nodes and the
// closed b-adic subintervals of [0, 1].
class Word {
 public:
  explicit Word(int base);
  Word(int base, std::vector<std::uint8_t> digits);

  // Digits as characters 0-9 then a-z; the empty string is the empty word.
  static Word parse(int base, std::string_view text);

  int base() const noexcept { return base_; }
  std::size_t size() const noexcept { return digits_.size(); }
  bool empty() const noexcept { return digits_.empty(); }
  std::span<const std::uint8_t> digits() const noexcept { return digits_; }
  int operator[](std::size_t i) const { return digits_[i]; }

  Word prefix(std::size_t k) const;
  Word child(int digit) const;
  std::string str() const;

  bool operator==(const Word&) const = default;
  std::strong_ordering operator<=>(const Word& other) const;

 private:
  int base_;
  std::vector<std::uint8_t> digits_;
};

// Longest common prefix. Words of unequal length are compared over the
// shorter length.
Word meet(const Word& v, const Word& w);
std::size_t common_prefix_length(const Word& v, const Word& w);

// Exact non-negative rational.
struct Rational {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  friend bool operator==(const Rational& x, const Rational& y);
  friend std::strong_ordering operator<=>(const Rational& x, const Rational& y);
  double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
};

struct Interval {
  Rational lo;
  Rational hi;
};

// I_w = [sum_k w_k b^-k, sum_k w_k b^-k + b^-|w|], denominator b^|w|.
// Throws ResourceError if b^|w| does not fit in 64 bits.
Interval interval(const Word& w);

// b^n; throws ResourceError when the result exceeds cap.
std::uint64_t checked_power(int b, std::size_t n, std::uint64_t cap = kNodeCap);

// All words of length n in lexicographic order (adjacent words index
// adjacent intervals).
std::vector<Word> level(int b, std::size_t n, std::uint64_t cap = kNodeCap);

// Lexicographic index of w among words of its length, and the inverse.
std::uint64_t rank(const Word& w);
Word word_at(int b, std::size_t n, std::uint64_t rank);

// Breadth-first index over all of A*: (b^|w| - 1)/(b - 1) + rank(w).
std::uint64_t node_id(const Word& w);
std::uint64_t node_id(int b, std::size_t depth, std::uint64_t rank);

}  // namespace cascade
