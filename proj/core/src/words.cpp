#include "cascade/words.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "cascade/errors.hpp"

namespace cascade {

namespace {

__extension__ typedef unsigned __int128 u128;

void check_base(int base) {
  if (base < 2 || base > 36) {
    throw InputError("word base must lie in [2, 36], got " + std::to_string(base));
  }
}

char digit_char(int d) { return static_cast<char>(d < 10 ? '0' + d : 'a' + (d - 10)); }

int char_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'z') return c - 'a' + 10;
  return -1;
}

}  // namespace

Word::Word(int base) : base_(base) { check_base(base); }

Word::Word(int base, std::vector<std::uint8_t> digits) : base_(base), digits_(std::move(digits)) {
  check_base(base);
  for (auto d : digits_) {
    if (d >= base) {
      throw InputError("digit " + std::to_string(d) + " out of range for base " +
                       std::to_string(base));
    }
  }
}

Word Word::parse(int base, std::string_view text) {
  std::vector<std::uint8_t> digits;
  digits.reserve(text.size());
  for (char c : text) {
    const int d = char_digit(c);
    if (d < 0) throw InputError(std::string("invalid digit character '") + c + "'");
    digits.push_back(static_cast<std::uint8_t>(d));
  }
  return Word(base, std::move(digits));
}

Word Word::prefix(std::size_t k) const {
  if (k > digits_.size()) throw InputError("prefix length exceeds word length");
  Word out(base_);
  out.digits_.assign(digits_.begin(), digits_.begin() + static_cast<std::ptrdiff_t>(k));
  return out;
}

Word Word::child(int digit) const {
  if (digit < 0 || digit >= base_) throw InputError("child digit out of range");
  Word out = *this;
  out.digits_.push_back(static_cast<std::uint8_t>(digit));
  return out;
}

std::string Word::str() const {
  std::string s;
  s.reserve(digits_.size());
  for (auto d : digits_) s.push_back(digit_char(d));
  return s;
}

std::strong_ordering Word::operator<=>(const Word& other) const {
  if (auto c = base_ <=> other.base_; c != 0) return c;
  return std::lexicographical_compare_three_way(digits_.begin(), digits_.end(),
                                                other.digits_.begin(), other.digits_.end());
}

std::size_t common_prefix_length(const Word& v, const Word& w) {
  if (v.base() != w.base()) throw InputError("meet: base mismatch");
  const std::size_t n = std::min(v.size(), w.size());
  std::size_t k = 0;
  while (k < n && v[k] == w[k]) ++k;
  return k;
}

Word meet(const Word& v, const Word& w) { return v.prefix(common_prefix_length(v, w)); }

bool operator==(const Rational& x, const Rational& y) {
  return static_cast<u128>(x.num) * y.den == static_cast<u128>(y.num) * x.den;
}

std::strong_ordering operator<=>(const Rational& x, const Rational& y) {
  return static_cast<u128>(x.num) * y.den <=> static_cast<u128>(y.num) * x.den;
}

std::uint64_t checked_power(int b, std::size_t n, std::uint64_t cap) {
  std::uint64_t p = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (p > cap / static_cast<std::uint64_t>(b)) {
      throw ResourceError(std::to_string(b) + "^" + std::to_string(n) + " exceeds the cap of " +
                          std::to_string(cap));
    }
    p *= static_cast<std::uint64_t>(b);
  }
  return p;
}

Interval interval(const Word& w) {
  const std::uint64_t den =
      checked_power(w.base(), w.size(), std::numeric_limits<std::uint64_t>::max());
  const std::uint64_t num = rank(w);
  return {{num, den}, {num + 1, den}};
}

std::uint64_t rank(const Word& w) {
  std::uint64_t r = 0;
  for (auto d : w.digits()) r = r * static_cast<std::uint64_t>(w.base()) + d;
  return r;
}

Word word_at(int b, std::size_t n, std::uint64_t r) {
  std::vector<std::uint8_t> digits(n);
  for (std::size_t i = n; i-- > 0;) {
    digits[i] = static_cast<std::uint8_t>(r % static_cast<std::uint64_t>(b));
    r /= static_cast<std::uint64_t>(b);
  }
  return Word(b, std::move(digits));
}

std::vector<Word> level(int b, std::size_t n, std::uint64_t cap) {
  check_base(b);
  const std::uint64_t count = checked_power(b, n, cap);
  std::vector<Word> out;
  out.reserve(count);
  std::vector<std::uint8_t> digits(n, 0);
  for (std::uint64_t i = 0; i < count; ++i) {
    out.emplace_back(b, digits);
    for (std::size_t k = n; k-- > 0;) {
      if (++digits[k] < b) break;
      digits[k] = 0;
    }
  }
  return out;
}

std::uint64_t node_id(int b, std::size_t depth, std::uint64_t r) {
  std::uint64_t offset = 0;
  std::uint64_t width = 1;
  for (std::size_t d = 0; d < depth; ++d) {
    offset += width;
    width *= static_cast<std::uint64_t>(b);
  }
  return offset + r;
}

std::uint64_t node_id(const Word& w) { return node_id(w.base(), w.size(), rank(w)); }

}  // namespace cascade
