#pragma once

#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cascade {

// Locale-independent real formatting with 17 significant digits.
std::string format_real(double x);

// Minimal CSV builder: '.' decimal point, LF line endings, no quoting.
class CsvWriter {
 public:
  explicit CsvWriter(std::initializer_list<std::string_view> header);

  template <typename... Cells>
  CsvWriter& row(const Cells&... cells) {
    std::size_t i = 0;
    ((append(cells, i++)), ...);
    out_.push_back('\n');
    return *this;
  }

  const std::string& str() const noexcept { return out_; }

 private:
  void separator(std::size_t i) {
    if (i > 0) out_.push_back(',');
  }
  void append(double x, std::size_t i);
  void append(long long x, std::size_t i);
  void append(int x, std::size_t i) { append(static_cast<long long>(x), i); }
  void append(std::size_t x, std::size_t i) { append(static_cast<long long>(x), i); }
  void append(std::string_view s, std::size_t i);
  void append(const std::string& s, std::size_t i) { append(std::string_view(s), i); }
  void append(const char* s, std::size_t i) { append(std::string_view(s), i); }
  void append(bool x, std::size_t i) { append(std::string_view(x ? "true" : "false"), i); }
  void append(const std::optional<double>& x, std::size_t i);

  std::string out_;
};

// Single-column CSV of reals under the given header.
std::string column_csv(std::string_view header, std::span<const double> values);

// Parses a single-column CSV written by column_csv.
std::vector<double> parse_column_csv(std::string_view text);

}  // namespace cascade
