#include "cascade/csv.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

#include "cascade/errors.hpp"

namespace cascade {

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(std::initializer_list<std::string_view> header) {
  std::size_t i = 0;
  for (auto h : header) append(h, i++);
  out_.push_back('\n');
}

void CsvWriter::append(double x, std::size_t i) {
  separator(i);
  out_ += format_real(x);
}

void CsvWriter::append(long long x, std::size_t i) {
  separator(i);
  out_ += std::to_string(x);
}

void CsvWriter::append(std::string_view s, std::size_t i) {
  separator(i);
  out_ += s;
}

void CsvWriter::append(const std::optional<double>& x, std::size_t i) {
  separator(i);
  if (x) out_ += format_real(*x);
}

std::string column_csv(std::string_view header, std::span<const double> values) {
  std::string out(header);
  out.push_back('\n');
  for (double v : values) {
    out += format_real(v);
    out.push_back('\n');
  }
  return out;
}

std::vector<double> parse_column_csv(std::string_view text) {
  std::vector<double> out;
  std::size_t pos = text.find('\n');
  if (pos == std::string_view::npos) return out;
  ++pos;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    if (end > pos) {
      double v = 0.0;
      const auto res = std::from_chars(text.data() + pos, text.data() + end, v);
      if (res.ec != std::errc{} || res.ptr != text.data() + end) {
        throw InputError("malformed CSV value: " + std::string(text.substr(pos, end - pos)));
      }
      out.push_back(v);
    }
    pos = end + 1;
  }
  return out;
}

}  // namespace cascade
