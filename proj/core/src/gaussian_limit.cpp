#include "cascade/gaussian_limit.hpp"

#include <cmath>
#include <sstream>

#include "cascade/csv.hpp"
#include "cascade/errors.hpp"

namespace cascade {

namespace {

constexpr std::uint64_t kXiStream = 0x7869;  // "xi"

void check_depth(int b, int depth, const char* what) {
  if (b < 2) throw InputError(std::string(what) + ": b must be >= 2");
  if (depth < 0) throw InputError(std::string(what) + ": depth must be >= 0");
}

}  // namespace

double inverse_power(int b, std::size_t k) {
  return std::pow(static_cast<double>(b), -static_cast<double>(k));
}

XiField::XiField(int b, int max_depth, std::uint64_t seed)
    : b_(b), max_depth_(max_depth), seed_(seed) {
  check_depth(b, max_depth, "XiField");
}

double XiField::at(std::size_t depth, std::uint64_t rank) const {
  if (depth < 1 || depth > static_cast<std::size_t>(max_depth_)) {
    throw InputError("XiField: depth " + std::to_string(depth) + " outside [1, " +
                     std::to_string(max_depth_) + "]");
  }
  return keyed_normal(seed_, kXiStream, node_id(b_, depth, rank));
}

double XiField::operator()(const Word& w) const {
  if (w.base() != b_) throw InputError("XiField: base mismatch");
  return at(w.size(), rank(w));
}

std::vector<double> XiField::level(std::size_t depth) const {
  const std::uint64_t width = checked_power(b_, depth);
  std::vector<double> out(width);
  for (std::uint64_t r = 0; r < width; ++r) out[r] = at(depth, r);
  return out;
}

std::vector<double> branching_walk(const XiField& field, int n) {
  check_depth(field.b(), n, "branching_walk");
  checked_power(field.b(), static_cast<std::size_t>(n));
  const auto b = static_cast<std::size_t>(field.b());
  std::vector<double> walk{0.0};
  for (int depth = 1; depth <= n; ++depth) {
    std::vector<double> next(walk.size() * b);
    for (std::size_t r = 0; r < next.size(); ++r) {
      next[r] = walk[r / b] + field.at(static_cast<std::size_t>(depth), r);
    }
    walk = std::move(next);
  }
  return walk;
}

double exact_cov(int b, int j, const Word& w, const Word& w2) {
  if (w.size() != static_cast<std::size_t>(j) || w2.size() != static_cast<std::size_t>(j)) {
    throw InputError("exact_cov: both words must have length j");
  }
  const double scale = inverse_power(b, 2 * static_cast<std::size_t>(j));
  if (w == w2) return scale * (1.0 + (b - 1.0) * j);
  return scale * (b - 1.0) * static_cast<double>(common_prefix_length(w, w2));
}

std::vector<double> exact_cov_matrix(int b, int j) {
  const auto words = level(b, static_cast<std::size_t>(j));
  const std::size_t n = words.size();
  std::vector<double> m(n * n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) m[r * n + c] = exact_cov(b, j, words[r], words[c]);
  }
  return m;
}

std::string covariance_json(int b, int j, const std::vector<double>& matrix) {
  const auto words = level(b, static_cast<std::size_t>(j));
  const std::size_t n = words.size();
  if (matrix.size() != n * n) throw InputError("covariance_json: matrix shape mismatch");
  // Reals are written with format_real so the output is byte-stable.
  std::ostringstream out;
  out << "{\"b\":" << b << ",\"depth\":" << j << ",\"words\":[";
  for (std::size_t i = 0; i < n; ++i) out << (i ? "," : "") << '"' << words[i].str() << '"';
  out << "],\"matrix\":[";
  for (std::size_t r = 0; r < n; ++r) {
    out << (r ? "," : "") << '[';
    for (std::size_t c = 0; c < n; ++c) out << (c ? "," : "") << format_real(matrix[r * n + c]);
    out << ']';
  }
  out << "]}\n";
  return out.str();
}

std::string GaussianPath::increments_csv() const {
  CsvWriter csv({"word", "increment"});
  for (std::size_t r = 0; r < increments.size(); ++r) {
    csv.row(word_at(b, static_cast<std::size_t>(depth), r).str(), increments[r]);
  }
  return csv.str();
}

std::string GaussianPath::grid_csv() const {
  const auto grid = integrate_path(increments);
  CsvWriter csv({"t", "X"});
  const double step = inverse_power(b, static_cast<std::size_t>(depth));
  for (std::size_t k = 0; k < grid.size(); ++k) {
    csv.row(static_cast<double>(k) * step, grid[k]);
  }
  return csv.str();
}

GaussianPath marginal_increments(int b, int j, const XiField& field, Stream& zeta_rng) {
  check_depth(b, j, "marginal_increments");
  if (field.b() != b) throw InputError("marginal_increments: field base mismatch");
  if (field.max_depth() < j) throw InputError("marginal_increments: field too shallow");
  const auto walk = branching_walk(field, j);
  GaussianPath path;
  path.b = b;
  path.depth = j;
  path.mode = GaussianMode::kMarginal;
  path.increments.resize(walk.size());
  const double scale = inverse_power(b, static_cast<std::size_t>(j));
  const double root = std::sqrt(b - 1.0);
  for (std::size_t r = 0; r < walk.size(); ++r) {
    path.increments[r] = scale * (zeta_rng.normal() + root * walk[r]);
  }
  return path;
}

double zeta_truncated(const XiField& field, const Word& w, int L) {
  const int b = field.b();
  if (w.base() != b) throw InputError("zeta_truncated: base mismatch");
  if (static_cast<int>(w.size()) > L || L > field.max_depth()) {
    throw InputError("zeta_truncated: need |w| <= L <= field depth");
  }
  const std::size_t base_depth = w.size();
  const std::size_t levels = static_cast<std::size_t>(L) - base_depth;
  const std::uint64_t base_rank = rank(w);
  checked_power(b, levels);
  // A(node) = b^-1 sum_children (xi(child) + A(child)), A = 0 at depth L.
  std::vector<double> below;
  for (std::size_t k = levels; k >= 1; --k) {
    const std::uint64_t width = checked_power(b, k);
    const std::uint64_t first = base_rank * width;
    std::vector<double> here(width / static_cast<std::uint64_t>(b), 0.0);
    for (std::uint64_t v = 0; v < width; ++v) {
      const double tail = below.empty() ? 0.0 : below[v];
      here[v / static_cast<std::uint64_t>(b)] += field.at(base_depth + k, first + v) + tail;
    }
    for (double& x : here) x /= b;
    below = std::move(here);
  }
  return below.empty() ? 0.0 : below.front();
}

AdditiveMeasure::AdditiveMeasure(int b, int L, const XiField& field, const Coefficient& alpha,
                                 const Coefficient& beta)
    : b_(b), truncation_(L) {
  check_depth(b, L, "AdditiveMeasure");
  if (field.b() != b) throw InputError("AdditiveMeasure: field base mismatch");
  if (field.max_depth() < L) throw InputError("AdditiveMeasure: field shallower than L");
  checked_power(b, static_cast<std::size_t>(L));
  const auto ub = static_cast<std::size_t>(b);

  std::vector<std::vector<double>> xi(static_cast<std::size_t>(L) + 1);
  for (int d = 1; d <= L; ++d) xi[d] = field.level(static_cast<std::size_t>(d));

  // Series part G(w) = sum_{v} alpha(wv) beta(wv) xi(wv), built bottom-up.
  std::vector<std::vector<double>> series(static_cast<std::size_t>(L) + 1);
  series[L].assign(xi[L].empty() ? 1 : xi[L].size(), 0.0);
  for (int d = L - 1; d >= 0; --d) {
    const std::size_t width = series[d + 1].size() / ub;
    series[d].assign(width, 0.0);
    for (std::size_t r = 0; r < width; ++r) {
      double acc = 0.0;
      for (std::size_t l = 0; l < ub; ++l) {
        const std::size_t c = r * ub + l;
        const auto cd = static_cast<std::size_t>(d + 1);
        acc += alpha(cd, c) * beta(cd, c) * xi[d + 1][c] + series[d + 1][c];
      }
      series[d][r] = acc;
    }
  }

  // Ancestral part alpha(w) sum_k beta(w|_k) xi(w|_k).
  levels_.resize(static_cast<std::size_t>(L) + 1);
  std::vector<double> ancestral{0.0};
  levels_[0] = {series[0][0]};
  for (int d = 1; d <= L; ++d) {
    const auto ud = static_cast<std::size_t>(d);
    std::vector<double> next(ancestral.size() * ub);
    levels_[d].resize(next.size());
    for (std::size_t r = 0; r < next.size(); ++r) {
      next[r] = ancestral[r / ub] + beta(ud, r) * xi[d][r];
      levels_[d][r] = series[d][r] + alpha(ud, r) * next[r];
    }
    ancestral = std::move(next);
  }
}

double AdditiveMeasure::operator()(const Word& w) const {
  if (w.base() != b_ || static_cast<int>(w.size()) > truncation_) {
    throw InputError("AdditiveMeasure: word outside the represented tree");
  }
  return levels_[w.size()][rank(w)];
}

double AdditiveMeasure::additivity_residual() const {
  double worst = 0.0;
  const auto ub = static_cast<std::size_t>(b_);
  for (int d = 0; d < truncation_; ++d) {
    const auto& parent = levels_[d];
    const auto& child = levels_[d + 1];
    for (std::size_t r = 0; r < parent.size(); ++r) {
      double sum = 0.0;
      for (std::size_t l = 0; l < ub; ++l) sum += child[r * ub + l];
      worst = std::max(worst, std::abs(parent[r] - sum));
    }
  }
  return worst;
}

AdditiveMeasure canonical_measure(int b, int L, const XiField& field) {
  const double root = std::sqrt(b - 1.0);
  return AdditiveMeasure(
      b, L, field, [b](std::size_t d, std::uint64_t) { return inverse_power(b, d); },
      [root](std::size_t, std::uint64_t) { return root; });
}

namespace {

GaussianPath view_at(const AdditiveMeasure& measure, int j) {
  GaussianPath path;
  path.b = measure.b();
  path.depth = j;
  path.mode = GaussianMode::kConsistent;
  path.truncation = measure.truncation();
  path.increments = measure.at_depth(j);
  return path;
}

}  // namespace

GaussianPath consistent_measure(int b, int j, int L, const XiField& field) {
  if (j < 0 || j > L) throw InputError("consistent_measure: need 0 <= j <= L");
  GaussianPath path = view_at(canonical_measure(b, L, field), j);
  // Var(sqrt(b-1) zeta_trunc) = 1 - b^-(L-j), scaled by b^-2j.
  path.variance_deficit = inverse_power(b, 2 * static_cast<std::size_t>(j)) *
                          inverse_power(b, static_cast<std::size_t>(L - j));
  return path;
}

CoefficientScheme canonical_scheme(int b) {
  const double root = std::sqrt(b - 1.0);
  return {"canonical", [b](const Word& w) { return inverse_power(b, w.size()); },
          [root](const Word&) { return root; }, 2.0};
}

CoefficientScheme geometric_scheme(int b, double theta) {
  return {"geometric", [b](const Word& w) { return inverse_power(b, w.size()); },
          [theta](const Word& w) { return std::pow(theta, static_cast<double>(w.size())); },
          2.0};
}

SchemeCheck check_scheme(const CoefficientScheme& scheme, int b, int L) {
  SchemeCheck check;
  if (!(scheme.p > 1.0 && scheme.p <= 2.0)) {
    check.ok = false;
    check.violation = "exponent p must lie in (1, 2]";
    return check;
  }
  checked_power(b, static_cast<std::size_t>(L));
  for (int d = 0; d < L && check.ok; ++d) {
    for (const Word& w : level(b, static_cast<std::size_t>(d))) {
      double children = 0.0;
      for (int l = 0; l < b; ++l) children += scheme.alpha(w.child(l));
      const double parent = scheme.alpha(w);
      if (std::abs(parent - children) > 1e-12 * std::max(1.0, std::abs(parent))) {
        check.ok = false;
        check.violation = "alpha(" + w.str() + ") != sum of alpha over its children";
        break;
      }
    }
  }
  for (int k = 1; k <= L; ++k) {
    double sum = 0.0;
    for (const Word& v : level(b, static_cast<std::size_t>(k))) {
      sum += std::pow(std::abs(scheme.alpha(v) * scheme.beta(v)), scheme.p);
    }
    check.level_sums.push_back(sum);
  }
  for (std::size_t k = 1; k < check.level_sums.size() && check.ok; ++k) {
    const double prev = check.level_sums[k - 1];
    const double cur = check.level_sums[k];
    if (!std::isfinite(cur) || (prev > 0.0 ? !(cur < prev) : cur > 0.0)) {
      check.ok = false;
      check.violation = "level sum of |alpha beta|^p does not decrease at depth " +
                        std::to_string(k + 1);
    }
  }
  return check;
}

GaussianPath generalized_measure(const CoefficientScheme& scheme, int b, int j, int L,
                                 const XiField& field) {
  if (j < 0 || j > L) throw InputError("generalized_measure: need 0 <= j <= L");
  const SchemeCheck check = check_scheme(scheme, b, L);
  if (!check.ok) {
    throw DomainError("generalized_measure: scheme '" + scheme.name + "' rejected: " +
                      check.violation);
  }
  const AdditiveMeasure measure(
      b, L, field,
      [&](std::size_t d, std::uint64_t r) { return scheme.alpha(word_at(b, d, r)); },
      [&](std::size_t d, std::uint64_t r) { return scheme.beta(word_at(b, d, r)); });
  return view_at(measure, j);
}

std::vector<double> integrate_path(const std::vector<double>& increments) {
  std::vector<double> grid(increments.size() + 1, 0.0);
  for (std::size_t k = 0; k < increments.size(); ++k) grid[k + 1] = grid[k] + increments[k];
  return grid;
}

}  // namespace cascade
