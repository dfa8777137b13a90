#include "cascade/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "cascade/csv.hpp"
#include "cascade/errors.hpp"
#include "cascade/random.hpp"
#include "cascade/words.hpp"

namespace cascade {

namespace {

class Accumulator {
 public:
  void add(double x) {
    const double t = sum_ + x;
    comp_ += std::abs(sum_) >= std::abs(x) ? (sum_ - t) + x : (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

template <typename Transform>
Estimate mean_and_se(std::span<const double> samples, Transform f) {
  if (samples.size() < 2) throw InputError("empirical moment needs at least 2 samples");
  const double n = static_cast<double>(samples.size());
  Accumulator sum;
  for (double x : samples) sum.add(f(x));
  const double mean = sum.value() / n;
  Accumulator sq;
  for (double x : samples) {
    const double d = f(x) - mean;
    sq.add(d * d);
  }
  const double var = sq.value() / (n - 1.0);
  return {mean, std::sqrt(var / n)};
}

}  // namespace

double compensated_sum(std::span<const double> values) {
  Accumulator acc;
  for (double x : values) acc.add(x);
  return acc.value();
}

Estimate empirical_moment(std::span<const double> samples, int p) {
  return mean_and_se(samples, [p](double x) { return std::pow(x, p); });
}

Estimate empirical_abs_moment(std::span<const double> samples, double p) {
  return mean_and_se(samples, [p](double x) { return std::pow(std::abs(x), p); });
}

double ks_normal(std::span<const double> samples) {
  if (samples.size() < 100) throw InputError("ks_normal: needs at least 100 samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double cdf = normal_cdf(sorted[i]);
    d = std::max(d, static_cast<double>(i + 1) / n - cdf);
    d = std::max(d, cdf - static_cast<double>(i) / n);
  }
  return d;
}

double ks_critical_1pct(std::size_t samples) {
  return 1.63 / std::sqrt(static_cast<double>(samples));
}

CovarianceEstimate empirical_cov(const std::vector<std::vector<double>>& rows) {
  if (rows.size() < 2) throw InputError("empirical_cov: needs at least 2 replicas");
  const std::size_t dim = rows.front().size();
  for (const auto& r : rows) {
    if (r.size() != dim) throw InputError("empirical_cov: replicas differ in shape");
  }
  const double n = static_cast<double>(rows.size());
  std::vector<double> mean(dim);
  for (std::size_t c = 0; c < dim; ++c) {
    Accumulator acc;
    for (const auto& r : rows) acc.add(r[c]);
    mean[c] = acc.value() / n;
  }
  CovarianceEstimate est;
  est.dim = dim;
  est.replicas = rows.size();
  est.cov.assign(dim * dim, 0.0);
  est.se.assign(dim * dim, 0.0);
  std::vector<double> products(rows.size());
  for (std::size_t a = 0; a < dim; ++a) {
    for (std::size_t c = a; c < dim; ++c) {
      Accumulator acc;
      for (std::size_t r = 0; r < rows.size(); ++r) {
        products[r] = (rows[r][a] - mean[a]) * (rows[r][c] - mean[c]);
        acc.add(products[r]);
      }
      const double cov = acc.value() / (n - 1.0);
      const double plain_mean = acc.value() / n;
      Accumulator dev;
      for (double p : products) dev.add((p - plain_mean) * (p - plain_mean));
      const double se = std::sqrt(dev.value() / (n - 1.0) / n);
      est.cov[a * dim + c] = est.cov[c * dim + a] = cov;
      est.se[a * dim + c] = est.se[c * dim + a] = se;
    }
  }
  return est;
}

std::vector<ModulusRow> modulus_bound_check(std::span<const double> f, int b, int j) {
  const std::uint64_t cells = checked_power(b, static_cast<std::size_t>(j));
  if (f.size() != cells + 1) throw InputError("modulus_bound_check: grid size must be b^j + 1");

  // level_max[i] = max_{|w| = i} |Delta(f, I_w)|
  std::vector<double> level_max(static_cast<std::size_t>(j) + 1, 0.0);
  for (int i = 0; i <= j; ++i) {
    const std::uint64_t stride = checked_power(b, static_cast<std::size_t>(j - i));
    double worst = 0.0;
    for (std::uint64_t k = 0; k + stride <= cells; k += stride) {
      worst = std::max(worst, std::abs(f[k + stride] - f[k]));
    }
    level_max[i] = worst;
  }

  std::vector<ModulusRow> rows;
  for (int m = 1; m <= j; ++m) {
    const std::size_t window = checked_power(b, static_cast<std::size_t>(j - m));
    // Sliding max - min over index windows of length window + 1.
    std::deque<std::size_t> hi;
    std::deque<std::size_t> lo;
    double omega = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) {
      while (!hi.empty() && f[hi.back()] <= f[k]) hi.pop_back();
      while (!lo.empty() && f[lo.back()] >= f[k]) lo.pop_back();
      hi.push_back(k);
      lo.push_back(k);
      while (hi.front() + window < k) hi.pop_front();
      while (lo.front() + window < k) lo.pop_front();
      omega = std::max(omega, f[hi.front()] - f[lo.front()]);
    }
    double tail = 0.0;
    for (int i = m; i <= j; ++i) tail += level_max[i];
    ModulusRow row;
    row.m = m;
    row.lhs = omega;
    row.rhs = 2.0 * (b - 1.0) * tail;
    row.holds = row.lhs <= row.rhs;
    rows.push_back(row);
  }
  return rows;
}

SpectrumBins SpectrumBins::defaults() {
  SpectrumBins bins;
  for (int k = -14; k <= 14; ++k) bins.centers.push_back(0.1 * k);
  bins.half_width = 0.1;
  return bins;
}

SpectrumEstimate coarse_spectrum(std::span<const double> walk, int b, int n,
                                 const SpectrumBins& bins) {
  if (n < 1) throw InputError("coarse_spectrum: depth must be >= 1");
  const std::uint64_t words = checked_power(b, static_cast<std::size_t>(n));
  if (walk.size() != words) {
    throw InputError("coarse_spectrum: expected " + std::to_string(words) + " word values, got " +
                     std::to_string(walk.size()));
  }
  SpectrumEstimate est;
  est.b = b;
  est.depth = n;
  est.half_width = bins.half_width;
  est.centers = bins.centers;
  est.counts.assign(bins.centers.size(), 0);
  const double inv_n = 1.0 / n;
  for (double s : walk) {
    const double ratio = s * inv_n;
    for (std::size_t i = 0; i < bins.centers.size(); ++i) {
      if (std::abs(ratio - bins.centers[i]) <= bins.half_width) ++est.counts[i];
    }
  }
  const double log_b = std::log(static_cast<double>(b));
  for (std::size_t i = 0; i < bins.centers.size(); ++i) {
    if (est.counts[i] > 0) {
      est.dim_est.emplace_back(std::log(static_cast<double>(est.counts[i])) / log_b * inv_n);
    } else {
      est.dim_est.emplace_back(std::nullopt);
    }
    const double a = bins.centers[i];
    est.dim_theory.push_back(1.0 - a * a / (2.0 * log_b));
  }
  return est;
}

std::vector<double> walk_from_increments(std::span<const double> increments, int b, int n) {
  const double scale = std::pow(static_cast<double>(b), n) / std::sqrt(b - 1.0);
  std::vector<double> out(increments.size());
  for (std::size_t i = 0; i < increments.size(); ++i) out[i] = increments[i] * scale;
  return out;
}

std::vector<double> partition_beta(std::span<const double> walk, int b, int n,
                                   std::span<const double> q_grid) {
  const std::uint64_t words = checked_power(b, static_cast<std::size_t>(n));
  if (walk.size() != words) throw InputError("partition_beta: expected b^n walk values");
  const double scale = static_cast<double>(n) * std::log(static_cast<double>(b));
  std::vector<double> beta;
  beta.reserve(q_grid.size());
  for (double q : q_grid) {
    double shift = -std::numeric_limits<double>::infinity();
    for (double s : walk) shift = std::max(shift, q * s);
    Accumulator acc;
    for (double s : walk) acc.add(std::exp(q * s - shift));
    const double log_mean = shift + std::log(acc.value() / static_cast<double>(walk.size()));
    beta.push_back(-1.0 - log_mean / scale);
  }
  return beta;
}

std::vector<double> default_q_grid() {
  std::vector<double> q;
  for (int k = -60; k <= 60; ++k) q.push_back(0.05 * k);
  return q;
}

double legendre_upper(std::span<const double> q_grid, std::span<const double> beta, double alpha,
                      int b) {
  if (q_grid.size() != beta.size() || q_grid.empty()) {
    throw InputError("legendre_upper: q grid and beta differ in size");
  }
  const double log_b = std::log(static_cast<double>(b));
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < q_grid.size(); ++i) {
    best = std::min(best, -alpha * q_grid[i] / log_b - beta[i]);
  }
  return best;
}

std::string spectrum_csv(const SpectrumEstimate& est, std::span<const double> legendre) {
  CsvWriter csv({"alpha", "count", "dim_est", "dim_theory", "legendre_upper"});
  for (std::size_t i = 0; i < est.centers.size(); ++i) {
    const std::optional<double> upper =
        i < legendre.size() ? std::optional<double>(legendre[i]) : std::nullopt;
    csv.row(est.centers[i], est.counts[i], est.dim_est[i], est.dim_theory[i], upper);
  }
  return csv.str();
}

std::vector<ZygmundRow> zygmund_stat(std::span<const double> X, int b, int depth,
                                     std::span<const int> n_list) {
  const std::uint64_t cells = checked_power(b, static_cast<std::size_t>(depth));
  if (X.size() != cells + 1) throw InputError("zygmund_stat: grid size must be b^depth + 1");
  const std::uint64_t t = cells / static_cast<std::uint64_t>(b);
  std::vector<ZygmundRow> rows;
  for (int n : n_list) {
    if (n < 1 || n > depth) {
      throw InputError("zygmund_stat: grid of depth " + std::to_string(depth) +
                       " too coarse for h = b^-" + std::to_string(n));
    }
    const std::uint64_t h = checked_power(b, static_cast<std::size_t>(depth - n));
    const double step = std::pow(static_cast<double>(b), -n);
    ZygmundRow row;
    row.n = n;
    row.stat = std::abs(X[t + h] + X[t - h] - 2.0 * X[t]) / step;
    if (n >= 3) {
      const double scale =
          std::sqrt(b - 1.0) * std::sqrt(4.0 * n * std::log(std::log(static_cast<double>(n))));
      row.lil_ratio = row.stat / scale;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace cascade
