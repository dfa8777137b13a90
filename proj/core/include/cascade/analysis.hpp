#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cascade {

struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

// Mean of x^p and its standard error (sample standard deviation / sqrt(N)).
Estimate empirical_moment(std::span<const double> samples, int p);
// Same for |x|^p.
Estimate empirical_abs_moment(std::span<const double> samples, double p);

// Kolmogorov-Smirnov distance between the empirical CDF and N(0, 1).
double ks_normal(std::span<const double> samples);

// One-sided 1% critical value 1.63 / sqrt(R) of the Kolmogorov statistic.
double ks_critical_1pct(std::size_t samples);

struct CovarianceEstimate {
  std::size_t dim = 0;
  std::size_t replicas = 0;
  std::vector<double> cov;  // dim x dim, row-major
  std::vector<double> se;   // entrywise standard errors
};

// Entrywise sample covariance over replicas (each row one replica).
CovarianceEstimate empirical_cov(const std::vector<std::vector<double>>& rows);

struct ModulusRow {
  int m = 0;         // delta = b^-m
  double lhs = 0.0;  // omega(f, delta) over grid pairs
  double rhs = 0.0;  // 2(b-1) sum_{m<=i<=j} max_w |Delta(f, I_w)|
  bool holds = true;
};

// f holds b^j + 1 grid values f(k b^-j).
std::vector<ModulusRow> modulus_bound_check(std::span<const double> f, int b, int j);

struct SpectrumBins {
  std::vector<double> centers;
  double half_width = 0.1;

  // Centers -1.4, -1.3, ..., 1.4 with half-width 0.1.
  static SpectrumBins defaults();
};

struct SpectrumEstimate {
  int b = 2;
  int depth = 0;
  double half_width = 0.0;
  std::vector<double> centers;
  std::vector<std::size_t> counts;
  std::vector<std::optional<double>> dim_est;  // empty when the bin is empty
  std::vector<double> dim_theory;              // 1 - alpha^2 / (2 ln b)
};

// Bins on S(w)/n over all b^n words; dim_est = log_b(count) / n.
SpectrumEstimate coarse_spectrum(std::span<const double> walk, int b, int n,
                                 const SpectrumBins& bins = SpectrumBins::defaults());

// Delta(X, I_w) b^n / sqrt(b-1): increments rescaled onto the walk scale.
std::vector<double> walk_from_increments(std::span<const double> increments, int b, int n);

// beta(q) = -(1/n) log_b sum_w exp(q S(w)), evaluated as
// -1 - log(mean exp(q S)) / (n ln b) with a max shift.
std::vector<double> partition_beta(std::span<const double> walk, int b, int n,
                                   std::span<const double> q_grid);

// Grid q from -3 to 3 in steps of 0.05.
std::vector<double> default_q_grid();

// inf over the grid of -alpha q / ln b - beta(q).
double legendre_upper(std::span<const double> q_grid, std::span<const double> beta, double alpha,
                      int b);

// CSV alpha,count,dim_est,dim_theory,legendre_upper
std::string spectrum_csv(const SpectrumEstimate& est, std::span<const double> legendre);

struct ZygmundRow {
  int n = 0;
  double stat = 0.0;                // |X(t+h) + X(t-h) - 2X(t)| / h, t = 1/b, h = b^-n
  std::optional<double> lil_ratio;  // stat / (sqrt(b-1) sqrt(4 n log log n)), n >= 3
};

// X holds b^depth + 1 grid values.
std::vector<ZygmundRow> zygmund_stat(std::span<const double> X, int b, int depth,
                                     std::span<const int> n_list);

// Sum with Neumaier compensation.
double compensated_sum(std::span<const double> values);

}  // namespace cascade
