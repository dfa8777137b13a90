#include "cascade/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "cascade/analysis.hpp"
#include "cascade/cascade_sim.hpp"
#include "cascade/experiments.hpp"
#include "cascade/gaussian_limit.hpp"
#include "cascade/moments.hpp"
#include "cascade/parallel.hpp"
#include "cascade/weight_law.hpp"
#include "cascade/words.hpp"

namespace cascade::acceptance {

namespace {

using Clock = std::chrono::steady_clock;

constexpr int kB = 3;
constexpr double kA = 0.7;
constexpr std::size_t kPool = 100000;
constexpr int kInner = 20;

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(Clock::now() - start_).count();
  }

 private:
  Clock::time_point start_ = Clock::now();
};

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

WeightLaw default_law() { return WeightLaw::two_point(kA); }

PoolConfig default_pools(unsigned workers = 1) { return {kPool, kInner, workers}; }

bool within(double value, double target, double se, double k = 4.0) {
  return std::abs(value - target) <= k * se;
}

CriterionResult finish(int id, std::string title, bool passed, std::string detail,
                       const Timer& timer, double limit_seconds) {
  CriterionResult r;
  r.id = id;
  r.title = std::move(title);
  r.seconds = timer.seconds();
  const bool in_time = r.seconds < limit_seconds;
  r.passed = passed && in_time;
  r.detail = std::move(detail);
  if (!in_time) r.detail += "; runtime " + num(r.seconds) + " s exceeds " + num(limit_seconds) + " s";
  return r;
}

}  // namespace

CriterionResult exact_sigma_trajectory() {
  Timer timer;
  const double s60 = sigma_closed_form(kB, 0.5, 60);
  const double scaled = std::pow(kB - 1.0, 30.0) * std::sqrt(s60);  // (b-1)^{n/2} sigma_n
  const double squared = scaled * scaled;
  const double limit = sigma_limit(kB, 0.5);
  const bool ok = std::abs(squared - 1.0) <= 1e-10 && std::abs(squared - limit * limit) <= 1e-10;
  return finish(1, "exact sigma trajectory", ok,
                "((b-1)^30 sigma_60)^2 = " + num(squared) + ", sigma_limit^2 = " +
                    num(limit * limit),
                timer, 1e-3);
}

CriterionResult moment_recursion_fixed_point() {
  Timer timer;
  const auto traj = iterate_moments(kB, 1.49, 2.47, 100);
  bool monotone = true;
  for (std::size_t k = 1; k < traj.size(); ++k) {
    monotone = monotone && traj.u[k] <= traj.u[k - 1] && traj.v[k] <= traj.v[k - 1];
  }
  const double du = std::abs(traj.u.back() - 1.0);
  const double dv = std::abs(traj.v.back() - 1.0);
  const bool ok = monotone && du < 1e-12 && dv < 1e-12;
  return finish(2, "moment recursion fixed point", ok,
                std::string("non-increasing: ") + (monotone ? "yes" : "no") +
                    ", |u100-1| = " + num(du) + ", |v100-1| = " + num(dv),
                timer, 1e-3);
}

CriterionResult fixed_point_second_moment() {
  Timer timer;
  const auto law = default_law();
  const auto pool = fixed_point_pool(law, kB, default_pools(), kSeed);
  const auto m2 = empirical_moment(pool.values(), 2);
  const auto m3 = empirical_moment(pool.values(), 3);
  const auto traj = iterate_moments(kB, law.moment(2), law.moment(3), 1);
  const double target2 = (kB - 1.0) / (kB - law.moment(2));
  const bool ok = within(m2.value, target2, m2.se) && within(m3.value, traj.v[1], m3.se);
  return finish(3, "fixed-point second moment", ok,
                "m2 = " + num(m2.value) + " +- " + num(m2.se) + " (exact " + num(target2) +
                    "), m3 = " + num(m3.value) + " +- " + num(m3.se) + " (exact " +
                    num(traj.v[1]) + ")",
                timer, 30.0);
}

CriterionResult clt_ks_sequence() {
  Timer timer;
  const auto law = default_law();
  constexpr int kGenerations = 4;
  constexpr std::size_t kSamples = 10000;
  const auto traj = iterate_moments(kB, law.moment(2), law.moment(3), kGenerations);
  const auto pools = iterate_T_pools(law, kB, kGenerations, default_pools(), kSeed);
  std::vector<double> ks;
  std::string detail = "KS:";
  for (int k = 1; k <= kGenerations; ++k) {
    const auto z = sample_Z(pools[k - 1].values().first(kSamples), std::sqrt(traj.sigma2[k]));
    ks.push_back(ks_normal(z));
    detail += " n=" + std::to_string(k) + ":" + num(ks.back());
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < ks.size(); ++i) decreasing = decreasing && ks[i] < ks[i - 1];
  const bool ok = decreasing && ks.back() < 0.03;
  detail += decreasing ? " (strictly decreasing)" : " (NOT strictly decreasing)";
  return finish(4, "CLT Kolmogorov-Smirnov sequence", ok, detail, timer, 120.0);
}

CriterionResult functional_clt_covariance() {
  Timer timer;
  constexpr int j = 2;
  constexpr std::size_t kReplicas = 20000;
  const auto exact = exact_cov_matrix(kB, j);

  std::vector<std::vector<double>> gaussian(kReplicas);
  for (std::size_t r = 0; r < kReplicas; ++r) {
    const std::uint64_t s = derive(kSeed, r);
    const XiField field(kB, j, s);
    Stream zeta(derive(s, 1), 0);
    gaussian[r] = marginal_increments(kB, j, field, zeta).increments;
  }
  const auto est = empirical_cov(gaussian);
  double worst_z = 0.0;
  for (std::size_t i = 0; i < exact.size(); ++i) {
    worst_z = std::max(worst_z, std::abs(est.cov[i] - exact[i]) / est.se[i]);
  }
  const bool part_a = worst_z <= 4.0;

  const auto law = default_law();
  const auto traj = iterate_moments(kB, law.moment(2), law.moment(3), 4);
  const auto pools = iterate_T_pools(law, kB, 4, default_pools(), kSeed);
  auto distance = [&](int n) {
    const WeightSource interior = n == 1 ? WeightSource(law) : WeightSource(pools[n - 2]);
    const WeightSource leaves(pools[n - 1]);
    const double sigma = std::sqrt(traj.sigma2[n]);
    std::vector<std::vector<double>> rows(kReplicas);
    for (std::size_t r = 0; r < kReplicas; ++r) {
      const auto raw = cascade_path(interior, leaves, kB, j, derive(derive(kSeed, 100 + n), r));
      rows[r] = normalize_path(raw, sigma).increments;
    }
    const auto cov = empirical_cov(rows).cov;
    double worst = 0.0;
    for (std::size_t i = 0; i < exact.size(); ++i) worst = std::max(worst, std::abs(cov[i] - exact[i]));
    return worst;
  };
  const double d1 = distance(1);
  const double d4 = distance(4);
  const bool part_b = d4 < d1;
  return finish(5, "functional CLT covariance", part_a && part_b,
                "(a) max |z| = " + num(worst_z) + " (<= 4); (b) max-abs distance n=1: " + num(d1) +
                    ", n=4: " + num(d4),
                timer, 180.0);
}

CriterionResult additive_cascade() {
  Timer timer;
  constexpr int j = 3;
  constexpr int L = 10;
  constexpr std::size_t kFields = 20000;
  const XiField field(kB, L, kSeed);
  const auto measure = canonical_measure(kB, L, field);
  const double residual = measure.additivity_residual();

  const Word w = Word::parse(kB, "012");
  std::vector<double> zeta(kFields);
  const double root = std::sqrt(kB - 1.0);
  for (std::size_t f = 0; f < kFields; ++f) {
    const XiField replica(kB, L, derive(kSeed, 1000 + f));
    zeta[f] = root * zeta_truncated(replica, w, L);
  }
  const auto var = empirical_moment(zeta, 2);  // mean is exactly zero
  const double target = 1.0 - std::pow(static_cast<double>(kB), -(L - j));
  const bool ok = residual < 1e-12 && within(var.value, target, var.se);
  return finish(6, "additive cascade", ok,
                "additivity residual = " + num(residual) + ", Var = " + num(var.value) + " +- " +
                    num(var.se) + " (target " + num(target) + ")",
                timer, 60.0);
}

CriterionResult spectrum() {
  Timer timer;
  constexpr int b = 2;
  constexpr int n = 16;
  const XiField field(b, n, kSeed);
  const auto walk = branching_walk(field, n);
  const auto est = coarse_spectrum(walk, b, n);
  const auto q = default_q_grid();
  const auto beta = partition_beta(walk, b, n, q);
  const double log_b = std::log(2.0);

  bool ok = true;
  std::ostringstream detail;
  double dim0 = NAN;
  double worst_theory = 0.0;
  double worst_tail = 0.0;
  double worst_legendre = -INFINITY;
  for (std::size_t i = 0; i < est.centers.size(); ++i) {
    const double a = est.centers[i];
    if (!est.dim_est[i]) continue;
    const double d = *est.dim_est[i];
    if (std::abs(a) < 1e-9) dim0 = d;
    if (std::abs(a) <= 1.0 + 1e-9) worst_theory = std::max(worst_theory, std::abs(d - est.dim_theory[i]));
    if (std::abs(a) > 1.18) worst_tail = std::max(worst_tail, d);
    worst_legendre = std::max(worst_legendre, d - legendre_upper(q, beta, a, b));
  }
  double beta_zero = NAN;
  double worst_lower = INFINITY;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (std::abs(q[i]) < 1e-12) beta_zero = beta[i];
    if (std::abs(q[i]) <= 1.0 + 1e-12) {
      worst_lower = std::min(worst_lower, beta[i] - (-1.0 - q[i] * q[i] / (2.0 * log_b)));
    }
  }
  const bool c_dim0 = std::abs(dim0 - 1.0) < 0.05;
  const bool c_theory = worst_theory < 0.1;
  const bool c_tail = worst_tail <= 0.1;
  const bool c_beta0 = beta_zero == -1.0;
  const bool c_lower = worst_lower >= -0.05;
  const bool c_legendre = worst_legendre <= 0.05;
  ok = c_dim0 && c_theory && c_tail && c_beta0 && c_lower && c_legendre;
  detail << "d(0) = " << num(dim0) << (c_dim0 ? " ok" : " FAIL") << "; max|d-theory| (|a|<=1) = "
         << num(worst_theory) << (c_theory ? " ok" : " FAIL") << "; max d (|a|>1.18) = "
         << num(worst_tail) << (c_tail ? " ok" : " FAIL") << "; beta(0) = " << num(beta_zero)
         << (c_beta0 ? " ok" : " FAIL") << "; min beta-lower = " << num(worst_lower)
         << (c_lower ? " ok" : " FAIL") << "; max d-legendre = " << num(worst_legendre)
         << (c_legendre ? " ok" : " FAIL");
  return finish(7, "multifractal spectrum", ok, detail.str(), timer, 60.0);
}

CriterionResult third_moment_control() {
  Timer timer;
  const auto law = default_law();
  constexpr int kSteps = 50;
  const auto traj = iterate_moments(kB, law.moment(2), law.moment(3), kSteps);
  const auto bound = iterate_third_moment_bound(traj, 10.0, kSteps);
  double sup = 0.0;
  bool finite = true;
  for (double z : bound) {
    finite = finite && std::isfinite(z);
    sup = std::max(sup, z);
  }
  const auto pools = iterate_T_pools(law, kB, 3, default_pools(), kSeed);
  bool below = true;
  std::string detail = "sup_{n<=50} bound = " + num(sup) + ";";
  for (int k = 1; k <= 3; ++k) {
    const auto z = sample_Z(pools[k - 1].values(), std::sqrt(traj.sigma2[k]));
    const auto abs3 = empirical_abs_moment(z, 3.0);
    below = below && abs3.value < bound[k];
    detail += " n=" + std::to_string(k) + ": E|Z|^3 = " + num(abs3.value) + " < " + num(bound[k]);
  }
  return finish(8, "third-moment control", finite && below, detail, timer, 60.0);
}

CriterionResult proof_apparatus_bounds() {
  Timer timer;
  const auto law = default_law();
  constexpr int kMax = 40;
  const auto traj = iterate_moments(kB, law.moment(2), law.moment(3), kMax);
  bool decays = true;
  std::string failures;
  double previous = t1_variance_bound(kB, traj.sigma2, 4);
  for (int n = 5; n <= kMax; ++n) {
    const double current = t1_variance_bound(kB, traj.sigma2, n);
    if (!(current / previous < 1.0)) {
      decays = false;
      failures += " n=" + std::to_string(n) + ":" + num(current / previous);
    }
    previous = current;
  }
  bool lindeberg = true;
  for (int n = 9; n <= 50; ++n) lindeberg = lindeberg && lindeberg_bound(kB, 3.0, n, 1.0) < 1e-3;
  const double tail_ratio = t1_variance_bound(kB, traj.sigma2, kMax) /
                            t1_variance_bound(kB, traj.sigma2, kMax - 1);
  std::string detail = "t1 ratio < 1 for all n in [5, 40]: " + std::string(decays ? "yes" : "no");
  if (!decays) detail += " (ratios >= 1 at" + failures + ")";
  detail += "; ratio at n=40 = " + num(tail_ratio) + " vs sqrt(5/6) = " + num(std::sqrt(5.0 / 6.0));
  detail += "; lindeberg(3,3,9,1) = " + num(lindeberg_bound(kB, 3.0, 9, 1.0));
  return finish(9, "proof-apparatus bounds", decays && lindeberg, detail, timer, 1e-3);
}

CriterionResult determinism(unsigned workers) {
  Timer timer;
  std::vector<ExperimentConfig> configs;
  ExperimentConfig base;
  base.b = kB;
  base.law = default_law();
  base.seed = kSeed;
  base.pool_size = kPool;
  base.inner_iterations = kInner;

  ExperimentConfig cascade = base;  // criterion 3
  cascade.command = "cascade";
  cascade.n = 1;
  cascade.depth = 3;
  cascade.replicas = 1000;
  configs.push_back(cascade);

  ExperimentConfig clt = base;  // criterion 4
  clt.command = "clt";
  clt.n_max = 4;
  clt.replicas = 10000;
  configs.push_back(clt);

  ExperimentConfig cov = base;  // criterion 5
  cov.command = "cov";
  cov.depth = 2;
  cov.n_max = 4;
  cov.replicas = 20000;
  configs.push_back(cov);

  ExperimentConfig limit = base;  // criterion 6
  limit.command = "limit";
  limit.mode = "consistent";
  limit.depth = 3;
  limit.truncation = 10;
  configs.push_back(limit);

  ExperimentConfig spectrum_run = base;  // criterion 7
  spectrum_run.command = "spectrum";
  spectrum_run.b = 2;
  spectrum_run.depth = 16;
  spectrum_run.law.reset();
  configs.push_back(spectrum_run);

  bool identical = true;
  std::string detail;
  std::size_t files = 0;
  for (auto config : configs) {
    config.workers = 1;
    const auto first = run_experiment(config);
    const auto again = run_experiment(config);
    config.workers = std::max(2u, workers);
    const auto parallel = run_experiment(config);
    const bool same = first.files == again.files && first.files == parallel.files &&
                      first.summary == again.summary && first.summary == parallel.summary;
    files += first.files.size();
    if (!same) {
      identical = false;
      detail += " " + config.command + " differs;";
    }
  }
  detail = std::to_string(files) + " files compared across reruns and worker counts 1/" +
           std::to_string(std::max(2u, workers)) + (identical ? ": byte-identical" : ":" + detail);
  return finish(10, "determinism", identical, detail, timer, 1e9);
}

std::vector<CriterionResult> run_all(unsigned workers) {
  return {exact_sigma_trajectory(),   moment_recursion_fixed_point(), fixed_point_second_moment(),
          clt_ks_sequence(),          functional_clt_covariance(),    additive_cascade(),
          spectrum(),                 third_moment_control(),         proof_apparatus_bounds(),
          determinism(workers)};
}

std::string format(const CriterionResult& r) {
  char head[160];
  std::snprintf(head, sizeof head, "[%s] %2d %s (%.3f s): ", r.passed ? "PASS" : "FAIL", r.id,
                r.title.c_str(), r.seconds);
  return head + r.detail;
}

}  // namespace cascade::acceptance
