#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "cascade/analysis.hpp"
#include "cascade/errors.hpp"
#include "cascade/gaussian_limit.hpp"
#include "cascade/random.hpp"

using namespace cascade;

namespace {

std::vector<double> own_normals(std::uint64_t seed, std::size_t n) {
  Stream s(seed, 0);
  std::vector<double> x(n);
  for (auto& v : x) v = s.normal();
  return x;
}

// expected log_b count of a depth-n walk in [a - eps, a + eps] (S/n ~ N(0, 1/n)), per level
double spectrum_oracle(int b, int n, double a, double eps) {
  const double rt = std::sqrt(static_cast<double>(n));
  const double p = normal_cdf((a + eps) * rt) - normal_cdf((a - eps) * rt);
  return (n * std::log(b) + std::log(p)) / (n * std::log(b));
}



}  // namespace

TEST_CASE("empirical moments") {
  const std::vector<double> c(10, 3.0);
  const auto e = empirical_moment(c, 2);
  CHECK(e.value == 9.0);
  CHECK(e.se == 0.0);
  const std::vector<double> two{0.0, 2.0};
  const auto m = empirical_moment(two, 1);
  CHECK(m.value == 1.0);
  CHECK(m.se == doctest::Approx(1.0));
  CHECK_THROWS_AS(empirical_moment(std::vector<double>{1.0}, 1), InputError);
  const std::vector<double> signs{-1.0, 1.0, -2.0, 2.0};
  CHECK(empirical_abs_moment(signs, 3.0).value == doctest::Approx(4.5));
}

TEST_CASE("KS statistic") {
  const std::vector<double> zeros(200, 0.0);
  CHECK(ks_normal(zeros) == doctest::Approx(0.5));
  const auto x = own_normals(3, 10000);
  CHECK(ks_normal(x) < ks_critical_1pct(x.size()));
  CHECK(ks_critical_1pct(10000) == doctest::Approx(0.0163));
  std::vector<double> shifted = x;
  for (auto& v : shifted) v += 0.5;
  CHECK(ks_normal(shifted) > 0.15);
  CHECK_THROWS_AS(ks_normal(std::vector<double>(10, 0.0)), InputError);
}

TEST_CASE("KS meta-test over 200 seeds") {
  int pass = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto x = own_normals(1000 + seed, 10000);
    if (ks_normal(x) < ks_critical_1pct(x.size())) ++pass;
  }
  CHECK(pass >= 198);
}

TEST_CASE("KS rejection rate of the own normal generator is near 1%") {
  int rejected = 0;
  constexpr int kSeeds = 3000;
  for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
    const auto x = own_normals(50000 + seed, 10000);
    if (ks_normal(x) >= ks_critical_1pct(x.size())) ++rejected;
  }
  // Binomial(3000, 0.01) has sd 5.4; the asymptotic critical value is slightly conservative.
  CHECK(rejected <= 30 + 3 * 6);
  CHECK(rejected >= 5);
}

TEST_CASE("empirical covariance") {
  const std::vector<std::vector<double>> same(50, std::vector<double>{1.0, -2.0, 0.5});
  const auto est = empirical_cov(same);
  for (double v : est.cov) CHECK(std::abs(v) < 1e-15);
  CHECK(est.dim == 3);
  CHECK(est.replicas == 50);

  Stream s(4, 0);
  std::vector<std::vector<double>> rows(20000);
  for (auto& r : rows) {
    const double a = s.normal(), b = s.normal();
    r = {a, a + b};
  }
  const auto e2 = empirical_cov(rows);
  const double exact[] = {1.0, 1.0, 1.0, 2.0};
  for (int i = 0; i < 4; ++i) CHECK(std::abs(e2.cov[i] - exact[i]) <= 4.0 * e2.se[i]);
}

TEST_CASE("modulus inequality") {
  const std::vector<double> zero(28, 0.0);
  for (const auto& row : modulus_bound_check(zero, 3, 3)) {
    CHECK(row.lhs == 0.0);
    CHECK(row.rhs == 0.0);
    CHECK(row.holds);
  }
  std::vector<double> id(28);
  for (std::size_t k = 0; k < id.size(); ++k) id[k] = k / 27.0;
  for (const auto& row : modulus_bound_check(id, 3, 3)) {
    const double delta = std::pow(3.0, -row.m);
    CHECK(row.lhs == doctest::Approx(delta));
    double rhs = 0.0;
    for (int i = row.m; i <= 3; ++i) rhs += std::pow(3.0, -i);
    CHECK(row.rhs == doctest::Approx(4.0 * rhs));
    CHECK(row.holds);
  }

  // sampled paths, against a brute-force modulus
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const XiField field(3, 5, seed);
    Stream z(seed, 1);
    const auto grid = integrate_path(marginal_increments(3, 5, field, z).increments);
    for (const auto& row : modulus_bound_check(grid, 3, 5)) {
      const std::size_t window = static_cast<std::size_t>(std::pow(3, 5 - row.m) + 0.5);
      double brute = 0.0;
      for (std::size_t s = 0; s < grid.size(); ++s)
        for (std::size_t t = s; t < grid.size() && t <= s + window; ++t)
          brute = std::max(brute, std::abs(grid[t] - grid[s]));
      CHECK(row.lhs == doctest::Approx(brute).epsilon(1e-14));
      CHECK(row.holds);
    }
  }
}

TEST_CASE("coarse spectrum of the branching walk") {
  constexpr int b = 2, n = 16;
  const XiField field(b, n, 7);
  const auto walk = branching_walk(field, n);
  const auto est = coarse_spectrum(walk, b, n);
  REQUIRE(est.centers.size() == 29);
  std::size_t total = 0;
  for (auto c : est.counts) total += c;
  CHECK(total <= 2 * walk.size());  // neighbouring bins share their edges
  for (std::size_t i = 0; i < est.centers.size(); ++i) {
    const double a = est.centers[i];
    CHECK(est.dim_theory[i] == doctest::Approx(1.0 - a * a / (2.0 * std::log(2.0))));
    if (std::abs(a) <= 0.5 + 1e-9) {
      REQUIRE(est.dim_est[i].has_value());
      CHECK(std::abs(*est.dim_est[i] - spectrum_oracle(b, n, a, 0.1)) < 0.05);
    }
    if (std::abs(a) > 1.18) CHECK((!est.dim_est[i] || *est.dim_est[i] <= 0.1));
    if (est.counts[i] == 0) CHECK_FALSE(est.dim_est[i].has_value());
  }
  // symmetry
  for (std::size_t i = 0; i < est.centers.size(); ++i) {
    const std::size_t mirror = est.centers.size() - 1 - i;
    if (std::abs(est.centers[i]) <= 0.8 && est.dim_est[i] && est.dim_est[mirror]) {
      CHECK(std::abs(*est.dim_est[i] - *est.dim_est[mirror]) < 0.05);
    }
  }
  const std::size_t zero_bin = 14;
  REQUIRE(est.centers[zero_bin] == doctest::Approx(0.0).scale(1e-12));
  CHECK(std::abs(*est.dim_est[zero_bin] - spectrum_oracle(b, n, 0.0, 0.1)) < 0.02);
}

TEST_CASE("white noise concentrates at alpha = 0") {
  constexpr int b = 2, n = 16;
  Stream s(9, 0);
  std::vector<double> noise(std::size_t{1} << n);
  for (auto& v : noise) v = s.normal();
  const auto est = coarse_spectrum(noise, b, n);
  CHECK(*est.dim_est[14] > 0.98);
  for (std::size_t i = 0; i < est.centers.size(); ++i) {
    if (std::abs(est.centers[i]) >= 0.5) CHECK_FALSE(est.dim_est[i].has_value());
  }
  const auto walk = branching_walk(XiField(b, n, 9), n);
  const auto tree = coarse_spectrum(walk, b, n);
  CHECK(tree.dim_est[14 + 8].has_value());  // alpha = 0.8 populated under tree coupling
}

TEST_CASE("walk from increments") {
  constexpr int b = 2, n = 10;
  const XiField field(b, n, 21);
  const auto walk = branching_walk(field, n);
  const auto measure = canonical_measure(b, n, field);
  const auto& inc = measure.at_depth(n);
  // the series part vanishes at depth L, so increments are b^-n sqrt(b-1) S(w)
  const auto back = walk_from_increments(inc, b, n);
  REQUIRE(back.size() == walk.size());
  for (std::size_t r = 0; r < walk.size(); ++r) {
    CHECK(back[r] == doctest::Approx(walk[r]).epsilon(1e-12));
  }
}

TEST_CASE("partition function") {
  constexpr int b = 2, n = 16;
  const auto walk = branching_walk(XiField(b, n, 7), n);
  const auto q = default_q_grid();
  REQUIRE(q.size() == 121);
  const auto beta = partition_beta(walk, b, n, q);
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (std::abs(q[i]) < 1e-12) CHECK(beta[i] == -1.0);
    if (std::abs(q[i]) <= 1.0 + 1e-12) {
      CHECK(beta[i] >= -1.0 - q[i] * q[i] / (2.0 * std::log(2.0)) - 0.05);
    }
    if (i > 0 && i + 1 < q.size()) CHECK(beta[i - 1] + beta[i + 1] - 2.0 * beta[i] <= 1e-9);
  }
  // huge values do not overflow
  std::vector<double> big(walk.begin(), walk.end());
  for (auto& v : big) v *= 400.0;
  for (double x : partition_beta(big, b, n, q)) CHECK(std::isfinite(x));
}

TEST_CASE("Legendre transform of the analytic beta") {
  for (int b : {2, 3}) {
    const auto q = default_q_grid();
    std::vector<double> beta(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) beta[i] = -1.0 - q[i] * q[i] / (2.0 * std::log(b));
    for (int k = -15; k <= 15; ++k) {
      const double a = 0.1 * k;
      CHECK(legendre_upper(q, beta, a, b) ==
            doctest::Approx(1.0 - a * a / (2.0 * std::log(b))).epsilon(1e-9).scale(1e-9));
    }
    CHECK(legendre_upper(q, beta, 0.0, b) == doctest::Approx(1.0));
  }
}

TEST_CASE("bin counts obey the Chebyshev bound built from the partition function") {
  // N(bin) <= sum_w exp(q (S - n edge)) with edge = lower bin edge for q >= 0 and
  // upper edge for q < 0, so d(alpha) <= min_q -beta(q) - q edge(q) / ln b exactly.
  for (int b : {2, 3}) {
    const int n = b == 2 ? 16 : 10;
    const auto walk = branching_walk(XiField(b, n, 7), n);
    const auto q = default_q_grid();
    const auto beta = partition_beta(walk, b, n, q);
    const auto est = coarse_spectrum(walk, b, n);
    for (std::size_t i = 0; i < est.centers.size(); ++i) {
      if (!est.dim_est[i]) continue;
      double bound = INFINITY;
      for (std::size_t k = 0; k < q.size(); ++k) {
        const double edge = est.centers[i] + (q[k] >= 0.0 ? -est.half_width : est.half_width);
        bound = std::min(bound, -beta[k] - q[k] * edge / std::log(b));
      }
      CHECK(*est.dim_est[i] <= bound + 1e-9);
      // the centre-evaluated transform is within reach away from the tails
      if (std::abs(est.centers[i]) <= 0.6) {
        CHECK(*est.dim_est[i] <= legendre_upper(q, beta, est.centers[i], b) + 0.05);
      }
    }
  }
}

TEST_CASE("Zygmund statistic") {
  constexpr int depth = 8;
  const std::vector<int> ns{1, 2, 3, 4, 5, 6, 7};
  std::vector<double> id(257), sq(257);
  for (std::size_t k = 0; k < id.size(); ++k) {
    id[k] = k / 256.0;
    sq[k] = id[k] * id[k];
  }
  for (const auto& row : zygmund_stat(id, 2, depth, ns)) CHECK(row.stat == doctest::Approx(0.0).scale(1e-12));
  for (const auto& row : zygmund_stat(sq, 2, depth, ns)) {
    CHECK(row.stat == doctest::Approx(2.0 * std::pow(2.0, -row.n)).epsilon(1e-9));
    CHECK(row.lil_ratio.has_value() == (row.n >= 3));
  }
  const std::vector<int> too_fine{9};
  CHECK_THROWS_AS(zygmund_stat(id, 2, depth, too_fine), InputError);
}

TEST_CASE("Zygmund trend: running max grows with depth") {
  constexpr int b = 2, L = 14;
  std::vector<int> ns;
  for (int n = 1; n <= L; ++n) ns.push_back(n);
  std::vector<double> at8, at14;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const XiField field(b, L, derive(555, seed));
    const auto grid = integrate_path(consistent_measure(b, L, L, field).increments);
    const auto rows = zygmund_stat(grid, b, L, ns);
    double running = 0.0;
    for (const auto& row : rows) {
      running = std::max(running, row.stat);
      if (row.n == 8) at8.push_back(running);
      if (row.n == 14) at14.push_back(running);
    }
  }
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
  };
  CHECK(median(at14) > median(at8));
}

TEST_CASE("compensated sum") {
  const std::vector<double> v{1e16, 1.0, -1e16};
  CHECK(compensated_sum(v) == 1.0);

}
