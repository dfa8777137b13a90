#include <doctest.h>

#include <cmath>

#include "cascade/analysis.hpp"
#include "cascade/errors.hpp"
#include "cascade/gaussian_limit.hpp"
#include "cascade/random.hpp"
#include "cascade/words.hpp"

#ifdef CASCADE_HAVE_EIGEN
#include <Eigen/Dense>
#endif

using namespace cascade;

namespace {

// b^{-2j} ((b-1)|w ^ w'| + [w = w'])
double cov_oracle(int b, const std::string& w, const std::string& v) {
  std::size_t k = 0;
  while (k < w.size() && w[k] == v[k]) ++k;
  return std::pow(b, -2.0 * static_cast<double>(w.size())) *
         ((b - 1.0) * static_cast<double>(k) + (w == v ? 1.0 : 0.0));
}

// sum_{k=1}^{L-|w|} b^-k sum_{|v|=k} xi(wv), by explicit enumeration
double zeta_oracle(const XiField& field, const Word& w, int L) {
  double total = 0.0;
  const int b = field.b();
  for (std::size_t k = 1; k + w.size() <= static_cast<std::size_t>(L); ++k) {
    double level_sum = 0.0;
    for (const auto& v : level(b, k)) {
      Word wv = w;
      for (int d : v.digits()) wv = wv.child(d);
      level_sum += field(wv);
    }
    total += std::pow(b, -static_cast<double>(k)) * level_sum;
  }
  return total;
}

std::vector<std::vector<double>> marginal_rows(int b, int j, std::size_t replicas,
                                               std::uint64_t seed) {
  std::vector<std::vector<double>> rows(replicas);
  for (std::size_t r = 0; r < replicas; ++r) {
    const XiField field(b, j, derive(seed, r));
    Stream zeta(derive(seed, r), 1);
    rows[r] = marginal_increments(b, j, field, zeta).increments;
  }
  return rows;
}

}  // namespace

TEST_CASE("exact covariance examples") {
  const Word a = Word::parse(3, "1");
  const Word c = Word::parse(3, "2");
  CHECK(exact_cov(3, 1, a, a) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(exact_cov(3, 1, a, c) == 0.0);
  CHECK(exact_cov(3, 2, Word::parse(3, "00"), Word::parse(3, "01")) ==
        doctest::Approx(2.0 / 81.0).epsilon(1e-15));
  CHECK(exact_cov(3, 2, Word::parse(3, "00"), Word::parse(3, "00")) ==
        doctest::Approx(5.0 / 81.0).epsilon(1e-15));
}

TEST_CASE("exact covariance matrix matches the oracle and is symmetric PSD") {
  for (int b = 2; b <= 4; ++b) {
    for (int j = 0; j <= 4; ++j) {
      const auto words = level(b, static_cast<std::size_t>(j));
      const auto m = exact_cov_matrix(b, j);
      const std::size_t n = words.size();
      REQUIRE(m.size() == n * n);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
          CHECK(m[i * n + k] == doctest::Approx(cov_oracle(b, words[i].str(), words[k].str()))
                                    .epsilon(1e-14));
          CHECK(m[i * n + k] == m[k * n + i]);
        }
      }
#ifdef CASCADE_HAVE_EIGEN
      Eigen::MatrixXd M(n, n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) M(i, k) = m[i * n + k];
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(M);
      CHECK(eig.eigenvalues().minCoeff() >= -1e-12);
#endif
      // the whole interval has unit variance
      double total = 0.0;
      for (double x : m) total += x;
      CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("covariance json is stable") {
  const auto m = exact_cov_matrix(3, 1);
  const auto text = covariance_json(3, 1, m);
  CHECK(text == covariance_json(3, 1, m));
  CHECK(text.find("0.33333333333333331") != std::string::npos);
}

TEST_CASE("xi field is addressable and reproducible") {
  const XiField f(3, 4, 42);
  const XiField g(3, 4, 42);
  const Word w = Word::parse(3, "0121");
  CHECK(f(w) == g(w));
  CHECK(f(w) == f.at(4, rank(w)));
  const auto lvl = f.level(2);
  REQUIRE(lvl.size() == 9);
  CHECK(lvl[5] == f(word_at(3, 2, 5)));
  CHECK(XiField(3, 4, 43)(w) != f(w));
}

TEST_CASE("branching walk sums xi along the ancestry") {
  const XiField f(2, 6, 3);
  const auto walk = branching_walk(f, 6);
  REQUIRE(walk.size() == 64);
  for (std::size_t r = 0; r < walk.size(); ++r) {
    const Word w = word_at(2, 6, r);
    double s = 0.0;
    for (std::size_t k = 1; k <= 6; ++k) s += f(w.prefix(k));
    CHECK(walk[r] == doctest::Approx(s).epsilon(1e-14));
  }
}

TEST_CASE("marginal generator: mean, variance, covariance") {
  SUBCASE("j = 0 has unit variance") {
    std::vector<double> x;
    for (const auto& row : marginal_rows(3, 0, 20000, 5)) x.push_back(row.at(0));
    const auto m2 = empirical_moment(x, 2);
    CHECK(std::abs(m2.value - 1.0) <= 4.0 * m2.se);
  }
  SUBCASE("b = 3, j = 1") {
    const auto est = empirical_cov(marginal_rows(3, 1, 20000, 6));
    const auto exact = exact_cov_matrix(3, 1);
    for (std::size_t i = 0; i < exact.size(); ++i) {
      CHECK(std::abs(est.cov[i] - exact[i]) <= 4.0 * est.se[i]);
    }
  }
  SUBCASE("b = 3, j = 2") {
    const auto rows = marginal_rows(3, 2, 20000, 7);
    const auto est = empirical_cov(rows);
    const auto exact = exact_cov_matrix(3, 2);
    for (std::size_t i = 0; i < exact.size(); ++i) {
      CHECK(std::abs(est.cov[i] - exact[i]) <= 4.0 * est.se[i]);
    }
    for (std::size_t k = 0; k < 9; ++k) {
      std::vector<double> col;
      for (const auto& r : rows) col.push_back(r[k]);
      const auto m = empirical_moment(col, 1);
      CHECK(std::abs(m.value) <= 4.0 * m.se);
      CHECK(est.cov[k * 9 + k] == doctest::Approx(5.0 / 81.0).epsilon(0.05));
    }
    // a fixed increment is Gaussian
    std::vector<double> z;
    for (const auto& r : rows) z.push_back(r[4] / std::sqrt(5.0 / 81.0));
    CHECK(ks_normal(z) < ks_critical_1pct(z.size()));

    // Var X(1) against the quadratic form of the exact matrix
    std::vector<double> totals;
    for (const auto& r : rows) totals.push_back(integrate_path(r).back());
    double quad = 0.0;
    const auto words = level(3, 2);
    for (const auto& w : words)
      for (const auto& v : words) quad += cov_oracle(3, w.str(), v.str());
    const auto t2 = empirical_moment(totals, 2);
    CHECK(std::abs(t2.value - quad) <= 4.0 * t2.se);
  }
}

TEST_CASE("truncated zeta matches direct enumeration and has variance 1 - b^-N") {
  const XiField f(3, 6, 8);
  for (const char* text : {"", "2", "01", "120"}) {
    const Word w = Word::parse(3, text);
    CHECK(zeta_truncated(f, w, 6) == doctest::Approx(zeta_oracle(f, w, 6)).epsilon(1e-13));
  }
  CHECK(zeta_truncated(f, Word::parse(3, "012012"), 6) == 0.0);

  const Word w = Word::parse(3, "02");
  constexpr int L = 7;
  std::vector<double> x(20000);
  for (std::size_t r = 0; r < x.size(); ++r) {
    x[r] = std::sqrt(2.0) * zeta_truncated(XiField(3, L, derive(31, r)), w, L);
  }
  const auto v = empirical_moment(x, 2);
  CHECK(std::abs(v.value - (1.0 - std::pow(3.0, -(L - 2)))) <= 4.0 * v.se);
}

TEST_CASE("depth-n equal-weight average has variance b^-n") {
  constexpr int n = 5;
  std::vector<double> x(20000);
  for (std::size_t r = 0; r < x.size(); ++r) {
    const auto lvl = XiField(3, n, derive(41, r)).level(n);
    double s = 0.0;
    for (double v : lvl) s += v;
    x[r] = s / static_cast<double>(lvl.size());
  }
  const auto v = empirical_moment(x, 2);
  CHECK(std::abs(v.value - std::pow(3.0, -n)) <= 4.0 * v.se);
}

TEST_CASE("consistent measure") {
  constexpr int b = 3, L = 6;
  const XiField f(b, L, 12);
  const auto measure = canonical_measure(b, L, f);
  CHECK(measure.additivity_residual() < 1e-12);

  // direct formula per word
  for (int d = 0; d <= L; ++d) {
    for (const auto& w : level(b, static_cast<std::size_t>(d))) {
      double anc = 0.0;
      for (std::size_t k = 1; k <= w.size(); ++k) anc += f(w.prefix(k));
      const double direct =
          std::pow(b, -static_cast<double>(d)) * std::sqrt(b - 1.0) * (zeta_oracle(f, w, L) + anc);
      CHECK(measure(w) == doctest::Approx(direct).epsilon(1e-12).scale(1e-12));
    }
  }

  const auto j2 = consistent_measure(b, 2, L, f);
  const auto j3 = consistent_measure(b, 3, L, f);
  REQUIRE(j2.increments.size() == 9);
  for (std::size_t r = 0; r < 9; ++r) {
    const double s = j3.increments[3 * r] + j3.increments[3 * r + 1] + j3.increments[3 * r + 2];
    CHECK(std::abs(j2.increments[r] - s) < 1e-12);
  }
  CHECK(j2.variance_deficit == doctest::Approx(std::pow(3.0, -4) * std::pow(3.0, -4)));
  CHECK_THROWS_AS(consistent_measure(b, 7, L, f), InputError);
}

TEST_CASE("consistent measure covariance approaches the exact matrix") {
  constexpr int b = 3, j = 2, L = 7;
  std::vector<std::vector<double>> rows(4000);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    rows[r] = consistent_measure(b, j, L, XiField(b, L, derive(51, r))).increments;
  }
  const auto est = empirical_cov(rows);
  const auto exact = exact_cov_matrix(b, j);
  for (std::size_t i = 0; i < exact.size(); ++i) {
    CHECK(std::abs(est.cov[i] - exact[i]) <= 4.0 * est.se[i]);
  }
}

TEST_CASE("generalized schemes") {
  constexpr int b = 3, L = 6;
  const XiField f(b, L, 13);
  const auto canon = generalized_measure(canonical_scheme(b), b, 3, L, f);
  const auto direct = consistent_measure(b, 3, L, f);
  CHECK(canon.increments == direct.increments);

  CoefficientScheme zero{"zero", [](const Word& w) { return std::pow(3.0, -double(w.size())); },
                         [](const Word&) { return 0.0; }, 2.0};
  for (double x : generalized_measure(zero, b, 3, L, f).increments) CHECK(x == 0.0);

  CHECK_FALSE(check_scheme(geometric_scheme(b, 2.0), b, L).ok);
  CHECK_THROWS_AS(generalized_measure(geometric_scheme(b, 2.0), b, 2, L, f), DomainError);
  const auto ok = check_scheme(geometric_scheme(b, 1.5), b, L);
  CHECK(ok.ok);
  REQUIRE(ok.level_sums.size() == static_cast<std::size_t>(L));
  CHECK(ok.level_sums[0] == doctest::Approx(3.0 * std::pow(1.5 / 3.0, 2)));
}

TEST_CASE("geometric scheme variance matches the finite sum") {
  // Var M(w) = sum_{k=1}^{L-j} b^k (b^{-(j+k)} theta^{j+k})^2 + b^{-2j} sum_{k=1}^{j} theta^{2k}
  constexpr int b = 3, j = 2, L = 6;
  constexpr double theta = 1.3;
  double oracle = 0.0;
  for (int k = 1; k <= L - j; ++k) oracle += std::pow(b, k) * std::pow(std::pow(theta / b, j + k), 2);
  for (int k = 1; k <= j; ++k) oracle += std::pow(b, -2.0 * j) * std::pow(theta, 2 * k);
  std::vector<double> x(10000);
  const auto scheme = geometric_scheme(b, theta);
  for (std::size_t r = 0; r < x.size(); ++r) {
    x[r] = generalized_measure(scheme, b, j, L, XiField(b, L, derive(61, r))).increments[5];
  }
  const auto v = empirical_moment(x, 2);
  CHECK(std::abs(v.value - oracle) <= 4.0 * v.se);
}

TEST_CASE("integrated path") {
  const std::vector<double> zeros(9, 0.0);
  for (double x : integrate_path(zeros)) CHECK(x == 0.0);
  const std::vector<double> inc{0.5, -0.25, 1.0};
  const auto grid = integrate_path(inc);
  REQUIRE(grid.size() == 4);
  CHECK(grid[0] == 0.0);
  CHECK(grid[3] == 1.25);
  const XiField f(3, 3, 1);
  Stream s(1, 9);
  const auto path = marginal_increments(3, 2, f, s);
  CHECK(path.grid_csv().rfind("t,X\n0,0\n", 0) == 0);
}
