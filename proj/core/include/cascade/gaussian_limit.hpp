#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cascade/random.hpp"
#include "cascade/words.hpp"

namespace cascade {

// Tree-indexed i.i.d. standard normals xi(w), 1 <= |w| <= max_depth. Each
// value is a pure function of (seed, w), so refining the depth never changes
// values already drawn.
class XiField {
 public:
  XiField(int b, int max_depth, std::uint64_t seed);

  int b() const noexcept { return b_; }
  int max_depth() const noexcept { return max_depth_; }
  std::uint64_t seed() const noexcept { return seed_; }

  double operator()(const Word& w) const;
  double at(std::size_t depth, std::uint64_t rank) const;
  // All values at one depth, lexicographic order.
  std::vector<double> level(std::size_t depth) const;

 private:
  int b_;
  int max_depth_;
  std::uint64_t seed_;
};

// S(w) = sum_{k<=n} xi(w|_k) for every w of length n.
std::vector<double> branching_walk(const XiField& field, int n);

// Limit covariance of the depth-j increments:
//   b^-2j (1 + (b-1) j) if w == w', b^-2j (b-1) |w ^ w'| otherwise.
double exact_cov(int b, int j, const Word& w, const Word& w2);
// Full b^j x b^j matrix, row-major, lexicographic order.
std::vector<double> exact_cov_matrix(int b, int j);
// {"b","depth","words":[...],"matrix":[[...],...]}
std::string covariance_json(int b, int j, const std::vector<double>& matrix);

enum class GaussianMode { kMarginal, kConsistent };

struct GaussianPath {
  int b = 3;
  int depth = 0;
  GaussianMode mode = GaussianMode::kMarginal;
  int truncation = 0;              // L, consistent mode only
  double variance_deficit = 0.0;   // per increment, consistent mode only
  std::vector<double> increments;  // M([w]), |w| = depth

  // CSV word,increment
  std::string increments_csv() const;
  // CSV t,X on the grid k b^-depth
  std::string grid_csv() const;
};

// Increment at w: b^-j (zeta(w) + sqrt(b-1) sum_{k<=j} xi(w|_k)), zeta(w)
// i.i.d. standard normal from `zeta_rng`. Exact covariance at depth j only.
GaussianPath marginal_increments(int b, int j, const XiField& field, Stream& zeta_rng);

// Truncated descendant series sum_{k=1}^{L-|w|} b^-k sum_{|v|=k} xi(wv).
double zeta_truncated(const XiField& field, const Word& w, int L);

// Additive Gaussian cascade measure truncated at depth L, stored for every
// depth 0..L; M([w]) = sum_l M([wl]) holds up to rounding.
class AdditiveMeasure {
 public:
  // coefficient callbacks receive (depth, rank)
  using Coefficient = std::function<double(std::size_t, std::uint64_t)>;

  AdditiveMeasure(int b, int L, const XiField& field, const Coefficient& alpha,
                  const Coefficient& beta);

  int b() const noexcept { return b_; }
  int truncation() const noexcept { return truncation_; }
  const std::vector<double>& at_depth(int depth) const { return levels_.at(depth); }
  double operator()(const Word& w) const;

  // max_{|w| < L} |M([w]) - sum_l M([wl])|
  double additivity_residual() const;

 private:
  int b_;
  int truncation_;
  std::vector<std::vector<double>> levels_;
};

// Canonical measure: alpha(w) = b^-|w|, beta = sqrt(b-1).
AdditiveMeasure canonical_measure(int b, int L, const XiField& field);

// Depth-j view of the canonical measure truncated at L.
GaussianPath consistent_measure(int b, int j, int L, const XiField& field);

// Coefficients for the generalized measure
//   M([w]) = sum_{1<=|v|<=L-|w|} alpha(wv) beta(wv) xi(wv)
//            + alpha(w) sum_{k<=|w|} beta(w|_k) xi(w|_k).
struct CoefficientScheme {
  std::string name;
  std::function<double(const Word&)> alpha;
  std::function<double(const Word&)> beta;
  double p = 2.0;
};

CoefficientScheme canonical_scheme(int b);
// alpha(w) = b^-|w|, beta(w) = theta^|w|.
CoefficientScheme geometric_scheme(int b, double theta);

struct SchemeCheck {
  bool ok = true;
  std::string violation;          // first violated word and condition
  std::vector<double> level_sums; // sum_{|v|=k} |alpha beta|^p, k = 1..L
};

// Consistency alpha(w) = sum_l alpha(wl) for |w| < L (to 1e-12) and
// non-increasing level sums of |alpha beta|^p, strictly decreasing unless zero.
SchemeCheck check_scheme(const CoefficientScheme& scheme, int b, int L);

GaussianPath generalized_measure(const CoefficientScheme& scheme, int b, int j, int L,
                                 const XiField& field);

// X(k b^-j) = sum of the first k increments; X(0) = 0.
std::vector<double> integrate_path(const std::vector<double>& increments);

double inverse_power(int b, std::size_t k);

}  // namespace cascade
