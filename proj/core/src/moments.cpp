#include "cascade/moments.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "cascade/csv.hpp"
#include "cascade/errors.hpp"

namespace cascade {

namespace {

void require_b3(int b, const char* what) {
  if (b < 3) throw DomainError(std::string(what) + ": requires b >= 3, got " + std::to_string(b));
}

// b(b^4 - 4b^2 + 12b - 8) and b^4 + 8b^2 - 12b + 4.
double w_numer(double b) { return b * (b * b * b * b - 4 * b * b + 12 * b - 8); }
double w_denom(double b) { return b * b * b * b + 8 * b * b - 12 * b + 4; }

}  // namespace

double w2_bound(int b) {
  require_b3(b, "w2_bound");
  const double bd = b;
  return std::min(bd - 1.0, w_numer(bd) / w_denom(bd));
}

double w3_bound(int b, double t) {
  require_b3(b, "w3_bound");
  const double w2 = w2_bound(b);
  if (!(t > 1.0 && t < w2)) {
    throw DomainError("w3_bound: t = " + std::to_string(t) + " outside (1, w2(b) = " +
                      std::to_string(w2) + ")");
  }
  const double bd = b;
  const double radicand = (w_numer(bd) - t * w_denom(bd)) / (bd - t);
  if (radicand < 0.0) {
    throw std::logic_error("w3_bound: negative radicand on the legal domain");
  }
  return 0.5 * bd * bd + 0.5 * std::sqrt(radicand);
}

std::string_view to_string(Domain d) {
  switch (d) {
    case Domain::kInDb: return "IN_D_b";
    case Domain::kInPbOnly: return "IN_P_b_ONLY";
    case Domain::kOutside: return "OUTSIDE";
  }
  return "UNKNOWN";
}

Domain classify_domain(int b, double m1, double m2, double m3) {
  require_b3(b, "classify_domain");
  if (std::abs(m1 - 1.0) > 1e-12) {
    throw InputError("classify_domain: first moment must be 1, got " + std::to_string(m1));
  }
  if (m2 < 1.0) throw InputError("classify_domain: m2 < 1 contradicts Cauchy-Schwarz");
  if (m3 < m2 * m2 * (1.0 - 1e-12)) {
    throw InputError("classify_domain: m3 < m2^2 contradicts Cauchy-Schwarz");
  }
  const double bd = b;
  if (m2 > 1.0 && m2 < w2_bound(b) && m3 < w3_bound(b, m2)) return Domain::kInDb;
  if (m2 > 1.0 && m2 < bd - 1.0) return Domain::kInPbOnly;
  return Domain::kOutside;
}

double MomentTrajectory::scaled_sigma(std::size_t n) const {
  return std::pow(static_cast<double>(b - 1), 0.5 * static_cast<double>(n)) *
         std::sqrt(sigma2.at(n));
}

MomentTrajectory iterate_moments(int b, double u0, double v0, int n) {
  if (b < 2) throw DomainError("iterate_moments: b must be >= 2");
  if (n < 0) throw InputError("iterate_moments: n must be >= 0");
  if (u0 < 1.0) throw InputError("iterate_moments: u0 must be >= 1");
  if (v0 <= 0.0) throw InputError("iterate_moments: v0 must be > 0");
  const double bd = b;
  MomentTrajectory traj;
  traj.b = b;
  traj.u.reserve(static_cast<std::size_t>(n) + 1);
  traj.v.reserve(static_cast<std::size_t>(n) + 1);
  traj.u.push_back(u0);
  traj.v.push_back(v0);
  for (int k = 0; k < n; ++k) {
    const double u = traj.u.back();
    const double v = traj.v.back();
    if (u >= bd || v >= bd * bd) {
      std::ostringstream msg;
      msg << "moment recursion diverges at step " << k << " (u = " << u << ", v = " << v
          << "; need u < " << b << " and v < " << b * b << ")";
      throw DivergenceError(msg.str(), static_cast<std::size_t>(k));
    }
    const double u_next = (bd - 1.0) / (bd - u);
    const double v_next = (bd - 1.0) * (3.0 * u * u_next + bd - 2.0) / (bd * bd - v);
    traj.u.push_back(u_next);
    traj.v.push_back(v_next);
  }
  // sigma^2 -> sigma^2 / (b - 1 - sigma^2) directly; u - 1 cancels once sigma^2 is tiny.
  traj.sigma2.reserve(traj.u.size());
  traj.sigma2.push_back(u0 - 1.0);
  for (std::size_t k = 1; k < traj.u.size(); ++k) {
    const double s = traj.sigma2.back();
    traj.sigma2.push_back(s / (bd - 1.0 - s));
  }
  return traj;
}

double sigma_closed_form(int b, double sigma0_sq, int n) {
  require_b3(b, "sigma_closed_form");
  const double room = static_cast<double>(b) - 2.0;
  if (!(sigma0_sq > 0.0 && sigma0_sq < room)) {
    throw DomainError("sigma_closed_form: need 0 < sigma0^2 < b - 2");
  }
  if (n < 0) throw InputError("sigma_closed_form: n must be >= 0");
  const double c = sigma0_sq / (room - sigma0_sq);
  const double scaled = c * std::pow(static_cast<double>(b) - 1.0, -static_cast<double>(n));
  return room * scaled / (1.0 + scaled);
}

double sigma_limit(int b, double sigma0_sq) {
  require_b3(b, "sigma_limit");
  const double room = static_cast<double>(b) - 2.0;
  if (!(sigma0_sq > 0.0 && sigma0_sq < room)) {
    throw DomainError("sigma_limit: need 0 < sigma0^2 < b - 2");
  }
  return std::sqrt(sigma0_sq) * std::sqrt(room / (room - sigma0_sq));
}

double rn_squared(int b, double sigma_prev_sq, double sigma_sq) {
  if (!(sigma_prev_sq > 0.0 && sigma_sq > 0.0)) {
    throw DomainError("rn_squared: variances must be positive");
  }
  const double gap = std::sqrt(sigma_prev_sq / sigma_sq) - std::sqrt(static_cast<double>(b) - 1.0);
  return (sigma_prev_sq + gap * gap) / static_cast<double>(b);
}

double t1_variance_bound(int b, std::span<const double> sigma2, int n) {
  if (n < 1) throw InputError("t1_variance_bound: n must be >= 1");
  if (sigma2.size() < static_cast<std::size_t>(n) + 1) {
    throw InputError("t1_variance_bound: trajectory shorter than n + 1");
  }
  const double bd = b;
  std::vector<double> r2(static_cast<std::size_t>(n) + 1, 0.0);
  for (int m = 1; m <= n; ++m) r2[m] = rn_squared(b, sigma2[m - 1], sigma2[m]);

  double total = 0.0;
  std::vector<double> binom{1.0};
  for (int k = 0; k < n; ++k) {
    if (k > 0) {
      std::vector<double> next(static_cast<std::size_t>(k) + 1, 1.0);
      for (int j = 1; j < k; ++j) next[j] = binom[j - 1] + binom[j];
      binom = std::move(next);
    }
    // b^k factored out of the inner sum and combined with b^-k outside.
    double inner = 0.0;
    double weight = 1.0;  // (b-1)^j
    for (int j = 0; j <= k; ++j) {
      inner += binom[j] * weight * r2[n - j];
      weight *= bd - 1.0;
    }
    total += std::pow(bd, -0.5 * k) * std::sqrt(inner);
  }
  return total;
}

double lindeberg_bound(int b, double p, int n, double sup_zp) {
  if (!(p > 2.0)) throw DomainError("lindeberg_bound: requires p > 2");
  if (n < 0) throw InputError("lindeberg_bound: n must be >= 0");
  const double bd = b;
  const double ratio = (std::pow(bd - 1.0, 0.5 * p) + 1.0) / std::pow(bd, p - 1.0);
  return std::pow(ratio, n) * sup_zp;
}

double third_moment_rhs(int b, double m3_w, double z3_w, double r) {
  const double bd = b;
  const double b2m1 = bd * bd - 1.0;
  if (!(m3_w < bd * bd)) throw DomainError("third_moment_rhs: requires E W^3 < b^2");
  if (z3_w < 0.0) throw InputError("third_moment_rhs: E|Z|^3 must be >= 0");
  if (!(r > 0.0)) throw InputError("third_moment_rhs: r must be > 0");
  const double root = std::pow(bd - 1.0, 1.5);
  const double t0 = (bd - 1.0) * (4.0 * bd - 5.0);
  const double t1 = std::pow(b2m1, 2.0 / 3.0) * std::cbrt(z3_w) + 2.0 * root +
                    (bd - 1.0) * (2.0 * bd - 3.0);
  const double t2 = std::cbrt(b2m1) * std::pow(z3_w, 2.0 / 3.0) + 2.0 * root +
                    (bd - 1.0) * (bd - 1.0);
  const double t3 = b2m1;
  const double r2 = r * r;
  const double r3 = r2 * r;
  return (r3 * z3_w + t0 + 3.0 * r * t1 + 3.0 * r2 * t2 + r3 * t3) / (bd * bd - m3_w);
}

std::vector<double> iterate_third_moment_bound(const MomentTrajectory& traj, double z0,
                                               int steps) {
  if (steps < 0 || traj.size() < static_cast<std::size_t>(steps) + 1) {
    throw InputError("iterate_third_moment_bound: trajectory too short");
  }
  std::vector<double> z{z0};
  for (int k = 0; k < steps; ++k) {
    const double r = std::sqrt(traj.sigma2[k] / traj.sigma2[k + 1]);
    z.push_back(third_moment_rhs(traj.b, traj.v[k], z.back(), r));
  }
  return z;
}

std::string trajectory_csv(const MomentTrajectory& traj) {
  CsvWriter csv({"n", "u", "v", "sigma2", "scaled_sigma"});
  for (std::size_t n = 0; n < traj.size(); ++n) {
    csv.row(static_cast<long long>(n), traj.u[n], traj.v[n], traj.sigma2[n],
            traj.scaled_sigma(n));
  }
  return csv.str();
}

}  // namespace cascade
