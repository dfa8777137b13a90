#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cascade {

// Upper bound on the second moment for the third-moment-controlled domain.
// Requires b >= 3.
double w2_bound(int b);

// Third-moment threshold for a law with second moment t, 1 < t < w2_bound(b).
// Always below b^2 - 1 and tends to it as t -> 1.
double w3_bound(int b, double t);

enum class Domain {
  kInDb,      // 1 < m2 < w2(b) and m3 < w3(b, m2)
  kInPbOnly,  // 1 < m2 < b - 1, third-moment condition fails
  kOutside,
};

std::string_view to_string(Domain d);

// Classifies a unit-mean law by its first three moments.
Domain classify_domain(int b, double m1, double m2, double m3);

// Exact second and third moments of T^n mu, n = 0..N.
struct MomentTrajectory {
  int b = 3;
  std::vector<double> u;       // m2(T^n mu)
  std::vector<double> v;       // m3(T^n mu)
  std::vector<double> sigma2;  // u_n - 1

  std::size_t size() const noexcept { return u.size(); }
  // (b-1)^{n/2} sigma_n
  double scaled_sigma(std::size_t n) const;
};

// u_{k+1} = (b-1)/(b-u_k), v_{k+1} = (b-1)(3 u_k u_{k+1} + b-2)/(b^2-v_k).
// Throws DivergenceError carrying k when u_k >= b or v_k >= b^2 would be
// needed to advance.
MomentTrajectory iterate_moments(int b, double u0, double v0, int n);

// sigma_n^2 from sigma_n^2/(b-2-sigma_n^2) = c (b-1)^{-n}, c = s0/(b-2-s0).
double sigma_closed_form(int b, double sigma0_sq, int n);

// lim (b-1)^{n/2} sigma_n = sigma_0 sqrt((b-2)/(b-2-sigma_0^2)).
double sigma_limit(int b, double sigma0_sq);

// E R_n^2 = (sigma_{n-1}^2 + (sigma_{n-1}/sigma_n - sqrt(b-1))^2) / b.
double rn_squared(int b, double sigma_prev_sq, double sigma_sq);

// Explicit upper bound on (E T_{1,n}^2)^{1/2}:
//   sum_{k<n} b^-k ( sum_{j<=k} C(k,j) b^k (b-1)^j r_{n-j}^2 )^{1/2}
// with r_m^2 = rn_squared(sigma2[m-1], sigma2[m]). sigma2 must hold indices 0..n.
double t1_variance_bound(int b, std::span<const double> sigma2, int n);

// Lindeberg sum bound with the epsilon^{2-p} factor removed:
//   (((b-1)^{p/2} + 1) / b^{p-1})^n * sup_zp.
double lindeberg_bound(int b, double p, int n, double sup_zp);

// Explicit upper bound on E|Z_{n+1}|^3 given m3 = E W_n^3, z3 = E|Z_n|^3 and
// r = sigma_n / sigma_{n+1} (constant-free form of the third-moment
// inequality, Hoelder substitutions applied).
double third_moment_rhs(int b, double m3_w, double z3_w, double r);

// z_0 = z0, z_{k+1} = third_moment_rhs(b, v_k, z_k, sigma_k/sigma_{k+1}).
// The trajectory must cover indices 0..steps.
std::vector<double> iterate_third_moment_bound(const MomentTrajectory& traj, double z0,
                                               int steps);

// CSV with header n,u,v,sigma2,scaled_sigma.
std::string trajectory_csv(const MomentTrajectory& traj);

}  // namespace cascade
