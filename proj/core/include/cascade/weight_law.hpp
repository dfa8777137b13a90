#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "cascade/moments.hpp"
#include "cascade/random.hpp"

namespace cascade {

// Unit-mean weight distributions with closed-form moments.
struct Dirac1 {};
struct TwoPoint {  // 1 - a or 1 + a with probability 1/2 each
  double a;
};
struct Uniform {  // uniform on [1 - c, 1 + c]
  double c;
};
struct LogNormal {  // exp(rho G - rho^2 / 2), G standard normal
  double rho;
};

class WeightLaw {
 public:
  using Variant = std::variant<Dirac1, TwoPoint, Uniform, LogNormal>;

  static WeightLaw dirac();
  static WeightLaw two_point(double a);
  static WeightLaw uniform(double c);
  static WeightLaw log_normal(double rho);

  // m_p for p in {1, 2, 3}.
  double moment(int p) const;

  double draw(Stream& rng) const;
  std::vector<double> sample(Stream& rng, std::size_t count) const;

  // Config-file name: dirac, twopoint, uniform, lognormal.
  std::string name() const;
  // Name plus parameter, e.g. "twopoint(a=0.69999999999999996)".
  std::string describe() const;

  const Variant& variant() const noexcept { return law_; }

 private:
  explicit WeightLaw(Variant v) : law_(v) {}
  Variant law_;
};

// Domain classification of the law for branching number b.
Domain validate_for_cascade(const WeightLaw& law, int b);

}  // namespace cascade
