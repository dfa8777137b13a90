#include "cascade/weight_law.hpp"

#include <cmath>
#include <string>

#include "cascade/csv.hpp"
#include "cascade/errors.hpp"

namespace cascade {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

WeightLaw WeightLaw::dirac() { return WeightLaw(Dirac1{}); }

WeightLaw WeightLaw::two_point(double a) {
  if (!(a > 0.0 && a < 1.0)) throw InputError("twopoint: a must lie in (0, 1)");
  return WeightLaw(TwoPoint{a});
}

WeightLaw WeightLaw::uniform(double c) {
  if (!(c > 0.0 && c <= 1.0)) throw InputError("uniform: c must lie in (0, 1]");
  return WeightLaw(Uniform{c});
}

WeightLaw WeightLaw::log_normal(double rho) {
  if (!(rho > 0.0)) throw InputError("lognormal: rho must be > 0");
  return WeightLaw(LogNormal{rho});
}

double WeightLaw::moment(int p) const {
  if (p < 1 || p > 3) throw InputError("moment: only p in {1, 2, 3} is supported");
  if (p == 1) return 1.0;
  return std::visit(
      overloaded{
          [](Dirac1) { return 1.0; },
          [p](TwoPoint t) { return p == 2 ? 1.0 + t.a * t.a : 1.0 + 3.0 * t.a * t.a; },
          [p](Uniform u) { return p == 2 ? 1.0 + u.c * u.c / 3.0 : 1.0 + u.c * u.c; },
          [p](LogNormal l) { return std::exp(l.rho * l.rho * (p == 2 ? 1.0 : 3.0)); },
      },
      law_);
}

double WeightLaw::draw(Stream& rng) const {
  return std::visit(overloaded{
                        [](Dirac1) { return 1.0; },
                        [&rng](TwoPoint t) {
                          return (rng.next_u64() >> 63) != 0 ? 1.0 + t.a : 1.0 - t.a;
                        },
                        [&rng](Uniform u) { return 1.0 - u.c + 2.0 * u.c * rng.uniform(); },
                        [&rng](LogNormal l) {
                          return std::exp(l.rho * rng.normal() - 0.5 * l.rho * l.rho);
                        },
                    },
                    law_);
}

std::vector<double> WeightLaw::sample(Stream& rng, std::size_t count) const {
  std::vector<double> out(count);
  for (auto& x : out) x = draw(rng);
  return out;
}

std::string WeightLaw::name() const {
  return std::visit(overloaded{
                        [](Dirac1) { return std::string("dirac"); },
                        [](TwoPoint) { return std::string("twopoint"); },
                        [](Uniform) { return std::string("uniform"); },
                        [](LogNormal) { return std::string("lognormal"); },
                    },
                    law_);
}

std::string WeightLaw::describe() const {
  return std::visit(overloaded{
                        [](Dirac1) { return std::string("dirac"); },
                        [](TwoPoint t) { return "twopoint(a=" + format_real(t.a) + ")"; },
                        [](Uniform u) { return "uniform(c=" + format_real(u.c) + ")"; },
                        [](LogNormal l) { return "lognormal(rho=" + format_real(l.rho) + ")"; },
                    },
                    law_);
}

Domain validate_for_cascade(const WeightLaw& law, int b) {
  return classify_domain(b, law.moment(1), law.moment(2), law.moment(3));
}

}  // namespace cascade
