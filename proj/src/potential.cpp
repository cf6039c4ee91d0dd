#include "gibbs/potential.hpp"

#include <cmath>
#include <sstream>

namespace gibbs {

Potential Potential::zero() {
  Potential v;
  v.name = "zero";
  v.value = [](double) { return 0.0; };
  v.d1 = [](double) { return 0.0; };
  v.d2 = [](double) { return 0.0; };
  v.is_zero = true;
  return v;
}

Potential Potential::power(double p, double coeff) {
  require(coeff >= 0.0, ErrorKind::invalid_parameter, "potential must be nonnegative (defocusing)");
  require(p == 1.0 || p >= 2.0, ErrorKind::invalid_parameter, "power must be 1 or >= 2");
  if (coeff == 0.0) return zero();
  Potential v;
  std::ostringstream os;
  os << coeff << "*m^" << p;
  v.name = os.str();
  v.value = [p, coeff](double m) { return coeff * std::pow(m, p); };
  v.d1 = [p, coeff](double m) { return p == 1.0 ? coeff : coeff * p * std::pow(m, p - 1.0); };
  v.d2 = [p, coeff](double m) {
    if (p == 1.0) return 0.0;
    if (p == 2.0) return 2.0 * coeff;
    return coeff * p * (p - 1.0) * std::pow(m, p - 2.0);
  };
  return v;
}

}  // namespace gibbs
