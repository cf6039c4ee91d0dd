#pragma once

#include <functional>
#include <string>

#include "gibbs/common.hpp"

namespace gibbs {

/// Defocusing potential V(m), m = |u|^2 >= 0, with its first two derivatives.
struct Potential {
  std::string name;
  std::function<double(double)> value;
  std::function<double(double)> d1;
  std::function<double(double)> d2;
  bool is_zero = false;

  double operator()(double m) const { return value(m); }

  static Potential zero();
  /// V(m) = coeff * m^power, power == 1 or power >= 2 (C^2 on m >= 0), coeff >= 0.
  static Potential power(double power, double coeff);
};

}  // namespace gibbs
