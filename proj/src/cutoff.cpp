#include "gibbs/cutoff.hpp"

#include <cmath>

namespace gibbs {

namespace {
double smooth_step_g(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }
}  // namespace

CutoffFn::CutoffFn(double R, double R_prime) : R_(R), R_prime_(R_prime) {
  require(R >= 0.0 && std::isfinite(R_prime), ErrorKind::invalid_parameter, "R must be nonnegative");
  require(R < R_prime, ErrorKind::invalid_parameter, "cutoff requires R < R'");
}

double CutoffFn::operator()(double x) const {
  const double a = std::abs(x);
  if (a <= R_) return 1.0;
  if (a >= R_prime_) return 0.0;
  const double t = (R_prime_ - a) / (R_prime_ - R_);
  const double g0 = smooth_step_g(t);
  const double g1 = smooth_step_g(1.0 - t);
  return g0 / (g0 + g1);
}

CutoffFn build_chi(double R, double R_prime) { return CutoffFn(R, R_prime); }

double r_prime_for(double R, double L, double C) {
  require(L > 0.0 && C > 0.0, ErrorKind::invalid_parameter, "L and C must be positive");
  return R + 1.0 / (C * std::sqrt(L));
}

}  // namespace gibbs
