#pragma once

#include "gibbs/common.hpp"

namespace gibbs {

/// Smooth cutoff: exactly 1 on [-R, R], exactly 0 outside [-R', R'], with the
/// C-infinity transition t -> g(t) / (g(t) + g(1-t)), g(t) = e^{-1/t} for t > 0.
class CutoffFn {
 public:
  CutoffFn(double R, double R_prime);

  double R() const { return R_; }
  double R_prime() const { return R_prime_; }
  double operator()(double x) const;
  /// Integral of chi over the real line (exact transition symmetry gives R + R').
  double integral() const { return R_ + R_prime_; }

 private:
  double R_;
  double R_prime_;
};

/// R may be 0, in which case chi is a bump of half-width R'.
CutoffFn build_chi(double R, double R_prime);

/// R'(L) = R + 1 / (C sqrt(L)).
double r_prime_for(double R, double L, double C = 100.0);

}  // namespace gibbs
