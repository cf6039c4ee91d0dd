#pragma once

#include <vector>

namespace gibbs {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule (Newton on the Legendre recurrence).
GaussRule gauss_legendre(int n);

}  // namespace gibbs
