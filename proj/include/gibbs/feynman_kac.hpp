#pragma once

#include <cstdint>
#include <vector>

#include "gibbs/potential.hpp"
#include "gibbs/stats.hpp"

namespace gibbs {

/// Uniform grid on [-u_max, u_max] in field-value space.
struct StateGrid {
  double u_max = 8.0;
  double du = 0.02;
  std::vector<double> u;

  static StateGrid make(double u_max = 8.0, double du_target = 0.02);
  std::size_t size() const { return u.size(); }
};

enum class PotentialKind { T0, TV };

/// Tridiagonal -d^2/du^2 + u^2 [+ V(u^2)] - 1/2 with Dirichlet ends.
struct SchrodingerOp {
  StateGrid grid;
  PotentialKind kind = PotentialKind::T0;
  std::vector<double> diag;
  double off = 0.0;  // constant off-diagonal

  static SchrodingerOp build(const StateGrid& grid, const Potential& V);
};

struct GroundState {
  double E;
  double E1;  // second eigenvalue, reported for the gap
  std::vector<double> omega;
};

/// Lowest eigenpair: bisection on the Sturm sequence, then shifted inverse
/// iteration with tridiagonal solves.
GroundState ground_state(const SchrodingerOp& op, double tol = 1e-10);

enum class Direction { forward, backward };

/// Killed OU propagation over x_span on the grid: forward solves
/// d_s phi = L* phi - V(u^2) phi, backward d_s phi = L phi - V(u^2) phi,
/// L = 1/2 d^2 - u d. Zero-flux ends.
std::vector<double> ou_propagate(std::vector<double> phi, double x_span, const Potential& V, const StateGrid& grid,
                                 Direction direction);

/// e^{-u^2} on the grid, normalized to unit du-mass.
std::vector<double> stationary_density(const StateGrid& grid);

struct MarginalDensity {
  StateGrid grid;
  std::vector<double> density;

  double mass() const;
  double moment(double r) const;
  /// Mass falling in [edges[i], edges[i+1]) with linear interpolation.
  std::vector<double> bin_masses(const std::vector<double>& edges) const;
};

/// Law of u(x) under the sharp-window measure on [-R, R] (real field).
MarginalDensity marginal_rho3(double R, double x, const Potential& V, const StateGrid& grid);

double moment_under_rho3(double r, double x, double R, const Potential& V, const StateGrid& grid);

/// Monte-Carlo counterpart: exact OU paths on [-R, R] with step h, weights
/// exp(-trapezoid of V(u^2)), and the value u(x) of each path.
struct WeightedValues {
  std::vector<double> values;
  std::vector<double> weights;
};
WeightedValues mc_rho3_values(double R, double x, const Potential& V, std::size_t n, std::uint64_t seed,
                              double h = 1.0 / 128);

}  // namespace gibbs
