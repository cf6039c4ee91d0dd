#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "gibbs/flow.hpp"

namespace gibbs {

/// Coefficient a(x) with the decay bound |a(x)| <= C <x>^{-gamma}, gamma > 1.
struct Coefficient {
  std::function<double(double)> a;
  double C = 1.0;
  double gamma = 2.0;

  /// a(x) = <x>^{-2}.
  static Coefficient bracket_power(double power = 2.0);
};

/// i d_t u = -d_x((1+a) d_x u) + V'(|u|^2) u in the variable y = Phi(x),
/// Phi' = 1/(1+a): i d_t v = -(1/w) d_y^2 v + chi V'(|v|^2) v with
/// w(y) = 1 + a(Phi^{-1}(y)), i.e. d_t v = J grad H with J = -i/w and
/// H = 1/2 int |v_y|^2 + 1/2 int w chi V(|v|^2).
class TransformedProblem {
 public:
  TransformedProblem(Coefficient coeff, std::shared_ptr<const ProblemSpec> base);

  const ProblemSpec& base() const { return *base_; }
  const Coefficient& coefficient() const { return coeff_; }

  double Phi(double x) const;
  double Phi_inv(double y) const;
  double weight(double y) const { return 1.0 + coeff_.a(Phi_inv(y)); }

  SpectralField grad_H(const SpectralField& v);
  SpectralField apply_J(const SpectralField& g);
  SpectralField rhs(const SpectralField& v) { return apply_J(grad_H(v)); }
  SpectralField step(const SpectralField& v, double dt, double tol);
  /// Midpoint steps to t_final with a final partial step.
  SpectralField flow(const SpectralField& v0, double t_final, double dt, double tol);
  double energy(const SpectralField& v);

 private:
  Coefficient coeff_;
  std::shared_ptr<const ProblemSpec> base_;
  // Phi on nodes x_i = -X + i h with Hermite data Phi'(x_i) = 1/(1+a(x_i)).
  double X_ = 0.0;
  double h_ = 0.0;
  std::vector<double> phi_;
  std::vector<double> dphi_;
  SpectralGrid grid_;
  std::vector<double> w_;    // weight on the spec grid
  std::vector<double> chi_;  // cutoff on the spec grid
  std::vector<Complex> values_;
  std::vector<Complex> work_;
};

TransformedProblem build_variable_coeff(Coefficient coeff, std::shared_ptr<const ProblemSpec> base);

struct TestFunction {
  double center;
  double width;
};

struct WeakResidual {
  double t;
  std::vector<double> relative;  // per test function
  double max_relative;
};

/// Back-transforms v(t) to u(t, x) = v(t, Phi(x)) and evaluates
/// |int i u_t psi - (1+a) u_x psi' - chi(Phi(x)) V'(|u|^2) u psi dx| divided by
/// the sum of the three term magnitudes, for Gaussian test functions psi.
/// u_t uses central differences of the flow over +-tau.
WeakResidual weak_form_residual(TransformedProblem& problem, const SpectralField& v0, double t, double dt,
                                double tol, const std::vector<TestFunction>& tests, double tau = 1e-3);

}  // namespace gibbs
