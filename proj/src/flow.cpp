#include "gibbs/flow.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace gibbs {

std::string_view to_string(JKind kind) {
  switch (kind) {
    case JKind::multiply_i: return "multiply_i";
    case JKind::d_dx: return "d_dx";
    case JKind::variable_coeff: return "variable_coeff";
  }
  return "unknown";
}

JKind j_kind_from_string(std::string_view name) {
  if (name == "multiply_i") return JKind::multiply_i;
  if (name == "d_dx") return JKind::d_dx;
  if (name == "variable_coeff") return JKind::variable_coeff;
  fail(ErrorKind::invalid_parameter, "unknown J kind '" + std::string(name) + "'");
}

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::midpoint: return "midpoint";
    case Scheme::splitting: return "splitting";
    case Scheme::euler: return "euler";
  }
  return "unknown";
}

Scheme scheme_from_string(std::string_view name) {
  if (name == "midpoint") return Scheme::midpoint;
  if (name == "splitting") return Scheme::splitting;
  if (name == "euler") return Scheme::euler;
  fail(ErrorKind::invalid_parameter, "unknown scheme '" + std::string(name) + "'");
}

std::size_t ProblemSpec::default_grid_size(double L, int n_cut) {
  const int K = mode_cutoff(L, n_cut);
  const auto need = static_cast<std::size_t>(
      std::max(std::ceil(4.0 * n_cut * L - 1e-9), static_cast<double>(2 * K + 1)));
  std::size_t m = 4;
  while (m < need) m *= 2;
  return m;
}

void ProblemSpec::validate() const {
  require(L > 0.0, ErrorKind::invalid_parameter, "L must be positive");
  require(n_cut >= 1, ErrorKind::invalid_parameter, "N_cut must be >= 1");
  require(kappa >= 0.0, ErrorKind::invalid_parameter, "kappa must be nonnegative");
  require(J != JKind::d_dx || mode == ValueMode::real, ErrorKind::invalid_parameter,
          "J = d/dx requires real-valued fields");
  require(static_cast<double>(grid_size) >= 4.0 * n_cut * L - 1e-9, ErrorKind::invalid_parameter,
          "grid_size must be >= 4 N_cut L");
  require(grid_size >= static_cast<std::size_t>(2 * max_mode() + 1), ErrorKind::aliasing,
          "grid_size below the number of modes");
}

SpectralField midpoint_step(const SpectralField& u, double dt, double tol, const Rhs& rhs, int max_iter) {
  require(tol > 0.0, ErrorKind::invalid_parameter, "tolerance must be positive");
  double scale = 1.0;
  for (const auto& c : u.coeffs()) scale = std::max(scale, std::abs(c));
  SpectralField next = u;
  {
    SpectralField f = rhs(u);
    f *= dt;
    next += f;
  }
  const std::size_t n = u.size();
  SpectralField mid = u;
  for (int it = 0; it < max_iter; ++it) {
    for (std::size_t i = 0; i < n; ++i) mid.coeffs()[i] = 0.5 * (u.coeffs()[i] + next.coeffs()[i]);
    SpectralField f = rhs(mid);
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const Complex v = u.coeffs()[i] + dt * f.coeffs()[i];
      change = std::max(change, std::abs(v - next.coeffs()[i]));
      next.coeffs()[i] = v;
    }
    if (!std::isfinite(change)) break;
    if (change <= tol * scale) return next;
  }
  fail(ErrorKind::step_failure, "midpoint fixed-point iteration did not converge");
}

FlowEngine::FlowEngine(std::shared_ptr<const ProblemSpec> spec)
    : spec_(std::move(spec)),
      grid_((spec_->validate(), spec_->L), spec_->max_mode(), spec_->grid_size),
      chi_(spec_->grid_size),
      values_(spec_->grid_size),
      work_(spec_->grid_size) {
  for (std::size_t j = 0; j < chi_.size(); ++j) chi_[j] = spec_->chi(grid_.point(j));
}

const std::vector<Complex>& FlowEngine::values(const SpectralField& u) {
  grid_.to_grid(u.coeffs(), values_);
  return values_;
}

SpectralField FlowEngine::grad_nonlinear(const SpectralField& u) {
  const auto& s = *spec_;
  SpectralField g = s.zero_field();
  require(u.same_space(g), ErrorKind::invalid_parameter, "state is not in the truncated space");
  if (s.V.is_zero) return g;
  grid_.to_grid(u.coeffs(), values_);
  for (std::size_t j = 0; j < values_.size(); ++j) {
    if (chi_[j] == 0.0) {
      work_[j] = 0.0;
      continue;
    }
    const double dv = s.V.d1(std::norm(values_[j]));
    require(std::isfinite(dv), ErrorKind::nonfinite_value, "V' is not finite on the grid");
    work_[j] = chi_[j] * dv * values_[j];
  }
  grid_.to_coeffs(work_, g.coeffs());
  return g;
}

SpectralField FlowEngine::grad_H(const SpectralField& u) {
  SpectralField g = grad_nonlinear(u);
  const int K = g.max_mode();
  for (int k = -K; k <= K; ++k) {
    const double kl = static_cast<double>(k) / spec_->L;
    g[k] += kl * kl * u[k];
  }
  return g;
}

SpectralField FlowEngine::apply_J(const SpectralField& f) const { return gibbs::apply_J(f, *spec_); }

SpectralField apply_J(const SpectralField& f, const ProblemSpec& spec) {
  SpectralField out = f;
  const int K = f.max_mode();
  switch (spec.J) {
    case JKind::multiply_i:
      out *= Complex(0.0, 1.0);
      break;
    case JKind::d_dx:
      for (int k = -K; k <= K; ++k) out[k] *= Complex(0.0, static_cast<double>(k) / f.L());
      break;
    case JKind::variable_coeff:
      fail(ErrorKind::unsupported, "variable-coefficient J is handled by TransformedProblem");
  }
  return out;
}

SpectralField FlowEngine::step_midpoint(const SpectralField& u, double dt, double tol) {
  require(dt > 0.0 || dt < 0.0, ErrorKind::invalid_parameter, "dt must be nonzero");
  return midpoint_step(u, dt, tol, [this](const SpectralField& v) { return rhs(v); });
}

void FlowEngine::linear_half_step(SpectralField& u, double dt) const {
  const int K = u.max_mode();
  for (int k = -K; k <= K; ++k) {
    const double kl = static_cast<double>(k) / u.L();
    u[k] *= std::polar(1.0, 0.5 * dt * kl * kl);
  }
}

SpectralField FlowEngine::step_splitting(const SpectralField& u, double dt) {
  require(spec_->J == JKind::multiply_i, ErrorKind::unsupported, "splitting requires J = i");
  SpectralField v = u;
  linear_half_step(v, dt);
  if (!spec_->V.is_zero) {
    // The projected nonlinear subflow is solved by a midpoint step. A pointwise
    // phase rotation followed by projection is only first order.
    const Rhs nonlinear = [this](const SpectralField& w) { return apply_J(grad_nonlinear(w)); };
    v = midpoint_step(v, dt, kSplittingTol, nonlinear);
  }
  linear_half_step(v, dt);
  return v;
}

SpectralField FlowEngine::step_euler(const SpectralField& u, double dt) {
  SpectralField f = rhs(u);
  f *= dt;
  return u + f;
}

SpectralField FlowEngine::step(const SpectralField& u, double dt, Scheme scheme, double tol) {
  switch (scheme) {
    case Scheme::midpoint: return step_midpoint(u, dt, tol);
    case Scheme::splitting: return step_splitting(u, dt);
    case Scheme::euler: return step_euler(u, dt);
  }
  fail(ErrorKind::internal, "unknown scheme");
}

double FlowEngine::potential_integral(const SpectralField& u) {
  if (spec_->V.is_zero) return 0.0;
  grid_.to_grid(u.coeffs(), values_);
  double s = 0.0;
  for (std::size_t j = 0; j < values_.size(); ++j) {
    if (chi_[j] == 0.0) continue;
    const double v = spec_->V(std::norm(values_[j]));
    require(std::isfinite(v), ErrorKind::nonfinite_value, "V is not finite on the grid");
    s += chi_[j] * v;
  }
  return s * grid_.spacing();
}

Conserved FlowEngine::conserved(const SpectralField& u) {
  const int K = u.max_mode();
  const double L = u.L();
  double kinetic = 0.0;
  double mass = 0.0;
  for (int k = -K; k <= K; ++k) {
    const double kl = static_cast<double>(k) / L;
    kinetic += kl * kl * std::norm(u[k]);
    mass += std::norm(u[k]);
  }
  return {kPi * L * kinetic + 0.5 * potential_integral(u), kPi * L * mass};
}

FlowEngine& thread_engine(const std::shared_ptr<const ProblemSpec>& spec) {
  thread_local std::shared_ptr<const ProblemSpec> cached_spec;
  thread_local std::unique_ptr<FlowEngine> cached;
  if (!cached || cached_spec != spec) {
    cached = std::make_unique<FlowEngine>(spec);
    cached_spec = spec;
  }
  return *cached;
}

SpectralField grad_H(const FlowState& state) {
  FlowEngine engine(state.spec);
  return engine.grad_H(state.field);
}

FlowState step_midpoint(const FlowState& state, double dt, double tol) {
  require(dt > 0.0 && tol > 0.0, ErrorKind::invalid_parameter, "dt and tol must be positive");
  FlowEngine engine(state.spec);
  return {engine.step_midpoint(state.field, dt, tol), state.t + dt, state.spec};
}

FlowState step_splitting(const FlowState& state, double dt) {
  require(dt > 0.0, ErrorKind::invalid_parameter, "dt must be positive");
  FlowEngine engine(state.spec);
  return {engine.step_splitting(state.field, dt), state.t + dt, state.spec};
}

Conserved conserved_quantities(const FlowState& state) {
  FlowEngine engine(state.spec);
  return engine.conserved(state.field);
}

namespace {

SpectralField step_with_halving(FlowEngine& engine, const SpectralField& u, double dt, const FlowOptions& opt,
                                int depth, int& max_depth) {
  try {
    return engine.step(u, dt, opt.scheme, opt.tol);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::step_failure) throw;
    if (depth >= 5) fail(ErrorKind::integration_failure, "step failed after 5 dt halvings");
    max_depth = std::max(max_depth, depth + 1);
    SpectralField half = step_with_halving(engine, u, 0.5 * dt, opt, depth + 1, max_depth);
    return step_with_halving(engine, half, 0.5 * dt, opt, depth + 1, max_depth);
  }
}

}  // namespace

FlowResult flow_to(FlowEngine& engine, const FlowState& state, double t_final, double dt,
                   const FlowOptions& options) {
  require(dt > 0.0, ErrorKind::invalid_parameter, "dt must be positive");
  FlowResult result{state, {}, 0};
  const double span = t_final - state.t;
  const double dir = span >= 0.0 ? 1.0 : -1.0;
  const double total = std::abs(span);
  const auto full_steps = static_cast<long>(std::floor(total / dt * (1.0 + 1e-12)));
  const double remainder = total - static_cast<double>(full_steps) * dt;
  auto record = [&](double t, const SpectralField& u) {
    const auto c = engine.conserved(u);
    result.history.push_back({t, c.H, c.M});
  };
  if (options.record_history) record(state.t, state.field);
  SpectralField u = state.field;
  const int stride = std::max(1, options.history_stride);
  for (long n = 1; n <= full_steps; ++n) {
    u = step_with_halving(engine, u, dir * dt, options, 0, result.halvings);
    if (options.record_history && (n % stride == 0 || (n == full_steps && remainder <= 1e-14 * dt)))
      record(state.t + dir * dt * static_cast<double>(n), u);
  }
  if (remainder > 1e-14 * dt) {
    u = step_with_halving(engine, u, dir * remainder, options, 0, result.halvings);
    if (options.record_history) record(t_final, u);
  }
  result.state = {std::move(u), t_final, state.spec};
  return result;
}

FlowResult flow_to(const FlowState& state, double t_final, double dt, const FlowOptions& options) {
  FlowEngine engine(state.spec);
  return flow_to(engine, state, t_final, dt, options);
}

double jacobian_det_check(const FlowState& state, double dt) {
  const std::size_t n = state.field.size();
  const std::size_t d = 2 * n;
  require(d <= 64, ErrorKind::unsupported_size, "finite-difference Jacobian limited to 64 real dimensions");
  if (dt == 0.0) return 1.0;
  FlowEngine engine(state.spec);
  constexpr double eps = 1e-5;
  constexpr double solve_tol = 1e-14;
  Eigen::MatrixXd jac(d, d);
  for (std::size_t col = 0; col < d; ++col) {
    const Complex dir = (col % 2 == 0) ? Complex(eps, 0.0) : Complex(0.0, eps);
    SpectralField plus = state.field;
    SpectralField minus = state.field;
    plus.coeffs()[col / 2] += dir;
    minus.coeffs()[col / 2] -= dir;
    const SpectralField fp = engine.step_midpoint(plus, dt, solve_tol);
    const SpectralField fm = engine.step_midpoint(minus, dt, solve_tol);
    for (std::size_t row = 0; row < n; ++row) {
      const Complex diff = (fp.coeffs()[row] - fm.coeffs()[row]) / (2.0 * eps);
      jac(static_cast<Eigen::Index>(2 * row), static_cast<Eigen::Index>(col)) = diff.real();
      jac(static_cast<Eigen::Index>(2 * row + 1), static_cast<Eigen::Index>(col)) = diff.imag();
    }
  }
  return std::abs(jac.partialPivLu().determinant());
}

}  // namespace gibbs
