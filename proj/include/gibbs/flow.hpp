#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "gibbs/cutoff.hpp"
#include "gibbs/field.hpp"
#include "gibbs/potential.hpp"

namespace gibbs {

enum class JKind { multiply_i, d_dx, variable_coeff };

std::string_view to_string(JKind kind);
JKind j_kind_from_string(std::string_view name);

/// Everything that defines one truncated equation / Gibbs measure instance.
struct ProblemSpec {
  double L = 4.0;
  int n_cut = 8;
  ValueMode mode = ValueMode::complex;
  JKind J = JKind::multiply_i;
  Potential V = Potential::zero();
  CutoffFn chi = CutoffFn(1.0, 1.01);
  double kappa = 0.0;
  std::size_t grid_size = 128;

  int max_mode() const { return mode_cutoff(L, n_cut); }
  /// Smallest admissible grid: 4 N_cut L rounded up, at least 2K+1.
  static std::size_t default_grid_size(double L, int n_cut);
  void validate() const;
  SpectralField zero_field() const { return SpectralField(L, n_cut, mode); }
};

struct FlowState {
  SpectralField field;
  double t = 0.0;
  std::shared_ptr<const ProblemSpec> spec;
};

struct Conserved {
  double H;
  double M;
};

/// Fixed-point tolerance of the nonlinear substep inside step_splitting.
inline constexpr double kSplittingTol = 1e-13;

enum class Scheme { midpoint, splitting, euler };

std::string_view to_string(Scheme scheme);
Scheme scheme_from_string(std::string_view name);

/// Right-hand side of the truncated system as a map on coefficient vectors.
using Rhs = std::function<SpectralField(const SpectralField&)>;

/// Implicit midpoint u+ = u + dt F((u + u+)/2) solved by fixed-point iteration
/// until successive iterates differ by <= tol * max(1, |u|_inf).
/// Throws step_failure after `max_iter` iterations.
SpectralField midpoint_step(const SpectralField& u, double dt, double tol, const Rhs& rhs, int max_iter = 100);

/// Per-spec evaluator: owns the FFT grid and the tabulated cutoff so repeated
/// steps do not rebuild plans. One instance per thread.
class FlowEngine {
 public:
  explicit FlowEngine(std::shared_ptr<const ProblemSpec> spec);

  const ProblemSpec& spec() const { return *spec_; }
  const std::shared_ptr<const ProblemSpec>& spec_ptr() const { return spec_; }
  SpectralGrid& grid() { return grid_; }
  const std::vector<double>& chi_on_grid() const { return chi_; }

  /// Pi_N(-Laplacian u + chi V'(|u|^2) u).
  SpectralField grad_H(const SpectralField& u);
  /// Pi_N(chi V'(|u|^2) u) alone.
  SpectralField grad_nonlinear(const SpectralField& u);
  SpectralField apply_J(const SpectralField& f) const;
  SpectralField rhs(const SpectralField& u) { return apply_J(grad_H(u)); }

  SpectralField step_midpoint(const SpectralField& u, double dt, double tol);
  SpectralField step_splitting(const SpectralField& u, double dt);
  SpectralField step_euler(const SpectralField& u, double dt);
  SpectralField step(const SpectralField& u, double dt, Scheme scheme, double tol);

  Conserved conserved(const SpectralField& u);
  /// Trapezoidal quadrature of chi V(|u|^2) over one period on the spec grid.
  double potential_integral(const SpectralField& u);
  /// Grid values of u on the spec grid.
  const std::vector<Complex>& values(const SpectralField& u);

 private:
  void linear_half_step(SpectralField& u, double dt) const;

  std::shared_ptr<const ProblemSpec> spec_;
  SpectralGrid grid_;
  std::vector<double> chi_;
  std::vector<Complex> values_;
  std::vector<Complex> work_;
};

/// Engine cached per thread for `spec`; rebuilt when a different spec is passed.
FlowEngine& thread_engine(const std::shared_ptr<const ProblemSpec>& spec);

SpectralField grad_H(const FlowState& state);
SpectralField apply_J(const SpectralField& f, const ProblemSpec& spec);
FlowState step_midpoint(const FlowState& state, double dt, double tol);
FlowState step_splitting(const FlowState& state, double dt);
Conserved conserved_quantities(const FlowState& state);

struct DriftRecord {
  double t;
  double H;
  double M;
};

struct FlowResult {
  FlowState state;
  std::vector<DriftRecord> history;
  int halvings = 0;
};

struct FlowOptions {
  Scheme scheme = Scheme::midpoint;
  double tol = 1e-12;
  bool record_history = true;
  /// Record every `history_stride` steps (the final state is always recorded).
  int history_stride = 1;
};

/// Steps from state.t to t_final (either direction) with a final partial step.
/// A failing step is retried with dt halved, at most 5 times.
FlowResult flow_to(const FlowState& state, double t_final, double dt, const FlowOptions& options = {});
FlowResult flow_to(FlowEngine& engine, const FlowState& state, double t_final, double dt,
                   const FlowOptions& options = {});

/// |det| of the Jacobian of one midpoint step by central finite differences in
/// the real coordinates (Re c_k, Im c_k). Real dimension must be <= 64.
double jacobian_det_check(const FlowState& state, double dt);

}  // namespace gibbs
