#include <doctest.h>

#include <cmath>

#include "gibbs/flow.hpp"

using namespace gibbs;

namespace {

std::shared_ptr<ProblemSpec> make_spec(double L, int n_cut, Potential V, double R, std::size_t M,
                                       ValueMode mode = ValueMode::complex, JKind J = JKind::multiply_i) {
  auto s = std::make_shared<ProblemSpec>();
  s->L = L;
  s->n_cut = n_cut;
  s->V = std::move(V);
  s->chi = CutoffFn(R, R + 0.5);
  s->grid_size = M;
  s->mode = mode;
  s->J = J;
  s->validate();
  return s;
}

double real_inner(const SpectralField& a, const SpectralField& b) {
  double s = 0.0;
  for (int k = -a.max_mode(); k <= a.max_mode(); ++k) s += (std::conj(a[k]) * b[k]).real();
  return s;
}

SpectralField scaled_sample(double L, int n_cut, ValueMode mode, std::uint64_t seed, double scale) {
  auto f = sample_xi_Lf(L, n_cut, mode, seed);
  f *= Complex(scale);
  return f;
}

}  // namespace

TEST_CASE("grad_H matches the triple convolution when chi is identically one") {
  // L = 1, N_cut = 4 gives nine modes; chi = 1 on the whole period.
  auto spec = make_spec(1.0, 4, Potential::power(2, 0.5), 10.0, 32);
  const auto u = sample_xi_Lf(1.0, 4, ValueMode::complex, 9);
  const auto g = grad_H(FlowState{u, 0.0, spec});
  const int K = 4;
  for (int k = -K; k <= K; ++k) {
    Complex conv{};
    for (int a = -K; a <= K; ++a)
      for (int b = -K; b <= K; ++b) {
        const int c = k - a + b;
        if (std::abs(c) <= K) conv += u[a] * std::conj(u[b]) * u[c];
      }
    // V'(m) = m, and the Fourier coefficient of |u|^2 u is the convolution.
    const Complex expected = Complex(double(k * k)) * u[k] + conv;
    CHECK(std::abs(g[k] - expected) < 1e-10);
  }
}

TEST_CASE("grad_H matches a direct quadrature with a genuine cutoff") {
  auto spec = make_spec(2.0, 3, Potential::power(3, 0.25), 1.5, 64);
  const auto u = sample_xi_Lf(2.0, 3, ValueMode::complex, 4);
  const auto g = grad_H(FlowState{u, 0.0, spec});
  const int K = u.max_mode();
  const std::size_t M = 64;
  const double L = 2.0;
  std::vector<Complex> nl(M);
  std::vector<double> x(M);
  for (std::size_t j = 0; j < M; ++j) {
    x[j] = -kPi * L + 2 * kPi * L * j / M;
    Complex v{};
    for (int k = -K; k <= K; ++k) v += u[k] * std::polar(1.0, k * x[j] / L);
    const double m = std::norm(v);
    nl[j] = spec->chi(x[j]) * 0.75 * m * m * v;
  }
  for (int k = -K; k <= K; ++k) {
    Complex d{};
    for (std::size_t j = 0; j < M; ++j) d += nl[j] * std::polar(1.0, -k * x[j] / L);
    d /= double(M);
    CHECK(std::abs(g[k] - (Complex((k / L) * (k / L)) * u[k] + d)) < 1e-12);
  }
}

TEST_CASE("J is skew-adjoint") {
  auto c = make_spec(4.0, 2, Potential::zero(), 1.0, 64);
  auto r = make_spec(4.0, 2, Potential::zero(), 1.0, 64, ValueMode::real, JKind::d_dx);
  for (std::uint64_t s = 0; s < 20; ++s) {
    for (const auto& spec : {c, r}) {
      const auto f = sample_xi_Lf(4.0, 2, spec->mode, 2 * s);
      const auto g = sample_xi_Lf(4.0, 2, spec->mode, 2 * s + 1);
      CHECK(std::abs(real_inner(f, apply_J(g, *spec)) + real_inner(apply_J(f, *spec), g)) < 1e-14);
    }
  }
  auto vc = make_spec(4.0, 2, Potential::zero(), 1.0, 64, ValueMode::complex, JKind::variable_coeff);
  CHECK_THROWS_AS(apply_J(vc->zero_field(), *vc), Error);
}

TEST_CASE("midpoint on the linear flow is the Cayley rotation") {
  auto spec = make_spec(4.0, 8, Potential::zero(), 1.0, 128);
  const auto u = sample_xi_Lf(4.0, 8, ValueMode::complex, 1);
  const double dt = 0.01;
  const auto v = step_midpoint(FlowState{u, 0.0, spec}, dt, 1e-14).field;
  for (int k = -u.max_mode(); k <= u.max_mode(); ++k) {
    const double th = (k / 4.0) * (k / 4.0) * dt;
    const Complex cayley = Complex(1.0, th / 2) / Complex(1.0, -th / 2);
    CHECK(std::abs(v[k] - cayley * u[k]) < 1e-13);
  }
  // Against the exact solution at t = 1 the error is second order.
  double err[2];
  for (int i = 0; i < 2; ++i) {
    const double h = 0.002 / (1 << i);
    const auto w = flow_to(FlowState{u, 0.0, spec}, 1.0, h, {Scheme::midpoint, 1e-14, false, 1}).state.field;
    err[i] = 0.0;
    for (int k = -u.max_mode(); k <= u.max_mode(); ++k)
      err[i] = std::max(err[i], std::abs(w[k] - std::polar(1.0, (k / 4.0) * (k / 4.0)) * u[k]));
  }
  CHECK(std::log2(err[0] / err[1]) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("splitting is exact on the linear flow") {
  auto spec = make_spec(4.0, 8, Potential::zero(), 1.0, 128);
  const auto u = sample_xi_Lf(4.0, 8, ValueMode::complex, 2);
  const auto v = flow_to(FlowState{u, 0.0, spec}, 0.7, 0.05, {Scheme::splitting, 1e-12, false, 1}).state.field;
  for (int k = -u.max_mode(); k <= u.max_mode(); ++k)
    CHECK(std::abs(v[k] - std::polar(1.0, (k / 4.0) * (k / 4.0) * 0.7) * u[k]) < 1e-12);
}

TEST_CASE("forward Euler inflates the mass") {
  auto spec = make_spec(4.0, 8, Potential::zero(), 1.0, 128);
  const auto u = sample_xi_Lf(4.0, 8, ValueMode::complex, 3);
  const auto r = flow_to(FlowState{u, 0.0, spec}, 1.0, 0.01, {Scheme::euler, 0, true, 1});
  CHECK(r.history.back().M > r.history.front().M * 1.01);
}

TEST_CASE("nonlinear midpoint flow conserves mass and energy, and is reversible") {
  auto spec = make_spec(4.0, 8, Potential::power(2, 0.5), 2.0, 128);
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto u = sample_xi_Lf(4.0, 8, ValueMode::complex, 100 + seed);
    const FlowState s0{u, 0.0, spec};
    const auto fwd = flow_to(s0, 1.0, 1e-3, {Scheme::midpoint, 1e-13, true, 100});
    const auto c0 = conserved_quantities(s0);
    for (const auto& rec : fwd.history) {
      CHECK(std::abs(rec.M - c0.M) <= 1e-10 * std::max(1.0, std::abs(c0.M)));
      CHECK(std::abs(rec.H - c0.H) <= 1e-6 * std::max(1.0, std::abs(c0.H)));
    }
    const auto back = flow_to(fwd.state, 0.0, 1e-3, {Scheme::midpoint, 1e-13, false, 1});
    CHECK(max_abs_diff(back.state.field, u) < 1e-9);
    CHECK(std::abs(back.state.t) < 1e-14);
  }
}

TEST_CASE("Strang splitting converges at second order") {
  auto spec = make_spec(2.0, 4, Potential::power(2, 0.5), 1.0, 64);
  const auto u = scaled_sample(2.0, 4, ValueMode::complex, 5, 1.5);
  const FlowState s0{u, 0.0, spec};
  const auto ref = flow_to(s0, 0.5, 1e-4, {Scheme::midpoint, 1e-14, false, 1}).state.field;
  std::vector<double> err;
  for (double dt : {0.02, 0.01, 0.005})
    err.push_back(max_abs_diff(flow_to(s0, 0.5, dt, {Scheme::splitting, 0, false, 1}).state.field, ref));
  const double slope = std::log2(err[1] / err[2]);
  MESSAGE("splitting errors " << err[0] << " " << err[1] << " " << err[2]);
  CHECK(slope == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("real mode with J = d/dx stays real and conserves energy") {
  auto spec = make_spec(2.0, 4, Potential::power(2, 0.5), 1.0, 64, ValueMode::real, JKind::d_dx);
  const auto u = sample_xi_Lf(2.0, 4, ValueMode::real, 8);
  const FlowState s0{u, 0.0, spec};
  const auto r = flow_to(s0, 0.5, 2.5e-4, {Scheme::midpoint, 1e-13, true, 200});
  CHECK(r.state.field.is_hermitian(1e-12));
  const auto c0 = conserved_quantities(s0);
  for (const auto& rec : r.history) CHECK(std::abs(rec.H - c0.H) <= 1e-6 * std::max(1.0, std::abs(c0.H)));
  CHECK_THROWS_AS(step_splitting(s0, 0.01), Error);
}

TEST_CASE("the midpoint map preserves volume") {
  auto spec = make_spec(2.0, 4, Potential::power(2, 0.5), 1.0, 64);
  const auto u = sample_xi_Lf(2.0, 4, ValueMode::complex, 12);
  const FlowState s0{u, 0.0, spec};
  CHECK(jacobian_det_check(s0, 0.0) == 1.0);
  CHECK(std::abs(jacobian_det_check(s0, 0.05) - 1.0) < 1e-6);
  auto big = make_spec(4.0, 8, Potential::zero(), 1.0, 128);
  CHECK_THROWS_AS(jacobian_det_check(FlowState{big->zero_field(), 0.0, big}, 0.1), Error);
}

TEST_CASE("problem validation") {
  auto s = std::make_shared<ProblemSpec>();
  s->mode = ValueMode::complex;
  s->J = JKind::d_dx;
  CHECK_THROWS_AS(s->validate(), Error);
  s->J = JKind::multiply_i;
  s->grid_size = 16;
  CHECK_THROWS_AS(s->validate(), Error);
  CHECK(ProblemSpec::default_grid_size(4.0, 8) == 128);
}
