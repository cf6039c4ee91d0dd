#include <doctest.h>

#include <cmath>

#include "gibbs/variable_coeff.hpp"

using namespace gibbs;

namespace {

std::shared_ptr<ProblemSpec> base_spec(double L, int n_cut, Potential V, double R, std::size_t M) {
  auto s = std::make_shared<ProblemSpec>();
  s->L = L;
  s->n_cut = n_cut;
  s->V = std::move(V);
  s->chi = CutoffFn(R, R + 0.5);
  s->grid_size = M;
  s->J = JKind::variable_coeff;
  s->validate();
  return s;
}

// Smooth, well-localized initial datum projected onto the modes.
SpectralField smooth_datum(const ProblemSpec& spec) {
  SpectralGrid grid(spec.L, spec.max_mode(), spec.grid_size);
  std::vector<Complex> values(grid.size());
  for (std::size_t j = 0; j < values.size(); ++j) {
    const double y = grid.point(j);
    values[j] = 0.5 * std::exp(-0.5 * y * y) * Complex(1.0, 0.3 * y);
  }
  auto f = spec.zero_field();
  grid.to_coeffs(values, f.coeffs());
  return f;
}

double real_inner(const SpectralField& a, const SpectralField& b) {
  double s = 0.0;
  for (int k = -a.max_mode(); k <= a.max_mode(); ++k) s += (std::conj(a[k]) * b[k]).real();
  return s;
}

}  // namespace

TEST_CASE("Phi for a = <x>^-2 matches its closed form and inverts") {
  auto spec = base_spec(4.0, 8, Potential::zero(), 30.0, 128);
  TransformedProblem p(Coefficient::bracket_power(), spec);
  for (double x = -10.0; x <= 10.0; x += 0.37) {
    // 1/(1 + 1/(1+x^2)) = 1 - 1/(2+x^2)
    const double closed = x - std::atan(x / std::sqrt(2.0)) / std::sqrt(2.0);
    CHECK(std::abs(p.Phi(x) - closed) < 1e-9);
    CHECK(std::abs(p.Phi_inv(p.Phi(x)) - x) < 1e-8);
  }
  CHECK(p.Phi(0.0) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("a = 0 reduces to the constant-coefficient flow") {
  auto spec = base_spec(2.0, 4, Potential::power(2, 0.5), 1.0, 64);
  TransformedProblem p({[](double) { return 0.0; }, 1.0, 2.0}, spec);
  CHECK(std::abs(p.Phi(1.7) - 1.7) < 1e-14);
  const auto u = sample_xi_Lf(2.0, 4, ValueMode::complex, 3);
  const auto g1 = p.grad_H(u);
  const auto g2 = grad_H(FlowState{u, 0.0, spec});
  const auto j1 = p.apply_J(g1);
  for (int k = -u.max_mode(); k <= u.max_mode(); ++k) {
    CHECK(std::abs(g1[k] - g2[k]) < 1e-12);
    // J = -i/w with w = 1 against the constant-coefficient J = i.
    CHECK(std::abs(j1[k] + Complex(0.0, 1.0) * g1[k]) < 1e-12);
  }
}

TEST_CASE("J_w is skew in the real inner product") {
  auto spec = base_spec(4.0, 8, Potential::power(2, 0.5), 2.0, 128);
  TransformedProblem p(Coefficient::bracket_power(), spec);
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto f = sample_xi_Lf(4.0, 8, ValueMode::complex, seed);
    const auto g = sample_xi_Lf(4.0, 8, ValueMode::complex, seed + 100);
    const double lhs = real_inner(f, p.apply_J(g));
    const double rhs = -real_inner(p.apply_J(f), g);
    CHECK(std::abs(lhs - rhs) < 1e-12);
    CHECK(std::abs(real_inner(f, p.apply_J(f))) < 1e-12);
  }
}

TEST_CASE("invalid coefficients are rejected") {
  auto spec = base_spec(2.0, 4, Potential::zero(), 1.0, 64);
  auto attempt = [&](Coefficient c) {
    try {
      TransformedProblem p(std::move(c), spec);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::internal;
  };
  CHECK(attempt({[](double x) { return -2.0 * std::pow(bracket(x), -2); }, 2.0, 2.0}) ==
        ErrorKind::invalid_coefficient);
  CHECK(attempt({[](double x) { return std::pow(bracket(x), -0.5); }, 1.0, 2.0}) == ErrorKind::invalid_coefficient);
  CHECK(attempt({[](double) { return 0.0; }, 1.0, 1.0}) == ErrorKind::invalid_parameter);
  auto real = std::make_shared<ProblemSpec>(*spec);
  real->mode = ValueMode::real;
  CHECK_THROWS_AS(TransformedProblem(Coefficient::bracket_power(), real), Error);
}

TEST_CASE("transformed flow conserves its energy") {
  auto spec = base_spec(4.0, 8, Potential::power(2, 0.5), 30.0, 128);
  TransformedProblem p(Coefficient::bracket_power(), spec);
  const auto v0 = smooth_datum(*spec);
  const double e0 = p.energy(v0);
  // Midpoint is exact only for quadratic invariants; the drift here is O(dt^2).
  const double d1 = std::abs(p.energy(p.flow(v0, 0.5, 1e-2, 1e-13)) - e0);
  const double d2 = std::abs(p.energy(p.flow(v0, 0.5, 5e-3, 1e-13)) - e0);
  CHECK(d2 < 2e-8 * std::max(1.0, std::abs(e0)));
  CHECK(d1 / d2 == doctest::Approx(4.0).epsilon(0.25));
}

TEST_CASE("back-transformed solution satisfies the weak form") {
  auto spec = base_spec(4.0, 8, Potential::power(2, 0.5), 30.0, 128);
  TransformedProblem p(Coefficient::bracket_power(), spec);
  const auto v0 = smooth_datum(*spec);
  std::vector<TestFunction> tests;
  for (double c = -2.0; c <= 2.0; c += 1.0) tests.push_back({c, 0.7});
  const auto r = weak_form_residual(p, v0, 0.5, 1e-3, 1e-13, tests);
  MESSAGE("max relative weak residual " << r.max_relative);
  CHECK(r.max_relative <= 1e-3);

}
