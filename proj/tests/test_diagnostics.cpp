#include <doctest.h>

#include <cmath>

#include "gibbs/diagnostics.hpp"

using namespace gibbs;

namespace {

std::shared_ptr<ProblemSpec> small_spec(Potential V, ValueMode mode = ValueMode::complex) {
  auto s = std::make_shared<ProblemSpec>();
  s->L = 2.0;
  s->n_cut = 4;
  s->V = std::move(V);
  s->mode = mode;
  s->J = mode == ValueMode::real ? JKind::d_dx : JKind::multiply_i;
  s->chi = build_chi(1.0, 1.5);
  s->grid_size = 64;
  s->validate();
  return s;
}

// Oracle for the rate integrand at x = 0: composite midpoint rule with many
// nodes per lattice cell over |k| <= K.
double rate_oracle_x0(double L, double s, double K) {
  const double e = 0.5 * (1.0 - s);
  auto m = [&](double k) { return std::pow(1.0 + k * k, -e); };
  const int per_cell = 64;
  double sum = 0.0;
  const long cells = static_cast<long>(K * L);
  for (long n = -cells + 1; n <= cells; ++n) {
    const double q = double(n) / L, a = double(n - 1) / L, h = 1.0 / L / per_cell;
    for (int i = 0; i < per_cell; ++i) {
      const double d = m(a + (i + 0.5) * h) - m(q);
      sum += d * d * h;
    }
  }
  return std::sqrt(sum / (2 * kPi));
}

}  // namespace

TEST_CASE("H_phi norm") {
  SpectralField f(2.0, 4, ValueMode::complex);
  WeightSpec w;
  CHECK(norm_Hphi(f, w) == 0.0);
  const auto u = sample_xi_Lf(2.0, 4, ValueMode::complex, 1);
  WeightSpec flat;
  flat.phi_power = 0.0;
  flat.bracket_factor = false;
  CHECK(norm_Hphi(u, flat) == doctest::Approx(std::sqrt(u.l2_norm_sq())).epsilon(1e-10));
  SpectralField single(2.0, 4, ValueMode::complex);
  single[7] = 1.0;
  double prev = 1e300;
  for (double kappa : {0.0, 0.5, 1.0, 2.0}) {
    w.kappa = kappa;
    const double v = norm_Hphi(single, w);
    CHECK(v < prev);
    prev = v;
  }
  w.kappa = 0.5;
  SpectralField scaled = u;
  scaled *= Complex(-2.5, 1.0);
  CHECK(norm_Hphi(scaled, w) == doctest::Approx(std::abs(Complex(-2.5, 1.0)) * norm_Hphi(u, w)).epsilon(1e-10));
  // Grid version agrees on the periodic quadrature grid.
  const auto g = evaluate_grid(u, 64);
  CHECK(norm_Hphi(g, w) == doctest::Approx(norm_Hphi(u, w)).epsilon(1e-3));
  WeightSpec w0;
  CHECK(norm_Hphi(evaluate_grid(u, 128), w0) == doctest::Approx(norm_Hphi(u, w0)).epsilon(1e-12));
}

TEST_CASE("fractional Sobolev norm") {
  WeightSpec w;
  w.s = 0.3;
  SpectralField c(2.0, 4, ValueMode::complex);
  c[0] = 0.7;
  const auto fc = frac_sobolev_weighted(c, w);
  // int phi1^2 over the period by a fine midpoint rule.
  double phi_l2 = 0.0;
  const int m = 200000;
  for (int i = 0; i < m; ++i) {
    const double x = -2 * kPi + (i + 0.5) * 4 * kPi / m;
    phi_l2 += std::pow(w.phi1(x), 2) * 4 * kPi / m;
  }
  CHECK(fc.value == doctest::Approx(0.7 * std::sqrt(phi_l2)).epsilon(1e-6));
  CHECK(std::abs(fc.gagliardo) < 1e-12);

  SpectralField single(2.0, 4, ValueMode::complex);
  single[3] = 1.0;
  const auto fs = frac_sobolev_weighted(single, w);
  CHECK(fs.value == doctest::Approx(std::pow(1 + 2.25, 0.15) * std::sqrt(phi_l2)).epsilon(1e-6));
  // Seminorm of e^{ikx/L}: C_s |k/L|^{2s} 2 pi L with C_s = 2 Gamma(1-2s) cos(pi s)/s.
  const double cs = 2 * std::tgamma(1 - 0.6) * std::cos(kPi * 0.3) / 0.3;
  CHECK(fs.spectral_seminorm == doctest::Approx(cs * std::pow(1.5, 0.6) * 4 * kPi).epsilon(1e-12));
  CHECK(fs.relative_gap < 1e-2);

  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto u = sample_xi_Lf(4.0, 8, ValueMode::complex, seed);
    const auto r = frac_sobolev_weighted(u, w);
    CHECK(r.relative_gap < 1e-2);
    CHECK_FALSE(r.warning);
  }
  w.s = 0.6;
  CHECK_THROWS_AS(frac_sobolev_weighted(single, w), Error);
}

TEST_CASE("Proposition rate quadrature") {
  const std::vector<double> Ls{4, 8, 16, 32, 64};
  const auto r0 = prop1_rate(0.0, 0.25, Ls);
  CHECK(r0.slope >= -1.15);
  CHECK(r0.slope <= -0.85);
  CHECK(r0.values[0] == doctest::Approx(rate_oracle_x0(4.0, 0.25, 512.0)).epsilon(1e-6));
  CHECK(r0.values[2] == doctest::Approx(rate_oracle_x0(16.0, 0.25, 512.0)).epsilon(1e-6));
  double C = 0.0;
  std::vector<double> ratios;
  for (double x : {0.0, 1.0, 2.0, 4.0}) {
    const auto r = prop1_rate(x, 0.25, Ls);
    MESSAGE("x=" << x << " slope " << r.slope);
    CHECK(r.slope >= -1.15);
    CHECK(r.slope <= -0.85);
    for (std::size_t i = 0; i < Ls.size(); ++i) {
      CHECK(r.values[i] > 0.0);
      C = std::max(C, r.values[i] * Ls[i] / bracket(x));
    }
  }
  for (double x : {0.0, 1.0, 2.0, 4.0}) {
    const auto r = prop1_rate(x, 0.25, Ls);
    for (std::size_t i = 0; i < Ls.size(); ++i) CHECK(r.values[i] <= C * bracket(x) / Ls[i] * (1 + 1e-12));
  }
  const auto a = prop1_rate(1.0, 0.25, Ls);
  const auto b = prop1_rate(1.0, 0.25, Ls);
  for (std::size_t i = 0; i < Ls.size(); ++i) CHECK(a.values[i] == b.values[i]);
  CHECK_THROWS_AS(prop1_rate(1.0, 0.3, Ls, RateForm::literal), Error);
  CHECK_NOTHROW(prop1_rate(1.0, 0.2, Ls, RateForm::literal));
  CHECK_THROWS_AS(prop1_rate(0.0, 0.25, {4.0}), Error);
}

TEST_CASE("invariance test") {
  auto nls = small_spec(Potential::power(2, 0.5));
  const auto trivial = invariance_test(nls, 100, 0.0, 1e-2, 1);
  CHECK(trivial.passed);
  for (const auto& o : trivial.observables) {
    CHECK(o.ks == 0.0);
    CHECK(o.energy == 0.0);
  }
  auto free = small_spec(Potential::zero());
  const auto lin = invariance_test(free, 300, 1.0, 1e-2, 2, {"abs_u_sq", "mass"});
  CHECK(lin.passed);
  const auto mid = invariance_test(nls, 300, 1.0, 1e-2, 3);
  CHECK(mid.passed);
  CHECK(mid.max_energy_drift < 1e-3);
  InvarianceOptions euler;
  euler.scheme = Scheme::euler;
  const auto bad = invariance_test(nls, 300, 1.0, 5e-2, 3, kDefaultObservables, euler);
  CHECK_FALSE(bad.passed);
  CHECK_THROWS_AS(invariance_test(small_spec(Potential::zero(), ValueMode::real), 10, 0.1, 0.01, 1), Error);
  CHECK_THROWS_AS(invariance_test(nls, 10, 0.1, 0.01, 1, {"bogus"}), Error);
}

TEST_CASE("moment uniformity") {
  MomentOptions opt;
  opt.n_cut = 2;
  opt.V = Potential::zero();
  opt.R = 0.5;
  WeightSpec w;
  const auto t = moment_uniformity({2.0, 4.0}, {2.0, 4.0}, w, 400, 1, opt);
  REQUIRE(t.rows.size() == 4);
  for (const auto& row : t.rows) CHECK(std::isfinite(row.moment.value));
  // Lyapunov on shared samples: (E X^4)^{1/4} >= (E X^2)^{1/2}.
  CHECK(std::pow(t.rows[1].moment.value, 0.25) >= std::sqrt(t.rows[0].moment.value));
  CHECK_THROWS_AS(moment_uniformity({2.0}, {1.0}, w, 10, 1, opt), Error);
}

TEST_CASE("increment moments") {
  const std::vector<std::pair<double, double>> pairs{{0.0, 0.5}, {-1.0, 1.0}, {0.2, 0.25}};
  const auto free = increment_moments(1.0, 2.0, 0.25, pairs, 40000, 1, Potential::zero(), ValueMode::real);
  for (const auto& row : free.rows) {
    const double exact = 1 - std::exp(-std::abs(row.x - row.y));
    CHECK(std::abs(row.moment.value - exact) < 3 * row.moment.se);
  }
  const auto killed = increment_moments(1.0, 2.0, 0.25, pairs, 40000, 1, Potential::power(1, 1.0), ValueMode::real);
  for (std::size_t i = 0; i < pairs.size(); ++i)
    CHECK(killed.rows[i].normalized.value <= free.rows[i].normalized.value * std::pow(4.0, 1.0 / 6.0));
  CHECK_THROWS_AS(increment_moments(1.0, 2.0, 0.25, {{0.3, 0.3}}, 10, 1, Potential::zero(), ValueMode::real), Error);
  CHECK_THROWS_AS(increment_moments(1.0, 2.0, 0.25, {{0.3, 1.3}}, 10, 1, Potential::zero(), ValueMode::real), Error);
}

TEST_CASE("Holder exponent") {
  GridField smooth;
  for (int j = 0; j < 1024; ++j) {
    smooth.points.push_back(j * 0.01);
    smooth.values.push_back(std::sin(j * 0.01));
  }
  CHECK(holder_exponent({smooth}, 6).median == doctest::Approx(1.0).epsilon(0.05));
  std::vector<GridField> noise(20), ou;
  auto rng = make_engine(1, 0);
  std::normal_distribution<double> nd;
  for (auto& g : noise)
    for (int j = 0; j < 1024; ++j) {
      g.points.push_back(j * 0.01);
      g.values.push_back(nd(rng));
    }
  CHECK(std::abs(holder_exponent(noise, 6).median) < 0.1);
  std::vector<double> pts(4097);
  for (std::size_t j = 0; j < pts.size(); ++j) pts[j] = j / 256.0;
  for (int i = 0; i < 50; ++i) ou.push_back(sample_ou(pts, ValueMode::real, rng));
  const auto h = holder_exponent(ou, 8);
  MESSAGE("OU Holder median " << h.median << " [" << h.ci_low << ", " << h.ci_high << "]");
  CHECK(h.median >= 0.40);
  CHECK(h.median <= 0.55);
  CHECK(h.ci_low <= h.median);
  CHECK(h.ci_high >= h.median);
  CHECK_THROWS_AS(holder_exponent(ou, 2), Error);
  CHECK_THROWS_AS(holder_exponent({smooth}, 12), Error);
}

TEST_CASE("convergence ladder") {
  LadderOptions opt;
  opt.V = Potential::zero();
  opt.n_cut = 2;
  opt.n_hi = 4;
  opt.R = 0.5;
  const auto rows = convergence_ladder({2.0}, 200, 1, default_ladder_observables(), opt);
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) {
    CHECK(r.II.value == 0.0);
    CHECK(std::isfinite(r.III.value));
    CHECK(std::isfinite(r.IV.value));
    CHECK(r.Z3.value == 1.0);
  }
}

TEST_CASE("trajectory norms") {
  const auto u = sample_xi_Lf(2.0, 4, ValueMode::complex, 3);
  std::vector<double> t;
  std::vector<SpectralField> snaps;
  for (int i = 0; i <= 100; ++i) {
    t.push_back(0.01 * i);
    snaps.push_back(u);
  }
  WeightSpec w;
  const auto n = trajectory_norms(t, snaps, w, 1.0, 3.0);
  // Static field: S_s^2 = ||phi D^s u||^2 int_0^1 <t>^{-2} dt = ||.||^2 atan(1), up to the trapezoid.
  WeightSpec as_phi = w;
  as_phi.phi1_power = w.phi_power;
  const double spatial = frac_sobolev_weighted(u, as_phi, false).value;
  CHECK(n.S_s == doctest::Approx(spatial * std::sqrt(std::atan(1.0))).epsilon(1e-4));
  CHECK(n.S == doctest::Approx(norm_Hphi(u, w)).epsilon(1e-12));
}
