#include <doctest.h>

#include <cmath>

#include "gibbs/gibbs.hpp"

using namespace gibbs;

namespace {

std::shared_ptr<ProblemSpec> spec_for(double L, int n_cut, Potential V, double R, double R_prime,
                                      std::size_t M = 0) {
  auto s = std::make_shared<ProblemSpec>();
  s->L = L;
  s->n_cut = n_cut;
  s->V = std::move(V);
  s->chi = build_chi(R, R_prime);
  s->grid_size = M ? M : ProblemSpec::default_grid_size(L, n_cut);
  s->validate();
  return s;
}

// One-mode toy: L = 1/2, N_cut = 1 keeps only k = 0, so u = c_0 is a complex
// Gaussian with E|c_0|^2 = 1/pi and the weight is exp(-I V(|c_0|^2)) with I
// the trapezoid of chi on the grid.
struct Toy {
  std::shared_ptr<ProblemSpec> spec = spec_for(0.5, 1, Potential::power(2, 5.0), 0.5, 1.0, 64);
  double sigma2 = 1.0 / kPi;
  double I = 0.0;
  Toy() {
    const double h = kPi / 64.0;
    for (int j = 0; j < 64; ++j) I += spec->chi(-kPi / 2 + h * j);
    I *= h;
  }
  double weight(double r2) const { return std::exp(-I * 5.0 * r2 * r2); }
  // Integral of weight * Gaussian density over r in [a, b], all angles,
  // by composite Simpson in r.
  double radial_mass(double a, double b) const {
    const int m = 2000;
    const double h = (b - a) / m;
    double s = 0.0;
    for (int i = 0; i <= m; ++i) {
      const double r = a + h * i;
      const double f = weight(r * r) * std::exp(-r * r / sigma2) * 2.0 * r / sigma2;
      s += f * (i == 0 || i == m ? 1 : (i % 2 ? 4 : 2));
    }
    return s * h / 3.0;
  }
};

}  // namespace

TEST_CASE("cutoff function") {
  const auto chi = build_chi(1.0, 1.5);
  CHECK(chi(0.0) == 1.0);
  CHECK(chi(1.0) == 1.0);
  CHECK(chi(-1.0) == 1.0);
  CHECK(chi(1.5) == 0.0);
  CHECK(chi(-1.5) == 0.0);
  CHECK(chi(3.0) == 0.0);
  double excess = 0.0;
  const int m = 200000;
  const double h = 4.0 / m;
  for (int i = 0; i < m; ++i) {
    const double x = -2.0 + (i + 0.5) * h;
    const double v = chi(x);
    CHECK_MESSAGE((v >= 0.0 && v <= 1.0), "x=" << x);
    excess += (v - (std::abs(x) <= 1.0 ? 1.0 : 0.0)) * h;
  }
  CHECK(excess >= 0.0);
  CHECK(excess <= 2 * 0.5);
  CHECK(excess == doctest::Approx(0.5).epsilon(1e-6));  // exact for the symmetric profile
  // Smoothness across x = R: finite differences of order 1..3 stay bounded as h shrinks.
  for (double step : {1e-2, 5e-3, 2.5e-3}) {
    const double d1 = (chi(1.0 + step) - chi(1.0 - step)) / (2 * step);
    const double d2 = (chi(1.0 + step) - 2 * chi(1.0) + chi(1.0 - step)) / (step * step);
    const double d3 = (chi(1.0 + 2 * step) - 2 * chi(1.0 + step) + 2 * chi(1.0 - step) - chi(1.0 - 2 * step)) /
                      (2 * step * step * step);
    CHECK(std::abs(d1) < 1e-6);
    CHECK(std::abs(d2) < 1e-3);
    CHECK(std::abs(d3) < 1.0);
  }
  CHECK_THROWS_AS(build_chi(1.0, 1.0), Error);
  CHECK_THROWS_AS(build_chi(2.0, 1.0), Error);
}

TEST_CASE("potential energy") {
  auto spec = spec_for(2.0, 4, Potential::power(1, 1.0), 100.0, 101.0);
  CHECK(potential_energy(spec->zero_field(), spec) == 0.0);
  auto u = spec->zero_field();
  u[3] = 1.0;
  CHECK(potential_energy(u, spec) == doctest::Approx(2 * kPi * 2.0).epsilon(1e-12));
  auto quartic = spec_for(2.0, 4, Potential::power(2, 0.5), 1.0, 2.0, 256);
  auto fine = spec_for(2.0, 4, Potential::power(2, 0.5), 1.0, 2.0, 512);
  auto smooth = quartic->zero_field();
  smooth[0] = 0.4;
  smooth[1] = Complex(0.2, -0.1);
  smooth[-2] = 0.1;
  const double a = potential_energy(smooth, quartic);
  const double b = potential_energy(smooth, fine);
  CHECK(std::abs(a - b) <= 1e-6 * b);
  CHECK(a > 0.0);
}

TEST_CASE("importance ensemble") {
  auto free = spec_for(4.0, 2, Potential::zero(), 1.0, 1.1);
  const auto e0 = importance_ensemble(50, free, 1);
  for (double w : *e0.weights) CHECK(w == 1.0);
  CHECK(e0.Z.value == 1.0);
  CHECK(e0.Z.se == 0.0);

  auto nls = spec_for(4.0, 2, Potential::power(2, 0.5), 1.0, 1.1);
  const auto e = importance_ensemble(500, nls, 2);
  for (double w : *e.weights) CHECK((w > 0.0 && w <= 1.0));
  CHECK(e.ess <= 500.0);

  Toy toy;
  const auto t = importance_ensemble(100000, toy.spec, 3);
  const double exact = toy.radial_mass(0.0, 6.0);
  CHECK(std::abs(t.Z.value - exact) < 3 * t.Z.se);
}

TEST_CASE("pCN sampler") {
  auto free = spec_for(4.0, 2, Potential::zero(), 1.0, 1.1);
  CHECK(pcn_sample(200, 0.3, free, 1, 10).acceptance == 1.0);
  CHECK_THROWS_AS(pcn_sample(10, 0.0, free, 1, 0), Error);
  CHECK_THROWS_AS(pcn_sample(10, 1.5, free, 1, 0), Error);

  Toy toy;
  // Independence sampler: acceptance equals E min(1, e^{Phi(u) - Phi(u')}) for
  // independent pairs from mu_L, computed here by direct pairing.
  const auto indep = pcn_sample(40000, 1.0, toy.spec, 5, 1000);
  double expected = 0.0;
  // The acceptance of an independence chain is E_rho[min(1, w(u')/w(u))] with u ~ rho, u' ~ mu.
  // Oracle by 2-D quadrature in the radial variable.
  {
    const int m = 400;
    const double rmax = 6.0 * std::sqrt(toy.sigma2);
    const double h = rmax / m;
    const double Z = toy.radial_mass(0.0, rmax);
    for (int i = 0; i < m; ++i) {
      const double r = (i + 0.5) * h;
      const double pr = toy.weight(r * r) * std::exp(-r * r / toy.sigma2) * 2 * r / toy.sigma2 / Z;
      for (int j = 0; j < m; ++j) {
        const double s = (j + 0.5) * h;
        const double ps = std::exp(-s * s / toy.sigma2) * 2 * s / toy.sigma2;
        expected += pr * ps * std::min(1.0, toy.weight(s * s) / toy.weight(r * r)) * h * h;
      }
    }
  }
  CHECK(std::abs(indep.acceptance - expected) < 0.01);

  // Stationary law against the quadrature of e^{-Phi} dmu on polar bins.
  const auto chain = pcn_sample(200000, 0.7, toy.spec, 6, 2000);
  const double sd = std::sqrt(toy.sigma2);
  std::vector<double> edges;
  for (int i = 0; i <= 10; ++i) edges.push_back(0.25 * sd * i);
  edges.back() = 8.0 * sd;
  const double Z = toy.radial_mass(0.0, edges.back());
  std::vector<double> p, q(40, 0.0);
  for (int i = 0; i < 10; ++i)
    for (int a = 0; a < 4; ++a) p.push_back(toy.radial_mass(edges[i], edges[i + 1]) / Z / 4.0);
  for (const auto& f : chain.samples) {
    const double r = std::abs(f[0]);
    int bin = 0;
    while (bin < 9 && r >= edges[bin + 1]) ++bin;
    double ang = std::arg(f[0]) + kPi;
    int sector = std::min(3, int(ang / (kPi / 2)));
    q[bin * 4 + sector] += 1.0 / double(chain.samples.size());
  }
  double tv = 0.0;
  for (int i = 0; i < 40; ++i) tv += 0.5 * std::abs(p[i] - q[i]);
  MESSAGE("pCN toy TV = " << tv << ", acceptance = " << chain.acceptance);
  CHECK(tv <= 0.02);
}

TEST_CASE("Z estimates") {
  auto free = spec_for(4.0, 2, Potential::zero(), 1.0, 1.1);
  for (auto t : {Target::rho_L, Target::rho_L1, Target::rho_L2, Target::rho_L3}) {
    const auto z = estimate_Z(free, 100, 1, t);
    CHECK(z.value == 1.0);
  }
  auto window0 = spec_for(4.0, 2, Potential::power(2, 0.5), 0.0, 0.05);
  CHECK(estimate_Z(window0, 100, 1, Target::rho_L3).value == 1.0);

  // Lower-bound chain at L = 8 with a moderate window.
  auto s = spec_for(8.0, 2, Potential::power(2, 0.5), 0.5, r_prime_for(0.5, 8.0));
  const auto z3 = estimate_Z(s, 20000, 2, Target::rho_L3);
  const auto z2 = estimate_Z(s, 20000, 3, Target::rho_L2);
  const auto z1 = estimate_Z(s, 20000, 4, Target::rho_L1, {16, 1.0 / 64});
  const auto z0 = estimate_Z(s, 20000, 5, Target::rho_L);
  for (const auto& z : {z0, z1, z2, z3}) CHECK((z.value > 0.0 && z.value <= 1.0));
  const double se = std::sqrt(z0.se * z0.se + z3.se * z3.se);
  CHECK(z0.value >= z3.value * (1 - 3 * z3.value) - 3 * se);
  CHECK(z2.value >= z3.value * (1 - z3.value * z3.value) - 3 * std::hypot(z2.se, z3.se));
}

TEST_CASE("choose_R") {
  const auto one = choose_R(1.0, 2000, 1, Potential::power(2, 0.5), ValueMode::complex);
  CHECK(one.R == 0.0);
  CHECK(one.Z3.value == 1.0);
  const auto free = choose_R(8.0, 100, 1, Potential::zero(), ValueMode::complex);
  CHECK(free.R == 16.0);
  CHECK(free.Z3.value == 1.0);
  const auto r = choose_R(8.0, 4000, 2, Potential::power(2, 0.5), ValueMode::complex);
  CHECK(r.R > 0.0);
  CHECK(r.Z3.value - 2 * r.Z3.se >= std::pow(8.0, -1.0 / 6.0));
  for (std::size_t i = 1; i < r.ladder.size(); ++i) CHECK(r.ladder[i].Z3.value <= r.ladder[i - 1].Z3.value);
  CHECK_THROWS_AS(choose_R(0.5, 100, 1, Potential::zero(), ValueMode::complex), Error);
}

TEST_CASE("z_ladder propagates the rhs uncertainty") {
  auto s = spec_for(4.0, 2, Potential::zero(), 1.0, r_prime_for(1.0, 4.0));
  const auto z = z_ladder(s, 200, 1);
  // V = 0: every Z is exactly 1 and each bound is negative.
  CHECK(z.Z3.value == 1.0);
  REQUIRE(z.checks.size() == 3);
  CHECK(z.checks[0].rhs == 0.0);
  CHECK(z.checks[1].rhs == -1.0);
  CHECK(z.checks[2].rhs == -2.0);
  CHECK(z.holds());
}
