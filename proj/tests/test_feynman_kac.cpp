#include <doctest.h>

#include <cmath>

#include "gibbs/common.hpp"
#include "gibbs/feynman_kac.hpp"

using namespace gibbs;

namespace {

const StateGrid& grid() {
  static const StateGrid g = StateGrid::make(8.0, 0.02);
  return g;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("state grid") {
  const auto& g = grid();
  CHECK(g.u.front() == -8.0);
  CHECK(g.u.back() == doctest::Approx(8.0));
  CHECK(g.du == doctest::Approx(0.02));
  CHECK_THROWS_AS(StateGrid::make(3.0, 0.02), Error);
  CHECK_THROWS_AS(StateGrid::make(8.0, 0.1), Error);
}

TEST_CASE("free propagation preserves the stationary law and constants") {
  const auto pi = stationary_density(grid());
  CHECK(max_diff(ou_propagate(pi, 5.0, Potential::zero(), grid(), Direction::forward), pi) < 1e-6);
  const std::vector<double> ones(grid().size(), 1.0);
  CHECK(max_diff(ou_propagate(ones, 5.0, Potential::zero(), grid(), Direction::backward), ones) < 1e-6);
  CHECK(max_diff(ou_propagate(pi, 0.0, Potential::power(1, 1), grid(), Direction::forward), pi) == 0.0);
  CHECK_THROWS_AS(ou_propagate(pi, -1.0, Potential::zero(), grid(), Direction::forward), Error);
}

TEST_CASE("semigroup property") {
  const auto V = Potential::power(1, 1.0);
  std::vector<double> start(grid().size());
  for (std::size_t i = 0; i < start.size(); ++i) start[i] = std::exp(-(grid().u[i] - 0.5) * (grid().u[i] - 0.5));
  for (auto dir : {Direction::forward, Direction::backward}) {
    const auto whole = ou_propagate(start, 0.8, V, grid(), dir);
    const auto parts = ou_propagate(ou_propagate(start, 0.3, V, grid(), dir), 0.5, V, grid(), dir);
    CHECK(max_diff(whole, parts) < 1e-6);
  }
}

TEST_CASE("killed mass matches a Monte-Carlo Feynman-Kac average") {
  // E exp(-int_0^1 U_s^2 ds) for the stationary OU process, by exact AR(1)
  // paths written out here.
  const int steps = 256;
  const double h = 1.0 / steps;
  const double a = std::exp(-h), sig = std::sqrt(0.5 * (1 - std::exp(-2 * h)));
  std::vector<double> w;
  for (int p = 0; p < 100000; ++p) {
    auto rng = make_engine(123, p);
    std::normal_distribution<double> nd;
    double u = std::sqrt(0.5) * nd(rng), e = 0.5 * u * u;
    for (int s = 1; s <= steps; ++s) {
      u = a * u + sig * nd(rng);
      e += (s == steps ? 0.5 : 1.0) * u * u;
    }
    w.push_back(std::exp(-e * h));
  }
  const auto mc = mean_se(w);
  const auto out = ou_propagate(stationary_density(grid()), 1.0, Potential::power(1, 1.0), grid(), Direction::forward);
  double mass = 0.0;
  for (double v : out) mass += v * grid().du;
  MESSAGE("transfer mass " << mass << " MC " << mc.value << " +- " << mc.se);
  CHECK(std::abs(mass - mc.value) < 3 * mc.se);
}

TEST_CASE("negative excursions are reported") {
  std::vector<double> spike(grid().size(), 0.0);
  spike[grid().size() / 2] = 1.0 / grid().du;
  CHECK_THROWS_AS(ou_propagate(spike, 0.05, Potential::zero(), grid(), Direction::forward), Error);
}

TEST_CASE("marginals of the sharp-window measure") {
  const auto pi = stationary_density(grid());
  for (double x : {-1.5, 0.0, 0.7}) {
    const auto m = marginal_rho3(2.0, x, Potential::zero(), grid());
    CHECK(max_diff(m.density, pi) < 1e-8);
    CHECK(m.mass() == doctest::Approx(1.0).epsilon(1e-12));
  }
  const auto V = Potential::power(1, 1.0);
  for (double x : {0.3, 1.0, 1.9}) {
    const auto p = marginal_rho3(2.0, x, V, grid());
    const auto q = marginal_rho3(2.0, -x, V, grid());
    CHECK(max_diff(p.density, q.density) < 1e-8);
    CHECK(std::abs(p.mass() - 1.0) < 1e-8);
    for (double v : p.density) CHECK(v >= 0.0);
  }
  CHECK_THROWS_AS(marginal_rho3(2.0, 2.5, V, grid()), Error);
  CHECK_THROWS_AS(marginal_rho3(20.0, 0.0, Potential::power(1, 1e4), grid()), Error);
}

TEST_CASE("moments under the sharp-window measure") {
  CHECK(std::abs(moment_under_rho3(2, 0.0, 2.0, Potential::zero(), grid()) - 0.5) < 1e-3);
  CHECK(moment_under_rho3(4, 0.5, 2.0, Potential::zero(), grid()) == doctest::Approx(0.75).epsilon(1e-6));
  const auto V = Potential::power(1, 1.0);
  const double m2 = moment_under_rho3(2, 0.0, 2.0, V, grid());
  CHECK(m2 <= 0.5);
  const auto mc = mc_rho3_values(2.0, 0.0, V, 100000, 9);
  std::vector<double> sq(mc.values.size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = mc.values[i] * mc.values[i];
  const auto e = weighted_mean(sq, mc.weights);
  MESSAGE("r=2 transfer " << m2 << " MC " << e.value << " +- " << e.se);
  CHECK(std::abs(m2 - e.value) < 3 * e.se);
  CHECK_THROWS_AS(moment_under_rho3(1.0, 0.0, 2.0, V, grid()), Error);
}

TEST_CASE("ground states") {
  const auto op0 = SchrodingerOp::build(grid(), Potential::zero());
  const auto g0 = ground_state(op0);
  double overlap = 0.0, gauss_norm = 0.0;
  for (std::size_t i = 0; i < grid().size(); ++i) {
    const double gauss = std::exp(-0.5 * grid().u[i] * grid().u[i]);
    overlap += g0.omega[i] * gauss * grid().du;
    gauss_norm += gauss * gauss * grid().du;
  }
  overlap /= std::sqrt(gauss_norm);
  MESSAGE("E(0) = " << g0.E << ", overlap defect " << 1 - overlap);
  CHECK(overlap >= 1 - 1e-6);
  for (double v : g0.omega) CHECK(v >= -1e-12);

  const auto same = ground_state(SchrodingerOp::build(grid(), Potential::zero()));
  CHECK(same.E == g0.E);
  const auto gv = ground_state(SchrodingerOp::build(grid(), Potential::power(1, 1.0)));
  CHECK(gv.E >= g0.E);
  CHECK(gv.E1 - gv.E > 0.0);

  // Symmetric double well: the two lowest levels nearly coincide.
  auto well = op0;
  for (std::size_t i = 0; i < grid().size(); ++i) {
    const double u = grid().u[i];
    well.diag[i] += 200.0 * (u * u - 16.0) * (u * u - 16.0) / 16.0 - u * u;
  }
  CHECK_THROWS_AS(ground_state(well), Error);
}
