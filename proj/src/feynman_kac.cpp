#include "gibbs/feynman_kac.hpp"

#include <algorithm>
#include <cmath>

#include "gibbs/field.hpp"

namespace gibbs {

namespace {

// Solves a tridiagonal system (sub, diag, sup) x = rhs in place (Thomas).
void thomas(const std::vector<double>& sub, std::vector<double> diag, const std::vector<double>& sup,
            std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double m = sub[i] / diag[i - 1];
    diag[i] -= m * sup[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - sup[i] * rhs[i + 1]) / diag[i];
}

// Number of eigenvalues below lambda of the symmetric tridiagonal matrix.
std::size_t sturm_count(const std::vector<double>& diag, double off, double lambda) {
  std::size_t count = 0;
  double q = 1.0;
  for (std::size_t i = 0; i < diag.size(); ++i) {
    q = diag[i] - lambda - (i == 0 ? 0.0 : off * off / q);
    if (q == 0.0) q = -1e-300;
    if (q < 0.0) ++count;
  }
  return count;
}

double kth_eigenvalue(const std::vector<double>& diag, double off, std::size_t k, double tol) {
  double lo = diag[0], hi = diag[0];
  for (double d : diag) {
    lo = std::min(lo, d - 2 * std::abs(off));
    hi = std::max(hi, d + 2 * std::abs(off));
  }
  while (hi - lo > tol * std::max(1.0, std::abs(lo) + std::abs(hi)) * 0.5) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (sturm_count(diag, off, mid) > k ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

// Tridiagonal generator A with A phi = d/du (1/2 pi d/du (phi / pi)) on the
// grid, so that A pi = 0 and the column sums vanish. Rows are stored as
// (sub, diag, sup).
struct Tridiag {
  std::vector<double> sub, diag, sup;
};

Tridiag forward_generator(const StateGrid& g) {
  const std::size_t n = g.size();
  std::vector<double> pi(n);
  for (std::size_t i = 0; i < n; ++i) pi[i] = std::exp(-g.u[i] * g.u[i]);
  Tridiag a{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  const double c = 0.5 / (g.du * g.du);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    // Flux F = c pi_half (phi_{i+1}/pi_{i+1} - phi_i/pi_i) leaves cell i, enters i+1.
    const double half = std::sqrt(pi[i] * pi[i + 1]);
    const double to_next = c * half / pi[i + 1];
    const double to_self = c * half / pi[i];
    a.sup[i] += to_next;
    a.diag[i] -= to_self;
    a.sub[i + 1] += to_self;
    a.diag[i + 1] -= to_next;
  }
  return a;
}

Tridiag transpose(const Tridiag& a) {
  const std::size_t n = a.diag.size();
  Tridiag t{std::vector<double>(n, 0.0), a.diag, std::vector<double>(n, 0.0)};
  for (std::size_t i = 0; i + 1 < n; ++i) {
    t.sup[i] = a.sub[i + 1];
    t.sub[i + 1] = a.sup[i];
  }
  return t;
}

}  // namespace

StateGrid StateGrid::make(double u_max, double du_target) {
  require(u_max >= 6.0 * std::sqrt(0.5), ErrorKind::invalid_parameter, "u_max must cover 6 standard deviations");
  require(du_target > 0.0 && du_target <= 0.01 * u_max, ErrorKind::invalid_parameter, "du must be <= 0.01 u_max");
  StateGrid g;
  g.u_max = u_max;
  const auto cells = static_cast<std::size_t>(std::ceil(2.0 * u_max / du_target));
  g.du = 2.0 * u_max / double(cells);
  g.u.resize(cells + 1);
  for (std::size_t i = 0; i <= cells; ++i) g.u[i] = -u_max + g.du * double(i);
  return g;
}

SchrodingerOp SchrodingerOp::build(const StateGrid& grid, const Potential& V) {
  SchrodingerOp op;
  op.grid = grid;
  op.kind = V.is_zero ? PotentialKind::T0 : PotentialKind::TV;
  const double h2 = grid.du * grid.du;
  op.off = -1.0 / h2;
  op.diag.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double u2 = grid.u[i] * grid.u[i];
    op.diag[i] = 2.0 / h2 + u2 + (V.is_zero ? 0.0 : V(u2)) - 0.5;
  }
  return op;
}

GroundState ground_state(const SchrodingerOp& op, double tol) {
  require(tol > 0.0, ErrorKind::invalid_parameter, "tolerance must be positive");
  const auto& d = op.diag;
  const std::size_t n = d.size();
  const double e0 = kth_eigenvalue(d, op.off, 0, 1e-15);
  const double e1 = kth_eigenvalue(d, op.off, 1, 1e-15);
  if (e1 - e0 < 10.0 * tol) fail(ErrorKind::degeneracy_suspected, "first eigenvalue is not simple");

  const double shift = e0 - 1e-6 * (e1 - e0);
  std::vector<double> sub(n, op.off), sup(n, op.off), diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = d[i] - shift;
  std::vector<double> v(n, 1.0);
  auto normalize = [&](std::vector<double>& x) {
    double s = 0.0;
    for (double a : x) s += a * a;
    s = std::sqrt(s * op.grid.du);
    for (double& a : x) a /= s;
  };
  normalize(v);
  GroundState gs{e0, e1, {}};
  std::vector<double> tv(n);
  for (int it = 0; it < 50; ++it) {
    thomas(sub, diag, sup, v);
    normalize(v);
    double rq = 0.0, res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      tv[i] = d[i] * v[i] + (i > 0 ? op.off * v[i - 1] : 0.0) + (i + 1 < n ? op.off * v[i + 1] : 0.0);
      rq += v[i] * tv[i];
    }
    rq *= op.grid.du;
    for (std::size_t i = 0; i < n; ++i) res += (tv[i] - rq * v[i]) * (tv[i] - rq * v[i]);
    res = std::sqrt(res * op.grid.du);
    gs.E = rq;
    if (res <= tol) {
      double sum = 0.0;
      for (double a : v) sum += a;
      if (sum < 0.0)
        for (double& a : v) a = -a;
      gs.omega = std::move(v);
      return gs;
    }
  }
  fail(ErrorKind::accuracy, "inverse iteration did not reach the residual tolerance");
}

std::vector<double> stationary_density(const StateGrid& grid) {
  std::vector<double> p(grid.size());
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += (p[i] = std::exp(-grid.u[i] * grid.u[i]));
  for (double& v : p) v /= s * grid.du;
  return p;
}

std::vector<double> ou_propagate(std::vector<double> phi, double x_span, const Potential& V, const StateGrid& grid,
                                 Direction direction) {
  require(x_span >= 0.0, ErrorKind::invalid_parameter, "x_span must be >= 0");
  require(phi.size() == grid.size(), ErrorKind::invalid_parameter, "density size does not match the grid");
  if (x_span == 0.0) return phi;
  const auto steps = static_cast<std::size_t>(std::ceil(x_span / 0.01 - 1e-12));
  const double ds = x_span / double(steps);
  Tridiag a = forward_generator(grid);
  if (direction == Direction::backward) a = transpose(a);
  const std::size_t n = grid.size();
  std::vector<double> kill(n, 1.0);
  if (!V.is_zero)
    for (std::size_t i = 0; i < n; ++i) kill[i] = std::exp(-0.5 * ds * V(grid.u[i] * grid.u[i]));
  // Crank-Nicolson: (I - ds/2 A) next = (I + ds/2 A) cur.
  std::vector<double> lsub(n), ldiag(n), lsup(n);
  for (std::size_t i = 0; i < n; ++i) {
    lsub[i] = -0.5 * ds * a.sub[i];
    ldiag[i] = 1.0 - 0.5 * ds * a.diag[i];
    lsup[i] = -0.5 * ds * a.sup[i];
  }
  std::vector<double> rhs(n);
  for (std::size_t s = 0; s < steps; ++s) {
    for (std::size_t i = 0; i < n; ++i) phi[i] *= kill[i];
    for (std::size_t i = 0; i < n; ++i) {
      rhs[i] = phi[i] + 0.5 * ds * (a.diag[i] * phi[i] + (i > 0 ? a.sub[i] * phi[i - 1] : 0.0) +
                                    (i + 1 < n ? a.sup[i] * phi[i + 1] : 0.0));
    }
    thomas(lsub, ldiag, lsup, rhs);
    for (std::size_t i = 0; i < n; ++i) {
      double v = rhs[i] * kill[i];
      if (v < 0.0) {
        if (v < -1e-12) fail(ErrorKind::monotonicity_violation, "propagated density became negative");
        v = 0.0;
      }
      phi[i] = v;
    }
  }
  return phi;
}

double MarginalDensity::mass() const {
  double s = 0.0;
  for (double p : density) s += p;
  return s * grid.du;
}

double MarginalDensity::moment(double r) const {
  double s = 0.0;
  for (std::size_t i = 0; i < density.size(); ++i) s += std::pow(std::abs(grid.u[i]), r) * density[i];
  return s * grid.du;
}

std::vector<double> MarginalDensity::bin_masses(const std::vector<double>& edges) const {
  require(edges.size() >= 2, ErrorKind::invalid_parameter, "need at least one bin");
  // Cell i carries mass density[i] du spread uniformly on [u_i - du/2, u_i + du/2].
  std::vector<double> out(edges.size() - 1, 0.0);
  for (std::size_t i = 0; i < density.size(); ++i) {
    const double a = grid.u[i] - 0.5 * grid.du, b = grid.u[i] + 0.5 * grid.du;
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
      const double lo = std::max(a, edges[k]), hi = std::min(b, edges[k + 1]);
      if (hi > lo) out[k] += density[i] * (hi - lo);
    }
  }
  return out;
}

MarginalDensity marginal_rho3(double R, double x, const Potential& V, const StateGrid& grid) {
  require(R > 0.0 && std::abs(x) <= R, ErrorKind::invalid_parameter, "need R > 0 and |x| <= R");
  const auto left = ou_propagate(stationary_density(grid), R + x, V, grid, Direction::forward);
  const auto right = ou_propagate(std::vector<double>(grid.size(), 1.0), R - x, V, grid, Direction::backward);
  MarginalDensity m{grid, std::vector<double>(grid.size())};
  double s = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) s += (m.density[i] = left[i] * right[i]);
  s *= grid.du;
  if (!(s > 1e-280)) fail(ErrorKind::window_too_large, "killing weight underflows on this window");
  for (double& p : m.density) p /= s;
  return m;
}

double moment_under_rho3(double r, double x, double R, const Potential& V, const StateGrid& grid) {
  require(r >= 2.0, ErrorKind::invalid_parameter, "moment order must be >= 2");
  const double v = marginal_rho3(R, x, V, grid).moment(r);
  require(std::isfinite(v), ErrorKind::nonfinite_value, "moment is not finite");
  return v;
}

WeightedValues mc_rho3_values(double R, double x, const Potential& V, std::size_t n, std::uint64_t seed, double h) {
  require(R > 0.0 && std::abs(x) <= R, ErrorKind::invalid_parameter, "need R > 0 and |x| <= R");
  const auto cells = static_cast<std::size_t>(std::ceil(2.0 * R / h - 1e-9));
  const double step = 2.0 * R / double(cells);
  std::vector<double> pts(cells + 1);
  for (std::size_t j = 0; j <= cells; ++j) pts[j] = -R + step * double(j);
  // x is placed on the grid by inserting it when it is not a node.
  const auto it = std::lower_bound(pts.begin(), pts.end(), x - 1e-12);
  if (it == pts.end() || std::abs(*it - x) > 1e-12) pts.insert(it, x);
  const auto ix = static_cast<std::size_t>(std::lower_bound(pts.begin(), pts.end(), x - 1e-12) - pts.begin());
  WeightedValues out{std::vector<double>(n), std::vector<double>(n)};
  parallel_for(n, [&](std::size_t i) {
    auto rng = make_engine(seed, i, 30);
    const auto g = sample_ou(pts, ValueMode::real, rng);
    double e = 0.0;
    for (std::size_t j = 0; j + 1 < pts.size(); ++j) {
      const double a = g.values[j].real(), b = g.values[j + 1].real();
      e += 0.5 * (pts[j + 1] - pts[j]) * (V(a * a) + V(b * b));
    }
    out.values[i] = g.values[ix].real();
    out.weights[i] = std::exp(-e);
  });
  return out;
}

}  // namespace gibbs
