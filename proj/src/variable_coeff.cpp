#include "gibbs/variable_coeff.hpp"

#include <algorithm>
#include <cmath>

#include "gibbs/quadrature.hpp"

namespace gibbs {

namespace {

constexpr double kTableStep = 1.0 / 64;

// Cubic Hermite on [0, 1] with values p0, p1 and slopes m0, m1 (already scaled by h).
double hermite(double t, double p0, double p1, double m0, double m1) {
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * p0 + (t3 - 2 * t2 + t) * m0 + (-2 * t3 + 3 * t2) * p1 + (t3 - t2) * m1;
}

double hermite_slope(double t, double p0, double p1, double m0, double m1) {
  const double t2 = t * t;
  return (6 * t2 - 6 * t) * p0 + (3 * t2 - 4 * t + 1) * m0 + (-6 * t2 + 6 * t) * p1 + (3 * t2 - 2 * t) * m1;
}

}  // namespace

Coefficient Coefficient::bracket_power(double power) {
  return {[power](double x) { return std::pow(bracket(x), -power); }, 1.0, power};
}

TransformedProblem::TransformedProblem(Coefficient coeff, std::shared_ptr<const ProblemSpec> base)
    : coeff_(std::move(coeff)),
      base_(std::move(base)),
      grid_(base_->L, base_->max_mode(), base_->grid_size) {
  base_->validate();
  require(base_->mode == ValueMode::complex, ErrorKind::unsupported, "the transformed flow needs complex fields");
  require(coeff_.gamma > 1.0 && coeff_.C > 0.0, ErrorKind::invalid_parameter, "decay bound needs gamma > 1, C > 0");
  for (double x = 1.0; x <= 4096.0; x *= 2.0)
    for (double s : {x, -x})
      require(std::abs(coeff_.a(s)) <= coeff_.C * std::pow(bracket(s), -coeff_.gamma) * (1 + 1e-12),
              ErrorKind::invalid_coefficient, "a(x) violates its decay bound");

  const auto rule = gauss_legendre(8);
  auto inv = [&](double x) {
    const double d = 1.0 + coeff_.a(x);
    require(std::isfinite(d) && d > 0.0, ErrorKind::invalid_coefficient, "1 + a(x) must stay positive");
    return 1.0 / d;
  };
  const double target = kPi * base_->L;
  for (X_ = std::ceil(target) + 8.0;; X_ *= 2.0) {
    h_ = kTableStep;
    const auto half = static_cast<std::size_t>(std::llround(X_ / h_));
    phi_.assign(2 * half + 1, 0.0);
    dphi_.assign(2 * half + 1, 0.0);
    dphi_[half] = inv(0.0);
    for (std::size_t i = 0; i < half; ++i) {
      // Panels [i h, (i+1) h] and their mirror images, accumulated outwards from 0.
      double right = 0.0, left = 0.0;
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double x = (double(i) + 0.5 * (1.0 + rule.nodes[q])) * h_;
        right += rule.weights[q] * inv(x);
        left += rule.weights[q] * inv(-x);
      }
      phi_[half + i + 1] = phi_[half + i] + 0.5 * h_ * right;
      phi_[half - i - 1] = phi_[half - i] - 0.5 * h_ * left;
      dphi_[half + i + 1] = inv(double(i + 1) * h_);
      dphi_[half - i - 1] = inv(-double(i + 1) * h_);
    }
    if (phi_.back() > target && phi_.front() < -target) break;
  }

  const std::size_t M = grid_.size();
  w_.resize(M);
  chi_.resize(M);
  values_.resize(M);
  work_.resize(M);
  for (std::size_t j = 0; j < M; ++j) {
    const double y = grid_.point(j);
    w_[j] = weight(y);
    chi_[j] = base_->chi(y);
  }
}

double TransformedProblem::Phi(double x) const {
  const std::size_t last = phi_.size() - 1;
  if (x <= -X_) return phi_.front() + (x + X_) * dphi_.front();
  if (x >= X_) return phi_.back() + (x - X_) * dphi_.back();
  const double s = (x + X_) / h_;
  const auto i = std::min(static_cast<std::size_t>(s), last - 1);
  const double t = s - double(i);
  return hermite(t, phi_[i], phi_[i + 1], h_ * dphi_[i], h_ * dphi_[i + 1]);
}

double TransformedProblem::Phi_inv(double y) const {
  if (y <= phi_.front()) return -X_ + (y - phi_.front()) / dphi_.front();
  if (y >= phi_.back()) return X_ + (y - phi_.back()) / dphi_.back();
  const auto it = std::upper_bound(phi_.begin(), phi_.end(), y);
  const auto i = static_cast<std::size_t>(it - phi_.begin()) - 1;
  const double p0 = phi_[i], p1 = phi_[i + 1], m0 = h_ * dphi_[i], m1 = h_ * dphi_[i + 1];
  // Newton on the local Hermite cubic, kept inside [0, 1].
  double t = (y - p0) / (p1 - p0);
  for (int it_count = 0; it_count < 50; ++it_count) {
    const double f = hermite(t, p0, p1, m0, m1) - y;
    const double d = hermite_slope(t, p0, p1, m0, m1);
    const double next = std::clamp(t - f / d, 0.0, 1.0);
    if (std::abs(next - t) < 1e-16) {
      t = next;
      break;
    }
    t = next;
  }
  return -X_ + (double(i) + t) * h_;
}

SpectralField TransformedProblem::grad_H(const SpectralField& v) {
  SpectralField g = base_->zero_field();
  require(v.same_space(g), ErrorKind::invalid_parameter, "state is not in the truncated space");
  if (!base_->V.is_zero) {
    grid_.to_grid(v.coeffs(), values_);
    for (std::size_t j = 0; j < values_.size(); ++j) {
      const double dv = chi_[j] == 0.0 ? 0.0 : base_->V.d1(std::norm(values_[j]));
      require(std::isfinite(dv), ErrorKind::nonfinite_value, "V' is not finite on the grid");
      work_[j] = w_[j] * chi_[j] * dv * values_[j];
    }
    grid_.to_coeffs(work_, g.coeffs());
  }
  const int K = g.max_mode();
  for (int k = -K; k <= K; ++k) {
    const double kl = static_cast<double>(k) / base_->L;
    g[k] += kl * kl * v[k];
  }
  return g;
}

SpectralField TransformedProblem::apply_J(const SpectralField& g) {
  SpectralField out = base_->zero_field();
  grid_.to_grid(g.coeffs(), values_);
  for (std::size_t j = 0; j < values_.size(); ++j) values_[j] *= Complex(0.0, -1.0 / w_[j]);
  grid_.to_coeffs(values_, out.coeffs());
  return out;
}

SpectralField TransformedProblem::step(const SpectralField& v, double dt, double tol) {
  return midpoint_step(v, dt, tol, [this](const SpectralField& f) { return rhs(f); });
}

SpectralField TransformedProblem::flow(const SpectralField& v0, double t_final, double dt, double tol) {
  require(dt > 0.0, ErrorKind::invalid_parameter, "dt must be positive");
  SpectralField v = v0;
  const double dir = t_final < 0.0 ? -1.0 : 1.0;
  double left = std::abs(t_final);
  while (left > 1e-14 * std::max(1.0, std::abs(t_final))) {
    const double h = std::min(dt, left);
    v = step(v, dir * h, tol);
    left -= h;
  }
  return v;
}

double TransformedProblem::energy(const SpectralField& v) {
  double kinetic = 0.0;
  for (int k = -v.max_mode(); k <= v.max_mode(); ++k) kinetic += std::pow(k / base_->L, 2) * std::norm(v[k]);
  double pot = 0.0;
  if (!base_->V.is_zero) {
    grid_.to_grid(v.coeffs(), values_);
    for (std::size_t j = 0; j < values_.size(); ++j) pot += w_[j] * chi_[j] * base_->V(std::norm(values_[j]));
    pot *= grid_.spacing();
  }
  return kPi * base_->L * kinetic + 0.5 * pot;
}

TransformedProblem build_variable_coeff(Coefficient coeff, std::shared_ptr<const ProblemSpec> base) {
  return TransformedProblem(std::move(coeff), std::move(base));
}

WeakResidual weak_form_residual(TransformedProblem& problem, const SpectralField& v0, double t, double dt,
                                double tol, const std::vector<TestFunction>& tests, double tau) {
  require(t > tau && tau > 0.0, ErrorKind::invalid_parameter, "need t > tau > 0");
  require(!tests.empty(), ErrorKind::invalid_parameter, "no test functions");
  const double step = std::min(dt, tau);
  const auto before = problem.flow(v0, t - tau, dt, tol);
  const auto now = problem.flow(before, tau, step, tol);
  const auto after = problem.flow(now, tau, step, tol);
  const auto& base = problem.base();
  const double L = base.L;
  const int K = now.max_mode();

  // Direct mode sums: value and y-derivative at y.
  auto eval = [&](const SpectralField& f, double y, Complex* dy) {
    Complex s{}, d{};
    for (int k = -K; k <= K; ++k) {
      const Complex e = f[k] * std::polar(1.0, k * y / L);
      s += e;
      d += Complex(0.0, k / L) * e;
    }
    if (dy) *dy = d;
    return s;
  };

  WeakResidual out{t, {}, 0.0};
  for (const auto& psi : tests) {
    require(psi.width > 0.0, ErrorKind::invalid_parameter, "test width must be positive");
    const int n = 1600;
    const double a = psi.center - 8.0 * psi.width, b = psi.center + 8.0 * psi.width;
    const double hx = (b - a) / n;
    Complex time_term{}, flux_term{}, nonlinear_term{};
    for (int i = 0; i <= n; ++i) {
      const double x = a + hx * i;
      const double y = problem.Phi(x);
      const double g = std::exp(-0.5 * std::pow((x - psi.center) / psi.width, 2));
      const double dg = -(x - psi.center) / (psi.width * psi.width) * g;
      const double end = (i == 0 || i == n) ? 0.5 : 1.0;
      Complex vy;
      const Complex u = eval(now, y, &vy);
      const Complex ut = (eval(after, y, nullptr) - eval(before, y, nullptr)) / (2.0 * tau);
      // (1 + a) u_x = v_y(Phi(x)) since Phi' = 1/(1+a).
      const double c = base.chi(y);
      const double dv = c == 0.0 ? 0.0 : base.V.d1(std::norm(u));
      time_term += end * Complex(0.0, 1.0) * ut * g;
      flux_term += end * vy * dg;
      nonlinear_term += end * c * dv * u * g;
    }
    time_term *= hx;
    flux_term *= hx;
    nonlinear_term *= hx;
    const double scale = std::abs(time_term) + std::abs(flux_term) + std::abs(nonlinear_term);
    const double r = scale > 0.0 ? std::abs(time_term - flux_term - nonlinear_term) / scale : 0.0;
    out.relative.push_back(r);
    out.max_relative = std::max(out.max_relative, r);
  }
  return out;
}

}  // namespace gibbs
