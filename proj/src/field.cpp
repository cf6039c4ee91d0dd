#include "gibbs/field.hpp"

#include <algorithm>
#include <cmath>

namespace gibbs {

std::string_view to_string(ValueMode mode) { return mode == ValueMode::complex ? "complex" : "real"; }

ValueMode value_mode_from_string(std::string_view name) {
  if (name == "complex") return ValueMode::complex;
  if (name == "real") return ValueMode::real;
  fail(ErrorKind::invalid_parameter, "unknown value mode '" + std::string(name) + "'");
}

int mode_cutoff(double L, int n_cut) {
  return static_cast<int>(std::floor(static_cast<double>(n_cut) * L + 1e-9));
}

SpectralField::SpectralField(double L, int n_cut, ValueMode mode)
    : L_(L), n_cut_(n_cut), mode_(mode), K_(0) {
  require(L > 0.0 && std::isfinite(L), ErrorKind::invalid_parameter, "L must be positive");
  require(n_cut >= 1, ErrorKind::invalid_parameter, "N_cut must be >= 1");
  K_ = mode_cutoff(L, n_cut);
  coeffs_.assign(static_cast<std::size_t>(2 * K_ + 1), Complex{});
}

SpectralField::SpectralField(double L, int n_cut, ValueMode mode, std::vector<Complex> coeffs)
    : SpectralField(L, n_cut, mode) {
  require(coeffs.size() == coeffs_.size(), ErrorKind::invalid_parameter,
          "coefficient count does not match the mode range");
  coeffs_ = std::move(coeffs);
}

double SpectralField::l2_norm_sq() const {
  double s = 0.0;
  for (const auto& c : coeffs_) s += std::norm(c);
  return period() * s;
}

bool SpectralField::is_hermitian(double tol) const {
  for (int k = 0; k <= K_; ++k) {
    if (std::abs((*this)[k] - std::conj((*this)[-k])) > tol) return false;
  }
  return true;
}

bool SpectralField::same_space(const SpectralField& other) const {
  return L_ == other.L_ && K_ == other.K_;
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  require(same_space(other), ErrorKind::invalid_parameter, "fields live in different spaces");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  require(same_space(other), ErrorKind::invalid_parameter, "fields live in different spaces");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(Complex s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(Complex s, SpectralField a) { return a *= s; }

double max_abs_diff(const SpectralField& a, const SpectralField& b) {
  require(a.same_space(b), ErrorKind::invalid_parameter, "fields live in different spaces");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.coeffs()[i] - b.coeffs()[i]));
  return m;
}

void GridField::validate() const {
  require(points.size() == values.size(), ErrorKind::invalid_parameter, "grid length mismatch");
  for (std::size_t j = 1; j < points.size(); ++j) {
    require(points[j] > points[j - 1], ErrorKind::invalid_parameter, "grid points must increase");
  }
  if (period) {
    require(*period > 0.0, ErrorKind::invalid_parameter, "period must be positive");
    for (double x : points) {
      require(x >= -*period / 2 && x < *period / 2, ErrorKind::invalid_parameter,
              "periodic grid point outside [-P/2, P/2)");
    }
  }
}

SpectralGrid::SpectralGrid(double L, int K, std::size_t M)
    : L_(L), K_(K), M_(M), fft_(M), work_(M) {
  require(L > 0.0, ErrorKind::invalid_parameter, "L must be positive");
  require(M >= static_cast<std::size_t>(2 * K + 1), ErrorKind::aliasing,
          "grid of " + std::to_string(M) + " points cannot resolve " + std::to_string(2 * K + 1) + " modes");
}

std::vector<double> SpectralGrid::points() const {
  std::vector<double> x(M_);
  for (std::size_t j = 0; j < M_; ++j) x[j] = point(j);
  return x;
}

// x_j = -pi L + 2 pi L j / M, so e^{ikx_j/L} = (-1)^k e^{2 pi i k j / M}.
void SpectralGrid::to_grid(std::span<const Complex> coeffs, std::span<Complex> values) {
  std::fill(work_.begin(), work_.end(), Complex{});
  const auto M = static_cast<long>(M_);
  for (int k = -K_; k <= K_; ++k) {
    const long slot = ((k % M) + M) % M;
    const Complex c = coeffs[static_cast<std::size_t>(k + K_)];
    work_[static_cast<std::size_t>(slot)] += (k % 2 == 0) ? c : -c;
  }
  fft_.synthesize(work_, values);
}

void SpectralGrid::to_coeffs(std::span<const Complex> values, std::span<Complex> coeffs) {
  fft_.analyze(values, work_);
  const auto M = static_cast<long>(M_);
  for (int k = -K_; k <= K_; ++k) {
    const long slot = ((k % M) + M) % M;
    const Complex c = work_[static_cast<std::size_t>(slot)];
    coeffs[static_cast<std::size_t>(k + K_)] = (k % 2 == 0) ? c : -c;
  }
}

double mode_variance(double L, int k) {
  const double kl = static_cast<double>(k) / L;
  return 1.0 / (2.0 * kPi * L * (1.0 + kl * kl));
}

SpectralField xi_from_amplitudes(double L, int n_cut, ValueMode mode, std::span<const Complex> g) {
  SpectralField f(L, n_cut, mode);
  const int K = f.max_mode();
  require(g.size() == f.size(), ErrorKind::invalid_parameter, "amplitude count mismatch");
  for (int k = -K; k <= K; ++k) {
    const double kl = static_cast<double>(k) / L;
    f[k] = g[static_cast<std::size_t>(k + K)] / std::sqrt(1.0 + kl * kl);
  }
  if (mode == ValueMode::real) {
    // sqrt(2) Re(sum c_k e^{ikx/L}) has coefficients (c_k + conj c_{-k}) / sqrt(2).
    SpectralField r(L, n_cut, mode);
    for (int k = -K; k <= K; ++k) r[k] = (f[k] + std::conj(f[-k])) / std::sqrt(2.0);
    return r;
  }
  return f;
}

SpectralField sample_xi_Lf(double L, int n_cut, ValueMode mode, Engine& rng) {
  require(L > 0.0 && n_cut >= 1, ErrorKind::invalid_parameter, "L and N_cut must be positive");
  const int K = mode_cutoff(L, n_cut);
  const double sd = 1.0 / std::sqrt(2.0 * kPi * L);
  std::vector<Complex> g(static_cast<std::size_t>(2 * K + 1));
  for (auto& z : g) z = sd * complex_normal(rng);
  return xi_from_amplitudes(L, n_cut, mode, g);
}

SpectralField sample_xi_Lf(double L, int n_cut, ValueMode mode, std::uint64_t seed) {
  auto rng = make_engine(seed, 0);
  return sample_xi_Lf(L, n_cut, mode, rng);
}

SpectralField project_low(const SpectralField& f, int n_cut) {
  require(n_cut >= 1, ErrorKind::invalid_parameter, "N_cut must be >= 1");
  require(n_cut <= f.n_cut(), ErrorKind::invalid_parameter, "projection cannot add modes");
  SpectralField out(f.L(), n_cut, f.mode());
  const int K = out.max_mode();
  for (int k = -K; k <= K; ++k) out[k] = f[k];
  return out;
}

GridField evaluate_grid(const SpectralField& f, std::size_t M) {
  SpectralGrid grid(f.L(), f.max_mode(), M);
  GridField out;
  out.points = grid.points();
  out.values.resize(M);
  grid.to_grid(f.coeffs(), out.values);
  out.period = f.period();
  return out;
}

OuTransition ou_transition(double h) {
  const double decay = std::exp(-h);
  return {decay, std::sqrt(0.5 * (1.0 - decay * decay))};
}

GridField sample_ou(std::span<const double> points, ValueMode mode, Engine& rng) {
  for (std::size_t j = 1; j < points.size(); ++j) {
    require(points[j] > points[j - 1], ErrorKind::invalid_parameter, "OU points must be strictly increasing");
  }
  GridField out;
  out.points.assign(points.begin(), points.end());
  out.values.resize(points.size());
  if (points.empty()) return out;
  std::normal_distribution<double> normal(0.0, 1.0);
  // Complex: E|u|^2 = 1/2 split over two independent components.
  auto innovation = [&](double sd) -> Complex {
    if (mode == ValueMode::real) return {sd * normal(rng), 0.0};
    return sd * complex_normal(rng);
  };
  out.values[0] = innovation(std::sqrt(0.5));
  for (std::size_t j = 1; j < points.size(); ++j) {
    const auto [decay, sigma] = ou_transition(points[j] - points[j - 1]);
    out.values[j] = decay * out.values[j - 1] + innovation(sigma);
  }
  return out;
}

GridField sample_ou(std::span<const double> points, ValueMode mode, std::uint64_t seed) {
  auto rng = make_engine(seed, 0);
  return sample_ou(points, mode, rng);
}

double covariance_closed_form(double x, double y) { return 0.5 * std::exp(-std::abs(x - y)); }

}  // namespace gibbs
