#pragma once

#include <optional>
#include <span>
#include <vector>

#include "gibbs/common.hpp"
#include "gibbs/fft.hpp"

namespace gibbs {

enum class ValueMode { complex, real };

std::string_view to_string(ValueMode mode);
ValueMode value_mode_from_string(std::string_view name);

/// Largest mode index kept by a cutoff n_cut at half-period scale L:
/// floor(n_cut * L). Modes are e^{ikx/L}, |k| <= this value.
int mode_cutoff(double L, int n_cut);

/// Fourier coefficients of a field of period 2 pi L on modes |k| <= n_cut * L.
///
/// In real mode the field is real valued and the coefficients satisfy
/// c_{-k} = conj(c_k).
class SpectralField {
 public:
  SpectralField(double L, int n_cut, ValueMode mode);
  SpectralField(double L, int n_cut, ValueMode mode, std::vector<Complex> coeffs);

  double L() const { return L_; }
  int n_cut() const { return n_cut_; }
  ValueMode mode() const { return mode_; }
  int max_mode() const { return K_; }
  std::size_t size() const { return coeffs_.size(); }
  double period() const { return 2.0 * kPi * L_; }

  Complex& operator[](int k) { return coeffs_[static_cast<std::size_t>(k + K_)]; }
  const Complex& operator[](int k) const { return coeffs_[static_cast<std::size_t>(k + K_)]; }

  std::span<Complex> coeffs() { return coeffs_; }
  std::span<const Complex> coeffs() const { return coeffs_; }

  /// L2 norm squared over one period, 2 pi L sum |c_k|^2.
  double l2_norm_sq() const;
  bool is_hermitian(double tol = 0.0) const;
  bool same_space(const SpectralField& other) const;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(Complex s);

 private:
  double L_;
  int n_cut_;
  ValueMode mode_;
  int K_;
  std::vector<Complex> coeffs_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(Complex s, SpectralField a);

/// Sup-norm distance between coefficient vectors of fields in the same space.
double max_abs_diff(const SpectralField& a, const SpectralField& b);

struct GridField {
  std::vector<double> points;
  std::vector<Complex> values;
  std::optional<double> period;  // nullopt: field on an unbounded line

  void validate() const;
};

/// Uniform periodic grid x_j = -pi L + j 2 pi L / M and the transforms between
/// coefficients on |k| <= K and grid values. Reused across many evaluations.
class SpectralGrid {
 public:
  SpectralGrid(double L, int K, std::size_t M);

  double L() const { return L_; }
  int max_mode() const { return K_; }
  std::size_t size() const { return M_; }
  double spacing() const { return 2.0 * kPi * L_ / static_cast<double>(M_); }
  double point(std::size_t j) const { return -kPi * L_ + spacing() * static_cast<double>(j); }
  std::vector<double> points() const;

  /// values[j] = sum_k coeffs[k + K] e^{i k x_j / L}
  void to_grid(std::span<const Complex> coeffs, std::span<Complex> values);
  /// Discrete Fourier coefficients of the grid values, restricted to |k| <= K.
  void to_coeffs(std::span<const Complex> values, std::span<Complex> coeffs);

 private:
  double L_;
  int K_;
  std::size_t M_;
  Fft fft_;
  std::vector<Complex> work_;
};

/// Draw of xi_L^f: c_k = (1 + k^2/L^2)^{-1/2} g_k, E|g_k|^2 = 1/(2 pi L).
SpectralField sample_xi_Lf(double L, int n_cut, ValueMode mode, std::uint64_t seed);
SpectralField sample_xi_Lf(double L, int n_cut, ValueMode mode, Engine& rng);

/// Spectral variance of mode k, E|c_k|^2 = 1 / (2 pi L (1 + k^2/L^2)).
double mode_variance(double L, int k);

/// Builds xi_L^f from raw amplitudes g_k (|k| <= K) with the real-mode
/// symmetrization applied when requested.
SpectralField xi_from_amplitudes(double L, int n_cut, ValueMode mode, std::span<const Complex> g);

SpectralField project_low(const SpectralField& f, int n_cut);

GridField evaluate_grid(const SpectralField& f, std::size_t M);

struct OuTransition {
  double decay;  // e^{-h}
  double sigma;  // innovation standard deviation (per real component in real mode)
};

/// Exact one-step transition of the stationary OU process with covariance
/// 1/2 e^{-|x-y|} over a gap h >= 0.
OuTransition ou_transition(double h);

GridField sample_ou(std::span<const double> points, ValueMode mode, std::uint64_t seed);
GridField sample_ou(std::span<const double> points, ValueMode mode, Engine& rng);

double covariance_closed_form(double x, double y);

}  // namespace gibbs
