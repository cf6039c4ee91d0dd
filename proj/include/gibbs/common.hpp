#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gibbs {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Tag written into every output file. Each Fourier amplitude g_k is a circular
/// complex Gaussian with E|g_k|^2 = 1/(2 pi L), which makes the covariance of
/// the base field exactly 1/2 exp(-|x-y|) in the L -> infinity limit.
inline constexpr std::string_view kNormalizationTag = "E|g_k|^2=1/(2*pi*L)";

enum class ErrorKind {
  invalid_parameter,
  aliasing,
  nonfinite_value,
  unsupported,
  unsupported_size,
  step_failure,
  integration_failure,
  invalid_coefficient,
  degeneracy_suspected,
  monotonicity_violation,
  window_too_large,
  accuracy,
  insufficient_levels,
  internal,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool ok, ErrorKind kind, const std::string& what) {
  if (!ok) fail(kind, what);
}

/// Japanese bracket <x> = sqrt(1 + x^2).
inline double bracket(double x) { return std::sqrt(1.0 + x * x); }

using Engine = std::mt19937_64;

/// Independent engine for stream `stream` of a run seeded with `seed`.
/// Draw i of an ensemble always uses stream i, so results do not depend on
/// the number of workers.
Engine make_engine(std::uint64_t seed, std::uint64_t stream, std::uint64_t tag = 0);

/// Standard circular complex Gaussian, E|z|^2 = 1.
Complex complex_normal(Engine& rng);

/// Number of workers taken from GIBBS_WORKERS (default: hardware concurrency).
unsigned worker_count();

/// Runs body(i) for i in [0, n) on worker_count() threads. Each index is
/// processed exactly once; the first exception thrown is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace gibbs
