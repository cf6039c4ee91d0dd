#pragma once

#include <span>

#include "gibbs/common.hpp"

struct fftw_plan_s;

namespace gibbs {

/// Owning wrapper around a pair of 1-D complex FFTW plans of fixed length.
/// Plans are built with FFTW_ESTIMATE so transforms are bitwise reproducible.
/// Not thread-safe: give every worker its own instance.
class Fft {
 public:
  explicit Fft(std::size_t n);
  ~Fft();
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;
  Fft(Fft&& other) noexcept;
  Fft& operator=(Fft&& other) noexcept;

  std::size_t size() const { return n_; }

  /// out[j] = sum_m in[m] exp(+2 pi i m j / n)   (unnormalized synthesis)
  void synthesize(std::span<const Complex> in, std::span<Complex> out);
  /// out[m] = (1/n) sum_j in[j] exp(-2 pi i m j / n)
  void analyze(std::span<const Complex> in, std::span<Complex> out);

 private:
  void release();

  std::size_t n_ = 0;
  Complex* buf_in_ = nullptr;
  Complex* buf_out_ = nullptr;
  fftw_plan_s* plan_synth_ = nullptr;
  fftw_plan_s* plan_analyze_ = nullptr;
};

}  // namespace gibbs
