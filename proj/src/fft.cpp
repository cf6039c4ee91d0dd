#include "gibbs/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>
#include <utility>

namespace gibbs {

namespace {
// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

Fft::Fft(std::size_t n) : n_(n) {
  require(n > 0, ErrorKind::invalid_parameter, "FFT length must be positive");
  std::lock_guard lock(planner_mutex());
  buf_in_ = reinterpret_cast<Complex*>(fftw_alloc_complex(n));
  buf_out_ = reinterpret_cast<Complex*>(fftw_alloc_complex(n));
  auto* in = reinterpret_cast<fftw_complex*>(buf_in_);
  auto* out = reinterpret_cast<fftw_complex*>(buf_out_);
  const int len = static_cast<int>(n);
  plan_synth_ = fftw_plan_dft_1d(len, in, out, FFTW_BACKWARD, FFTW_ESTIMATE);
  plan_analyze_ = fftw_plan_dft_1d(len, in, out, FFTW_FORWARD, FFTW_ESTIMATE);
}

Fft::~Fft() { release(); }

Fft::Fft(Fft&& other) noexcept { *this = std::move(other); }

Fft& Fft::operator=(Fft&& other) noexcept {
  if (this != &other) {
    release();
    n_ = std::exchange(other.n_, 0);
    buf_in_ = std::exchange(other.buf_in_, nullptr);
    buf_out_ = std::exchange(other.buf_out_, nullptr);
    plan_synth_ = std::exchange(other.plan_synth_, nullptr);
    plan_analyze_ = std::exchange(other.plan_analyze_, nullptr);
  }
  return *this;
}

void Fft::release() {
  if (!buf_in_) return;
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(plan_synth_);
  fftw_destroy_plan(plan_analyze_);
  fftw_free(buf_in_);
  fftw_free(buf_out_);
  buf_in_ = buf_out_ = nullptr;
}

void Fft::synthesize(std::span<const Complex> in, std::span<Complex> out) {
  std::copy(in.begin(), in.end(), buf_in_);
  fftw_execute(plan_synth_);
  std::copy(buf_out_, buf_out_ + n_, out.begin());
}

void Fft::analyze(std::span<const Complex> in, std::span<Complex> out) {
  std::copy(in.begin(), in.end(), buf_in_);
  fftw_execute(plan_analyze_);
  const double scale = 1.0 / static_cast<double>(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = buf_out_[i] * scale;
}

}  // namespace gibbs
