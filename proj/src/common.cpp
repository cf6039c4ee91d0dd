#include "gibbs/common.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

namespace gibbs {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_parameter: return "invalid-parameter";
    case ErrorKind::aliasing: return "aliasing-error";
    case ErrorKind::nonfinite_value: return "nonfinite-value";
    case ErrorKind::unsupported: return "unsupported";
    case ErrorKind::unsupported_size: return "unsupported-size";
    case ErrorKind::step_failure: return "step-failure";
    case ErrorKind::integration_failure: return "integration-failure";
    case ErrorKind::invalid_coefficient: return "invalid-coefficient";
    case ErrorKind::degeneracy_suspected: return "degeneracy-suspected";
    case ErrorKind::monotonicity_violation: return "monotonicity-violation";
    case ErrorKind::window_too_large: return "window-too-large";
    case ErrorKind::accuracy: return "accuracy-error";
    case ErrorKind::insufficient_levels: return "insufficient-levels";
    case ErrorKind::internal: return "internal-error";
  }
  return "unknown";
}

Engine make_engine(std::uint64_t seed, std::uint64_t stream, std::uint64_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(tag >> 32)};
  return Engine(seq);
}

Complex complex_normal(Engine& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  const double re = normal(rng);
  const double im = normal(rng);
  return {re, im};
}

unsigned worker_count() {
  if (const char* env = std::getenv("GIBBS_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return static_cast<unsigned>(n);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const unsigned workers = std::min<std::size_t>(worker_count(), std::max<std::size_t>(n, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto run = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace gibbs
