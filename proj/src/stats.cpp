#include "gibbs/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gibbs/common.hpp"

namespace gibbs {

namespace {

struct Atom {
  double x;
  double w1;
  double w2;
};

// Merged atoms of two weighted samples with each side normalized to mass one.
std::vector<Atom> merge(const std::vector<double>& x1, const std::vector<double>& w1, const std::vector<double>& x2,
                        const std::vector<double>& w2) {
  require(!x1.empty() && !x2.empty(), ErrorKind::invalid_parameter, "empty sample");
  require(w1.empty() || w1.size() == x1.size(), ErrorKind::invalid_parameter, "weight size mismatch");
  require(w2.empty() || w2.size() == x2.size(), ErrorKind::invalid_parameter, "weight size mismatch");
  const double s1 = w1.empty() ? double(x1.size()) : std::accumulate(w1.begin(), w1.end(), 0.0);
  const double s2 = w2.empty() ? double(x2.size()) : std::accumulate(w2.begin(), w2.end(), 0.0);
  require(s1 > 0 && s2 > 0, ErrorKind::invalid_parameter, "weights must have positive sum");
  std::vector<Atom> a;
  a.reserve(x1.size() + x2.size());
  for (std::size_t i = 0; i < x1.size(); ++i) a.push_back({x1[i], (w1.empty() ? 1.0 : w1[i]) / s1, 0.0});
  for (std::size_t i = 0; i < x2.size(); ++i) a.push_back({x2[i], 0.0, (w2.empty() ? 1.0 : w2[i]) / s2});
  std::sort(a.begin(), a.end(), [](const Atom& l, const Atom& r) { return l.x < r.x; });
  return a;
}

}  // namespace

Estimate mean_se(const std::vector<double>& x) { return weighted_mean(x, {}); }

Estimate batch_means(const std::vector<double>& x, int batches) {
  require(batches >= 2 && x.size() >= static_cast<std::size_t>(batches), ErrorKind::invalid_parameter,
          "not enough samples for batch means");
  const std::size_t b = x.size() / batches;
  std::vector<double> means(batches);
  for (int i = 0; i < batches; ++i)
    means[i] = std::accumulate(x.begin() + i * b, x.begin() + (i + 1) * b, 0.0) / double(b);
  const auto e = mean_se(means);
  return {std::accumulate(x.begin(), x.end(), 0.0) / double(x.size()), e.se};
}

Estimate weighted_mean(const std::vector<double>& x, const std::vector<double>& w) {
  require(!x.empty(), ErrorKind::invalid_parameter, "empty sample");
  require(w.empty() || w.size() == x.size(), ErrorKind::invalid_parameter, "weight size mismatch");
  const std::size_t n = x.size();
  double sw = 0.0, swx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = w.empty() ? 1.0 : w[i];
    sw += wi;
    swx += wi * x[i];
  }
  require(sw > 0.0, ErrorKind::invalid_parameter, "weights must have positive sum");
  const double m = swx / sw;
  if (n < 2) return {m, 0.0};
  // Influence terms w_i (x_i - m) / mean(w).
  const double wbar = sw / double(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = (w.empty() ? 1.0 : w[i]) * (x[i] - m) / wbar;
    ss += d * d;
  }
  return {m, std::sqrt(ss / double(n - 1) / double(n))};
}

double effective_sample_size(const std::vector<double>& w) {
  double s = 0.0, s2 = 0.0;
  for (double v : w) {
    s += v;
    s2 += v * v;
  }
  return s2 > 0.0 ? s * s / s2 : 0.0;
}

double weighted_ks(const std::vector<double>& x1, const std::vector<double>& w1, const std::vector<double>& x2,
                   const std::vector<double>& w2) {
  const auto a = merge(x1, w1, x2, w2);
  double f1 = 0.0, f2 = 0.0, d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    f1 += a[i].w1;
    f2 += a[i].w2;
    if (i + 1 < a.size() && a[i + 1].x == a[i].x) continue;
    d = std::max(d, std::abs(f1 - f2));
  }
  return d;
}

double ks_threshold(double alpha, double n1, double n2) {
  require(alpha > 0 && alpha < 1 && n1 > 0 && n2 > 0, ErrorKind::invalid_parameter, "bad KS threshold inputs");
  return std::sqrt(-0.5 * std::log(alpha / 2.0)) * std::sqrt((n1 + n2) / (n1 * n2));
}

double energy_distance(const std::vector<double>& x1, const std::vector<double>& w1, const std::vector<double>& x2,
                       const std::vector<double>& w2) {
  const auto a = merge(x1, w1, x2, w2);
  double f1 = 0.0, f2 = 0.0, e = 0.0;
  for (std::size_t i = 0; i + 1 < a.size(); ++i) {
    f1 += a[i].w1;
    f2 += a[i].w2;
    const double d = f1 - f2;
    e += d * d * (a[i + 1].x - a[i].x);
  }
  return 2.0 * e;
}

double paired_energy_threshold(const std::vector<double>& x1, const std::vector<double>& x2,
                               const std::vector<double>& w, double alpha, int permutations, std::uint64_t seed) {
  require(x1.size() == x2.size() && (w.empty() || w.size() == x1.size()), ErrorKind::invalid_parameter,
          "paired samples must have equal sizes");
  require(permutations >= 1, ErrorKind::invalid_parameter, "permutations must be positive");
  std::vector<double> stats(permutations);
  std::vector<double> a(x1.size()), b(x1.size());
  Engine rng = make_engine(seed, 0, 0x9e3779b9);
  std::bernoulli_distribution coin(0.5);
  for (int p = 0; p < permutations; ++p) {
    for (std::size_t i = 0; i < x1.size(); ++i) {
      const bool swap = coin(rng);
      a[i] = swap ? x2[i] : x1[i];
      b[i] = swap ? x1[i] : x2[i];
    }
    stats[p] = energy_distance(a, w, b, w);
  }
  std::sort(stats.begin(), stats.end());
  const auto idx = static_cast<std::size_t>(std::ceil((1.0 - alpha) * permutations)) - 1;
  return stats[std::min(idx, stats.size() - 1)];
}

double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
  require(p.size() == q.size(), ErrorKind::invalid_parameter, "histogram size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, ErrorKind::invalid_parameter, "need at least two points");
  const double n = double(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  require(sxx > 0.0, ErrorKind::invalid_parameter, "degenerate abscissae");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

double median(std::vector<double> x) {
  require(!x.empty(), ErrorKind::invalid_parameter, "empty sample");
  const std::size_t h = x.size() / 2;
  std::nth_element(x.begin(), x.begin() + h, x.end());
  if (x.size() % 2) return x[h];
  const double hi = x[h];
  return 0.5 * (hi + *std::max_element(x.begin(), x.begin() + h));
}

}  // namespace gibbs
