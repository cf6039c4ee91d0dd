#pragma once

#include <cstdint>
#include <vector>

namespace gibbs {

struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

Estimate mean_se(const std::vector<double>& x);

/// Mean of a correlated series with SE from `batches` contiguous batch means.
Estimate batch_means(const std::vector<double>& x, int batches = 20);

/// Self-normalized weighted mean sum(w x)/sum(w) with delta-method SE.
/// Empty weights mean unit weights.
Estimate weighted_mean(const std::vector<double>& x, const std::vector<double>& w);

/// (sum w)^2 / sum w^2.
double effective_sample_size(const std::vector<double>& w);

/// sup |F1 - F2| of the weighted empirical CDFs.
double weighted_ks(const std::vector<double>& x1, const std::vector<double>& w1, const std::vector<double>& x2,
                   const std::vector<double>& w2);

/// Asymptotic two-sample KS critical value c(alpha) sqrt((n1+n2)/(n1 n2)).
double ks_threshold(double alpha, double n1, double n2);

/// One-dimensional energy distance 2 * integral (F1 - F2)^2 of weighted CDFs.
double energy_distance(const std::vector<double>& x1, const std::vector<double>& w1, const std::vector<double>& x2,
                       const std::vector<double>& w2);

/// (1 - alpha) quantile of the energy distance under random swaps within
/// pairs (x1[i], x2[i]), both carrying weight w[i].
double paired_energy_threshold(const std::vector<double>& x1, const std::vector<double>& x2,
                               const std::vector<double>& w, double alpha, int permutations, std::uint64_t seed);

/// Total-variation distance between two histograms given as bin masses.
double total_variation(const std::vector<double>& p, const std::vector<double>& q);

/// Least-squares slope and intercept of y on x.
struct LineFit {
  double slope;
  double intercept;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

double median(std::vector<double> x);

}  // namespace gibbs
