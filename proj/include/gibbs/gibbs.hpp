#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gibbs/flow.hpp"
#include "gibbs/stats.hpp"

namespace gibbs {

/// rho_L: mu_L with the smooth cutoff; rho_L1: xi_L (no frequency cutoff,
/// proxied by a high cutoff) with the smooth cutoff; rho_L2: the OU field with
/// the smooth cutoff; rho_L3: the OU field on the sharp window [-R, R].
enum class Target { rho_L, rho_L1, rho_L2, rho_L3 };

std::string_view to_string(Target t);
Target target_from_string(std::string_view name);

/// Trapezoidal integral of chi V(|u|^2) over one period on the spec grid.
double potential_energy(const SpectralField& f, const std::shared_ptr<const ProblemSpec>& spec);
/// Same with an explicit cutoff replacing spec.chi.
double potential_energy(const SpectralField& f, const CutoffFn& chi, const ProblemSpec& spec);

struct GibbsEnsemble {
  std::vector<SpectralField> samples;
  std::optional<std::vector<double>> weights;  // importance mode only
  Target target = Target::rho_L;
  std::shared_ptr<const ProblemSpec> spec;
  std::uint64_t seed = 0;
  Estimate Z;  // importance mode only
  double ess = 0.0;
  double acceptance = 1.0;  // pCN only
  std::vector<std::string> warnings;

  /// Unit weights when sampled by MCMC.
  std::vector<double> weight_vector() const;
};

GibbsEnsemble importance_ensemble(std::size_t n, std::shared_ptr<const ProblemSpec> spec, std::uint64_t seed);

GibbsEnsemble pcn_sample(std::size_t n, double beta, std::shared_ptr<const ProblemSpec> spec, std::uint64_t seed,
                         std::size_t burn_in, std::size_t thin = 1);

struct ZOptions {
  int n_hi = 32;               // cutoff standing in for xi_L
  double ou_step = 1.0 / 64;   // OU path resolution
};

/// Monte-Carlo mean of the exponential weight of `which`. The smooth windows
/// use spec.chi; rho_L3 uses the sharp window [-chi.R(), chi.R()].
Estimate estimate_Z(const std::shared_ptr<const ProblemSpec>& spec, std::size_t n, std::uint64_t seed, Target which,
                    const ZOptions& options = {});

/// The raw weights behind estimate_Z, one per draw i (stream i of `seed`).
std::vector<double> z_weights(const std::shared_ptr<const ProblemSpec>& spec, std::size_t n, std::uint64_t seed,
                              Target which, const ZOptions& options = {});

struct RLadderEntry {
  double R;
  Estimate Z3;
};

struct RChoice {
  double R;
  Estimate Z3;
  std::vector<RLadderEntry> ladder;
};

/// Largest R on {0} U {2^j / 16 : j = 0..8} (with R + R' gap inside the
/// period) whose estimated Z_{L,3} - 2 SE stays >= L^{-1/6}. All R share the
/// same OU paths.
RChoice choose_R(double L, std::size_t n, std::uint64_t seed, const Potential& V, ValueMode mode,
                 double C = 100.0, double ou_step = 1.0 / 64);

struct LemmaCheck {
  std::string name;  // e.g. "Z2 >= Z3(1-Z3^2)"
  double lhs;
  double rhs;
  double se;  // combined, with the rhs SE propagated through its derivative in Z3
  bool holds;  // lhs - rhs >= -sigmas * se
};

struct ZLadder {
  Estimate Z, Z1, Z2, Z3;
  std::vector<LemmaCheck> checks;
  bool holds() const;
};

/// The four normalizations at the spec's window (independent streams per
/// target) and the three lower bounds on Z_{L,2}, Z_{L,1}, Z_L in terms of Z_{L,3}.
ZLadder z_ladder(const std::shared_ptr<const ProblemSpec>& spec, std::size_t n, std::uint64_t seed,
                 double sigmas = 3.0, const ZOptions& options = {});

}  // namespace gibbs
