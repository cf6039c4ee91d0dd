#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gibbs/gibbs.hpp"

namespace gibbs {

/// phi(x) = <x>^{-phi_power}, phi1(x) = <x>^{-phi1_power}.
struct WeightSpec {
  double phi_power = 2.0;
  double phi1_power = 2.0;
  double s = 0.25;
  double kappa = 0.0;
  bool bracket_factor = true;  // the <x>^{-1} in the H_phi norm

  double phi(double x) const { return std::pow(bracket(x), -phi_power); }
  double phi1(double x) const { return std::pow(bracket(x), -phi1_power); }
  void validate() const;
};

/// || <x>^{-1} phi D^{-kappa} f ||_{L^2} over one period.
double norm_Hphi(const SpectralField& f, const WeightSpec& w);
/// Grid version: uniform periodic grids only when kappa != 0.
double norm_Hphi(const GridField& f, const WeightSpec& w);

struct FracSobolev {
  double value;              // spectral || phi1 D^s u ||
  double gagliardo;          // double-integral seminorm^2 on the grid
  double spectral_seminorm;  // C_s 2 pi L sum |k/L|^{2s} |c_k|^2
  double relative_gap;       // |gagliardo - spectral_seminorm| / spectral_seminorm
  bool warning = false;      // relative_gap > 0.1
};

/// Spectral || phi1 D^s u ||_{L^2}. With cross_check, the unweighted
/// seminorm is also computed from grid increments and compared with its
/// Fourier identity.
FracSobolev frac_sobolev_weighted(const SpectralField& f, const WeightSpec& w, bool cross_check = true);

/// Multiplier exponent in the rate integrand: `sobolev` uses
/// (1+k^2)^{s/2-1/2} (the D^s norm); `literal` uses (1+k^2)^{s-1/2}.
enum class RateForm { sobolev, literal };

struct RateResult {
  std::vector<double> L;
  std::vector<double> values;
  double slope;
};

/// sqrt of (1/2pi) int |e^{ikx} m(k) - e^{i[k]_L x} m([k]_L)|^2 dk, [k]_L = ceil(kL)/L.
RateResult prop1_rate(double x, double s, const std::vector<double>& L_list, RateForm form = RateForm::sobolev);

struct ObservableResult {
  std::string name;
  double ks;
  double ks_threshold;
  double energy;
  double energy_threshold;
  bool pass;
};

struct InvarianceReport {
  std::vector<ObservableResult> observables;
  std::size_t n = 0;
  double ess = 0.0;
  double t_final = 0.0;
  double dt = 0.0;
  Scheme scheme = Scheme::midpoint;
  std::size_t failures = 0;
  double max_energy_drift = 0.0;  // max relative |H(t) - H(0)|
  double median_energy_drift = 0.0;
  double max_mass_drift = 0.0;
  bool valid = true;
  bool passed = false;
};

struct InvarianceOptions {
  Scheme scheme = Scheme::midpoint;
  double tol = 1e-12;
  double alpha = 0.01;
  int permutations = 400;
  double x0 = 0.0;
  WeightSpec weights;
};

inline const std::vector<std::string> kDefaultObservables{"re_u", "abs_u_sq", "mass", "energy", "norm_phi"};

InvarianceReport invariance_test(const std::shared_ptr<const ProblemSpec>& spec, std::size_t n, double t_final,
                                 double dt, std::uint64_t seed,
                                 const std::vector<std::string>& observables = kDefaultObservables,
                                 const InvarianceOptions& options = {});

/// Value of an invariance observable on one field.
double observable_value(const std::string& name, const SpectralField& u, FlowEngine& engine,
                        const InvarianceOptions& options);

struct MomentRow {
  double L;
  double R;
  double r;
  Estimate moment;
};

struct MomentTable {
  std::vector<MomentRow> rows;
  double max_min_ratio = 0.0;  // over L, worst r
  bool uniformity_flag = false;
  std::vector<std::string> warnings;
};

struct MomentOptions {
  int n_cut = 8;
  Potential V = Potential::power(2, 0.5);
  ValueMode mode = ValueMode::complex;
  double C = 100.0;
  std::size_t choose_R_n = 20000;
  std::optional<double> R;  // fixed R instead of choose_R
  int cross_checks = 5;     // samples per L run through the two-path check
};

MomentTable moment_uniformity(const std::vector<double>& L_list, const std::vector<double>& r_list,
                              const WeightSpec& w, std::size_t n, std::uint64_t seed,
                              const MomentOptions& options = {});

struct IncrementRow {
  double x;
  double y;
  Estimate moment;      // E |u(x) - u(y)|^r under rho_L3
  Estimate normalized;  // moment / |x - y|^{1 + r s}
};

struct IncrementTable {
  double R;
  std::vector<IncrementRow> rows;
  /// max normalized estimate over pairs sharing max(|x|,|y|).
  std::vector<std::pair<double, double>> envelope;
};

IncrementTable increment_moments(double R, double r, double s, const std::vector<std::pair<double, double>>& pairs,
                                 std::size_t n, std::uint64_t seed, const Potential& V, ValueMode mode,
                                 double h = 1.0 / 64);

struct HolderEstimate {
  double median;
  double ci_low;
  double ci_high;
  std::vector<double> per_sample;
};

/// Per-sample regression of log max |u(x + 2^j h) - u(x)| on log(2^j h) for
/// j < levels; uniform grids only.
HolderEstimate holder_exponent(const std::vector<GridField>& samples, int levels);

using Observable = std::function<double(const std::vector<double>& x, const std::vector<Complex>& u)>;

struct LadderObservable {
  std::string name;
  Observable F;
};

/// g(||u||_phi) and g(Re u(0)) with g = tanh, over the window the values cover.
std::vector<LadderObservable> default_ladder_observables(const WeightSpec& w = {});

struct LadderRow {
  double L;
  double R;
  std::string observable;
  Estimate II;   // rho_L3 vs rho_L2
  Estimate III;  // rho_L2 vs rho_L1
  Estimate IV;   // rho_L1 vs rho_L
  Estimate Z3;
};

struct LadderOptions {
  int n_cut = 8;
  int n_hi = 16;
  int refine = 4;  // fine lattice L' = refine L stands in for the line
  Potential V = Potential::power(2, 0.5);
  ValueMode mode = ValueMode::complex;
  double C = 100.0;
  std::size_t choose_R_n = 20000;
  std::optional<double> R;
};

std::vector<LadderRow> convergence_ladder(const std::vector<double>& L_list, std::size_t n, std::uint64_t seed,
                                          const std::vector<LadderObservable>& F_list,
                                          const LadderOptions& options = {});

/// Time-norm diagnostics on stored snapshots (t_i, u_i): the S_s norm over
/// the sampled time range (finite-difference d/dt) and sup_t <t>^{-p} ||u||_phi^2.
struct TrajectoryNorms {
  double S_s;
  double S;
};
TrajectoryNorms trajectory_norms(const std::vector<double>& t, const std::vector<SpectralField>& u,
                                 const WeightSpec& w, double s_time_power = 1.0, double S_time_power = 3.0);

}  // namespace gibbs
