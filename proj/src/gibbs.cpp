#include "gibbs/gibbs.hpp"

#include <algorithm>
#include <cmath>

namespace gibbs {

namespace {

constexpr std::uint64_t kTagImportance = 1;
constexpr std::uint64_t kTagPcn = 2;
constexpr std::uint64_t kTagZ = 10;
constexpr std::uint64_t kTagR = 20;

double checked_weight(double energy) {
  require(std::isfinite(energy), ErrorKind::nonfinite_value, "potential energy is not finite");
  return std::exp(-energy);
}

// Trapezoid of V(|u|^2) times an optional window over uniformly spaced values.
double path_energy(const GridField& g, const Potential& V, const CutoffFn* chi, double h) {
  double s = 0.0;
  const std::size_t n = g.values.size();
  for (std::size_t j = 0; j < n; ++j) {
    const double c = chi ? (*chi)(g.points[j]) : 1.0;
    if (c == 0.0) continue;
    const double end = (j == 0 || j + 1 == n) ? 0.5 : 1.0;
    s += end * c * V(std::norm(g.values[j]));
  }
  return s * h;
}

std::vector<double> window_points(double half_width, double h) {
  const auto m = static_cast<std::size_t>(std::ceil(half_width / h - 1e-9));
  std::vector<double> x(2 * m + 1);
  const double step = m == 0 ? 0.0 : half_width / double(m);
  for (std::size_t j = 0; j <= 2 * m; ++j) x[j] = -half_width + step * double(j);
  return x;
}

}  // namespace

std::string_view to_string(Target t) {
  switch (t) {
    case Target::rho_L: return "rho_L";
    case Target::rho_L1: return "rho_L1";
    case Target::rho_L2: return "rho_L2";
    case Target::rho_L3: return "rho_L3";
  }
  return "?";
}

Target target_from_string(std::string_view name) {
  for (auto t : {Target::rho_L, Target::rho_L1, Target::rho_L2, Target::rho_L3})
    if (name == to_string(t)) return t;
  fail(ErrorKind::invalid_parameter, "unknown target '" + std::string(name) + "'");
}

double potential_energy(const SpectralField& f, const std::shared_ptr<const ProblemSpec>& spec) {
  return thread_engine(spec).potential_integral(f);
}

double potential_energy(const SpectralField& f, const CutoffFn& chi, const ProblemSpec& spec) {
  auto copy = std::make_shared<ProblemSpec>(spec);
  copy->chi = chi;
  return FlowEngine(copy).potential_integral(f);
}

std::vector<double> GibbsEnsemble::weight_vector() const {
  return weights ? *weights : std::vector<double>(samples.size(), 1.0);
}

GibbsEnsemble importance_ensemble(std::size_t n, std::shared_ptr<const ProblemSpec> spec, std::uint64_t seed) {
  require(n >= 1, ErrorKind::invalid_parameter, "n must be >= 1");
  spec->validate();
  GibbsEnsemble e;
  e.spec = spec;
  e.seed = seed;
  e.samples.assign(n, spec->zero_field());
  std::vector<double> w(n);
  parallel_for(n, [&](std::size_t i) {
    auto rng = make_engine(seed, i, kTagImportance);
    e.samples[i] = sample_xi_Lf(spec->L, spec->n_cut, spec->mode, rng);
    w[i] = checked_weight(potential_energy(e.samples[i], spec));
  });
  e.Z = mean_se(w);
  e.ess = effective_sample_size(w);
  if (e.ess < 0.01 * double(n)) e.warnings.push_back("degenerate-weights");
  e.weights = std::move(w);
  return e;
}

GibbsEnsemble pcn_sample(std::size_t n, double beta, std::shared_ptr<const ProblemSpec> spec, std::uint64_t seed,
                         std::size_t burn_in, std::size_t thin) {
  require(beta > 0.0 && beta <= 1.0, ErrorKind::invalid_parameter, "beta must lie in (0, 1]");
  require(n >= 1 && thin >= 1, ErrorKind::invalid_parameter, "n and thin must be >= 1");
  spec->validate();
  auto rng = make_engine(seed, 0, kTagPcn);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const Complex keep(std::sqrt(1.0 - beta * beta));
  SpectralField u = sample_xi_Lf(spec->L, spec->n_cut, spec->mode, rng);
  double phi = potential_energy(u, spec);
  GibbsEnsemble e;
  e.spec = spec;
  e.seed = seed;
  e.samples.reserve(n);
  std::size_t accepted = 0, proposed = 0;
  const std::size_t total = burn_in + n * thin;
  for (std::size_t it = 0; it < total; ++it) {
    SpectralField prop = sample_xi_Lf(spec->L, spec->n_cut, spec->mode, rng);
    prop *= Complex(beta);
    prop += keep * u;
    const double phi_prop = potential_energy(prop, spec);
    require(std::isfinite(phi_prop), ErrorKind::nonfinite_value, "potential energy is not finite");
    const bool accept = unif(rng) < std::exp(phi - phi_prop);
    if (accept) {
      u = std::move(prop);
      phi = phi_prop;
    }
    if (it >= burn_in) {
      ++proposed;
      accepted += accept;
      if ((it - burn_in + 1) % thin == 0) e.samples.push_back(u);
    }
  }
  e.acceptance = double(accepted) / double(proposed);
  if (e.acceptance < 0.01) e.warnings.push_back("mixing-failure");
  e.ess = double(e.samples.size());
  return e;
}

std::vector<double> z_weights(const std::shared_ptr<const ProblemSpec>& spec, std::size_t n, std::uint64_t seed,
                              Target which, const ZOptions& options) {
  require(n >= 1, ErrorKind::invalid_parameter, "n must be >= 1");
  spec->validate();
  std::vector<double> w(n, 1.0);
  if (spec->V.is_zero) return w;
  const auto tag = kTagZ + static_cast<std::uint64_t>(which);
  switch (which) {
    case Target::rho_L:
      parallel_for(n, [&](std::size_t i) {
        auto rng = make_engine(seed, i, tag);
        w[i] = checked_weight(potential_energy(sample_xi_Lf(spec->L, spec->n_cut, spec->mode, rng), spec));
      });
      break;
    case Target::rho_L1: {
      auto hi = std::make_shared<ProblemSpec>(*spec);
      hi->n_cut = std::max(options.n_hi, spec->n_cut);
      hi->grid_size = ProblemSpec::default_grid_size(hi->L, hi->n_cut);
      std::shared_ptr<const ProblemSpec> chi_spec = hi;
      parallel_for(n, [&](std::size_t i) {
        auto rng = make_engine(seed, i, tag);
        w[i] = checked_weight(potential_energy(sample_xi_Lf(hi->L, hi->n_cut, hi->mode, rng), chi_spec));
      });
      break;
    }
    case Target::rho_L2:
    case Target::rho_L3: {
      const bool sharp = which == Target::rho_L3;
      const double half = sharp ? spec->chi.R() : spec->chi.R_prime();
      if (half == 0.0) return w;
      const auto pts = window_points(half, options.ou_step);
      const double h = pts[1] - pts[0];
      parallel_for(n, [&](std::size_t i) {
        auto rng = make_engine(seed, i, tag);
        const auto g = sample_ou(pts, spec->mode, rng);
        w[i] = checked_weight(path_energy(g, spec->V, sharp ? nullptr : &spec->chi, h));
      });
      break;
    }
  }
  return w;
}

Estimate estimate_Z(const std::shared_ptr<const ProblemSpec>& spec, std::size_t n, std::uint64_t seed, Target which,
                    const ZOptions& options) {
  return mean_se(z_weights(spec, n, seed, which, options));
}

RChoice choose_R(double L, std::size_t n, std::uint64_t seed, const Potential& V, ValueMode mode, double C,
                 double ou_step) {
  require(L >= 1.0, ErrorKind::invalid_parameter, "choose_R needs L >= 1");
  require(n >= 2, ErrorKind::invalid_parameter, "choose_R needs n >= 2");
  std::vector<double> ladder{0.0};
  for (int j = 0; j <= 8; ++j) {
    const double R = std::ldexp(1.0, j) / 16.0;
    if (r_prime_for(R, L, C) < kPi * L) ladder.push_back(R);
  }
  const double top = ladder.back();
  const auto m = static_cast<std::size_t>(std::llround(top / ou_step));
  require(std::abs(double(m) * ou_step - top) < 1e-12 && m >= 1, ErrorKind::invalid_parameter,
          "OU step must divide the ladder");
  std::vector<double> pts(2 * m + 1);
  for (std::size_t j = 0; j <= 2 * m; ++j) pts[j] = -top + ou_step * double(j);

  // energy[i][r]: window integral for ladder entry r on path i.
  std::vector<std::vector<double>> energy(n, std::vector<double>(ladder.size(), 0.0));
  if (!V.is_zero) {
    parallel_for(n, [&](std::size_t i) {
      auto rng = make_engine(seed, i, kTagR);
      const auto g = sample_ou(pts, mode, rng);
      std::vector<double> f(pts.size());
      for (std::size_t j = 0; j < pts.size(); ++j) f[j] = V(std::norm(g.values[j]));
      for (std::size_t r = 1; r < ladder.size(); ++r) {
        const auto half = static_cast<std::size_t>(std::llround(ladder[r] / ou_step));
        double s = 0.0;
        for (std::size_t j = m - half; j < m + half; ++j) s += 0.5 * (f[j] + f[j + 1]);
        energy[i][r] = s * ou_step;
      }
    });
  }
  RChoice out{0.0, {1.0, 0.0}, {}};
  const double threshold = std::pow(L, -1.0 / 6.0);
  std::vector<double> w(n);
  for (std::size_t r = 0; r < ladder.size(); ++r) {
    for (std::size_t i = 0; i < n; ++i) w[i] = std::exp(-energy[i][r]);
    const auto z = mean_se(w);
    out.ladder.push_back({ladder[r], z});
  }
  for (const auto& e : out.ladder) {
    if (e.Z3.value - 2.0 * e.Z3.se < threshold - 1e-15) break;
    out.R = e.R;
    out.Z3 = e.Z3;
  }
  require(out.ladder.front().Z3.value >= threshold - 1e-15, ErrorKind::internal, "R = 0 fails the Z threshold");
  return out;
}

bool ZLadder::holds() const {
  return std::all_of(checks.begin(), checks.end(), [](const LemmaCheck& c) { return c.holds; });
}

ZLadder z_ladder(const std::shared_ptr<const ProblemSpec>& spec, std::size_t n, std::uint64_t seed, double sigmas,
                 const ZOptions& options) {
  ZLadder out;
  out.Z = estimate_Z(spec, n, seed, Target::rho_L, options);
  out.Z1 = estimate_Z(spec, n, seed + 1, Target::rho_L1, options);
  out.Z2 = estimate_Z(spec, n, seed + 2, Target::rho_L2, options);
  out.Z3 = estimate_Z(spec, n, seed + 3, Target::rho_L3, options);
  const double z = out.Z3.value;
  auto check = [&](std::string name, const Estimate& lhs, double c) {
    // rhs = z (1 - c z^{p}) with (c, p) in {(1, 2), (2, 1), (3, 1)}
    const double p = c == 1.0 ? 2.0 : 1.0;
    const double rhs = z * (1.0 - c * std::pow(z, p));
    const double slope = 1.0 - c * (p + 1.0) * std::pow(z, p);
    const double se = std::hypot(lhs.se, slope * out.Z3.se);
    out.checks.push_back({std::move(name), lhs.value, rhs, se, lhs.value - rhs >= -sigmas * se});
  };
  check("Z2 >= Z3(1-Z3^2)", out.Z2, 1.0);
  check("Z1 >= Z3(1-2 Z3)", out.Z1, 2.0);
  check("Z >= Z3(1-3 Z3)", out.Z, 3.0);
  return out;
}

}  // namespace gibbs
