#include "gibbs/diagnostics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>

#include "gibbs/quadrature.hpp"

namespace gibbs {

namespace {

std::size_t quadrature_size(const SpectralField& f) {
  return std::max<std::size_t>(16, 4 * std::bit_ceil(static_cast<std::size_t>(2 * f.max_mode() + 1)));
}

// Grid values of the field with coefficients multiplied by m(k/L).
GridField multiplied_grid(const SpectralField& f, double (*m)(double, double), double param, std::size_t M) {
  SpectralField g = f;
  for (int k = -f.max_mode(); k <= f.max_mode(); ++k) g[k] *= m(static_cast<double>(k) / f.L(), param);
  return evaluate_grid(g, M);
}

double bessel_multiplier(double xi, double power) { return std::pow(1.0 + xi * xi, 0.5 * power); }

Complex value_at(const SpectralField& f, double x) {
  Complex s{};
  for (int k = -f.max_mode(); k <= f.max_mode(); ++k) s += f[k] * std::polar(1.0, k * x / f.L());
  return s;
}

}  // namespace

void WeightSpec::validate() const {
  require(phi_power >= 0.0 && phi1_power >= 0.0, ErrorKind::invalid_parameter, "weight powers must be >= 0");
  require(s > 0.0 && s < 0.5, ErrorKind::invalid_parameter, "s must lie in (0, 1/2)");
  require(kappa >= 0.0, ErrorKind::invalid_parameter, "kappa must be >= 0");
}

double norm_Hphi(const SpectralField& f, const WeightSpec& w) {
  const auto g = multiplied_grid(f, bessel_multiplier, -w.kappa, quadrature_size(f));
  const double h = f.period() / double(g.points.size());
  double s = 0.0;
  for (std::size_t j = 0; j < g.points.size(); ++j) {
    const double x = g.points[j];
    const double weight = w.phi(x) / (w.bracket_factor ? bracket(x) : 1.0);
    s += weight * weight * std::norm(g.values[j]);
  }
  return std::sqrt(s * h);
}

double norm_Hphi(const GridField& f, const WeightSpec& w) {
  f.validate();
  const std::size_t n = f.points.size();
  require(n >= 2, ErrorKind::invalid_parameter, "grid needs at least two points");
  std::vector<Complex> values = f.values;
  if (w.kappa != 0.0) {
    require(f.period.has_value(), ErrorKind::unsupported, "D^{-kappa} needs a periodic grid");
    const int K = static_cast<int>((n - 1) / 2);
    SpectralGrid grid(*f.period / (2 * kPi), K, n);
    std::vector<Complex> c(2 * K + 1);
    grid.to_coeffs(values, c);
    for (int k = -K; k <= K; ++k) c[k + K] *= bessel_multiplier(k / grid.L(), -w.kappa);
    grid.to_grid(c, values);
  }
  // Trapezoid; a periodic grid closes on itself.
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double x = f.points[j];
    const double weight = w.phi(x) / (w.bracket_factor ? bracket(x) : 1.0);
    double cell;
    if (f.period) {
      cell = j + 1 < n ? f.points[j + 1] - x : f.points[0] + *f.period - x;
    } else {
      const double left = j > 0 ? x - f.points[j - 1] : 0.0;
      const double right = j + 1 < n ? f.points[j + 1] - x : 0.0;
      cell = 0.5 * (left + right);
    }
    s += weight * weight * std::norm(values[j]) * cell;
  }
  return std::sqrt(s);
}

FracSobolev frac_sobolev_weighted(const SpectralField& f, const WeightSpec& w, bool cross_check) {
  w.validate();
  const double s = w.s;
  const double L = f.L();
  const std::size_t M = quadrature_size(f);
  const auto g = multiplied_grid(f, bessel_multiplier, s, M);
  const double h = f.period() / double(M);
  double acc = 0.0;
  for (std::size_t j = 0; j < M; ++j) {
    const double p = w.phi1(g.points[j]);
    acc += p * p * std::norm(g.values[j]);
  }
  FracSobolev out{std::sqrt(acc * h), 0.0, 0.0, 0.0, false};
  if (!cross_check) return out;

  // Fourier side: the seminorm of e^{ikx/L} is C_s |k/L|^{2s} times its L^2 mass.
  const double c_s = 2.0 * std::tgamma(1.0 - 2.0 * s) * std::cos(kPi * s) / s;
  double spectral = 0.0;
  for (int k = -f.max_mode(); k <= f.max_mode(); ++k)
    if (k != 0) spectral += std::pow(std::abs(k / L), 2.0 * s) * std::norm(f[k]);
  out.spectral_seminorm = c_s * f.period() * spectral;

  // Increment side: int_period int_R |u(x) - u(x + t)|^2 |t|^{-1-2s} dt dx from grid
  // values. Shifts t = m h use the midpoint rule on cells [(m - 1/2) h, (m + 1/2) h];
  // the cell (0, h/2) uses u' from central differences; beyond `periods` periods
  // the increment energy is replaced by its mean over a period.
  const auto u = evaluate_grid(f, M);
  std::vector<double> shift_energy(M, 0.0);
  for (std::size_t m = 0; m < M; ++m) {
    double e = 0.0;
    for (std::size_t j = 0; j < M; ++j) e += std::norm(u.values[j] - u.values[(j + m) % M]);
    shift_energy[m] = e * h;
  }
  double near = 0.0;
  for (std::size_t j = 0; j < M; ++j) {
    const Complex d = (u.values[(j + 1) % M] - u.values[(j + M - 1) % M]) / (2.0 * h);
    near += std::norm(d) * h;
  }
  near *= std::pow(0.5 * h, 2.0 - 2.0 * s) / (2.0 - 2.0 * s);
  const int periods = 64;
  double body = 0.0;
  for (int p = 0; p < periods; ++p)
    for (std::size_t m = (p == 0 ? 1 : 0); m < M; ++m) {
      const double t = (double(p) * double(M) + double(m)) * h;
      body += shift_energy[m] * std::pow(t, -1.0 - 2.0 * s) * h;
    }
  double mean_energy = 0.0;
  for (double e : shift_energy) mean_energy += e;
  mean_energy /= double(M);
  const double far = (periods * f.period()) - 0.5 * h;
  const double tail = mean_energy * std::pow(far, -2.0 * s) / (2.0 * s);
  out.gagliardo = 2.0 * (near + body + tail);
  const double denom = std::max(out.spectral_seminorm, 1e-300);
  out.relative_gap = std::abs(out.gagliardo - out.spectral_seminorm) / denom;
  out.warning = out.spectral_seminorm > 0.0 && out.relative_gap > 0.1;
  return out;
}

namespace {

struct RateIntegrand {
  double x;
  double L;
  double e;  // m(k) = (1 + k^2)^{-e}

  double m(double k) const { return std::pow(1.0 + k * k, -e); }
  double operator()(double k, double q) const {
    const double a = m(k), b = m(q);
    return a * a + b * b - 2.0 * a * b * std::cos((q - k) * x);
  }
};

// int_{K0}^inf (1 + k^2)^{-beta} dk by the binomial series in k^{-2}.
double power_tail(double K0, double beta) {
  double sum = 0.0, coeff = 1.0;
  for (int j = 0; j < 200; ++j) {
    const double term = coeff * std::pow(K0, 1.0 - 2.0 * beta - 2.0 * j) / (2.0 * beta + 2.0 * j - 1.0);
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    coeff *= -(beta + j) / (j + 1.0);
  }
  return sum;
}

double rate_variance(const RateIntegrand& f, double K0, const GaussRule& rule) {
  const auto cells = static_cast<long>(std::llround(K0 * f.L));
  double body = 0.0;
  // Cells ((n-1)/L, n/L] on which [k]_L = n/L, for n = -cells+1 .. cells.
  for (long n = -cells + 1; n <= cells; ++n) {
    const double q = double(n) / f.L;
    const double a = double(n - 1) / f.L;
    const double half = 0.5 / f.L;
    double cell = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) cell += rule.weights[i] * f(a + half * (1.0 + rule.nodes[i]), q);
    body += cell * half;
  }
  // Tails |k| > K0: with delta = [k]_L - k uniform on [0, 1/L), the mean of
  // 2 (1 - cos(delta x)) multiplies int m^2, and m'(k)^2 delta^2 adds the
  // slope term. Odd first-order corrections cancel between the two sides.
  const double u = f.x / f.L;
  const double oscill = u == 0.0 ? 0.0 : 2.0 * (1.0 - std::sin(u) / u);
  const double lead = oscill == 0.0 ? 0.0 : 2.0 * power_tail(K0, 2.0 * f.e) * oscill;
  const double slope = 2.0 * 4.0 * f.e * f.e * std::pow(K0, -4.0 * f.e - 1.0) / (4.0 * f.e + 1.0) / (3.0 * f.L * f.L);
  return (body + lead + slope) / (2.0 * kPi);
}

}  // namespace

RateResult prop1_rate(double x, double s, const std::vector<double>& L_list, RateForm form) {
  require(s < 0.5, ErrorKind::invalid_parameter, "s must be < 1/2");
  require(L_list.size() >= 2, ErrorKind::invalid_parameter, "need at least two L values");
  const double e = form == RateForm::sobolev ? 0.5 * (1.0 - s) : 0.5 - s;
  if (4.0 * e <= 1.0 && x != 0.0)
    fail(ErrorKind::accuracy, "rate integral diverges: (1+k^2)^{-2e} is not integrable for this s");
  const auto rule = gauss_legendre(8);
  RateResult out;
  std::vector<double> lx, ly;
  for (double L : L_list) {
    require(L > 0.0, ErrorKind::invalid_parameter, "L must be positive");
    const RateIntegrand f{x, L, e};
    const double K0 = 256.0;
    const double v1 = rate_variance(f, K0, rule);
    const double v2 = rate_variance(f, 2.0 * K0, rule);
    if (!(std::abs(v1 - v2) <= 1e-6 * std::abs(v2)))
      fail(ErrorKind::accuracy, "rate quadrature did not converge under tail doubling");
    out.L.push_back(L);
    out.values.push_back(std::sqrt(v2));
    lx.push_back(std::log(L));
    ly.push_back(std::log(out.values.back()));
  }
  out.slope = fit_line(lx, ly).slope;
  return out;
}

double observable_value(const std::string& name, const SpectralField& u, FlowEngine& engine,
                        const InvarianceOptions& options) {
  if (name == "re_u") return value_at(u, options.x0).real();
  if (name == "abs_u_sq") return std::norm(value_at(u, options.x0));
  if (name == "mass") return engine.conserved(u).M;
  if (name == "energy") return engine.conserved(u).H;
  if (name == "norm_phi") return norm_Hphi(u, options.weights);
  if (name == "frac_sobolev") return frac_sobolev_weighted(u, options.weights, false).value;
  fail(ErrorKind::invalid_parameter, "unknown observable '" + name + "'");
}

InvarianceReport invariance_test(const std::shared_ptr<const ProblemSpec>& spec, std::size_t n, double t_final,
                                 double dt, std::uint64_t seed, const std::vector<std::string>& observables,
                                 const InvarianceOptions& options) {
  require(spec->mode == ValueMode::complex && spec->J == JKind::multiply_i, ErrorKind::unsupported,
          "the truncated Gibbs measure is invariant only for the complex flow with J = i");
  require(!observables.empty(), ErrorKind::invalid_parameter, "no observables requested");
  {
    FlowEngine probe(spec);
    for (const auto& name : observables) observable_value(name, spec->zero_field(), probe, options);
  }
  const auto ens = importance_ensemble(n, spec, seed);
  const std::size_t k = observables.size();
  std::vector<std::vector<double>> before(k, std::vector<double>(n)), after(k, std::vector<double>(n));
  std::vector<char> ok(n, 1);
  std::vector<double> drift_H(n, 0.0), drift_M(n, 0.0);
  FlowOptions flow_options{options.scheme, options.tol, false, 1};
  parallel_for(n, [&](std::size_t i) {
    FlowEngine& engine = thread_engine(spec);
    const SpectralField& u0 = ens.samples[i];
    for (std::size_t o = 0; o < k; ++o) before[o][i] = observable_value(observables[o], u0, engine, options);
    try {
      const auto res = flow_to(engine, FlowState{u0, 0.0, spec}, t_final, dt, flow_options);
      const auto c0 = engine.conserved(u0);
      const auto c1 = engine.conserved(res.state.field);
      require(std::isfinite(c1.H) && std::isfinite(c1.M), ErrorKind::nonfinite_value, "state blew up");
      drift_H[i] = std::abs(c1.H - c0.H) / std::max(1.0, std::abs(c0.H));
      drift_M[i] = std::abs(c1.M - c0.M) / std::max(1e-300, c0.M);
      for (std::size_t o = 0; o < k; ++o)
        after[o][i] = observable_value(observables[o], res.state.field, engine, options);
    } catch (const Error&) {
      ok[i] = 0;
    }
  });

  InvarianceReport rep;
  rep.n = n;
  rep.t_final = t_final;
  rep.dt = dt;
  rep.scheme = options.scheme;
  std::vector<double> w, drifts;
  for (std::size_t i = 0; i < n; ++i) {
    if (!ok[i]) {
      ++rep.failures;
      continue;
    }
    w.push_back((*ens.weights)[i]);
    drifts.push_back(drift_H[i]);
    rep.max_energy_drift = std::max(rep.max_energy_drift, drift_H[i]);
    rep.max_mass_drift = std::max(rep.max_mass_drift, drift_M[i]);
  }
  if (!drifts.empty()) rep.median_energy_drift = median(drifts);
  rep.valid = double(rep.failures) <= 0.01 * double(n) && !w.empty();
  rep.ess = effective_sample_size(w);
  bool all = rep.valid;
  for (std::size_t o = 0; o < k; ++o) {
    std::vector<double> a, b;
    for (std::size_t i = 0; i < n; ++i)
      if (ok[i]) {
        a.push_back(before[o][i]);
        b.push_back(after[o][i]);
      }
    ObservableResult r{observables[o], 0.0, 0.0, 0.0, 0.0, false};
    if (!a.empty()) {
      r.ks = weighted_ks(a, w, b, w);
      r.ks_threshold = ks_threshold(options.alpha, rep.ess, rep.ess);
      r.energy = energy_distance(a, w, b, w);
      r.energy_threshold = paired_energy_threshold(a, b, w, options.alpha, options.permutations, seed + o);
      r.pass = r.ks <= r.ks_threshold && r.energy <= r.energy_threshold;
    }
    all = all && r.pass;
    rep.observables.push_back(r);
  }
  rep.passed = all;
  return rep;
}

namespace {

std::shared_ptr<ProblemSpec> windowed_spec(double L, int n_cut, const Potential& V, ValueMode mode, double R,
                                           double C) {
  auto spec = std::make_shared<ProblemSpec>();
  spec->L = L;
  spec->n_cut = n_cut;
  spec->V = V;
  spec->mode = mode;
  spec->chi = build_chi(R, r_prime_for(R, L, C));
  spec->grid_size = ProblemSpec::default_grid_size(L, n_cut);
  spec->validate();
  return spec;
}

// Trapezoid of f over [a, b] on sorted nodes x, interpolating at a and b.
double window_integral(const std::vector<double>& x, const std::vector<double>& f, double a, double b) {
  if (b <= a) return 0.0;
  double s = 0.0;
  for (std::size_t j = 0; j + 1 < x.size(); ++j) {
    const double lo = std::max(a, x[j]), hi = std::min(b, x[j + 1]);
    if (hi <= lo) continue;
    const double slope = (f[j + 1] - f[j]) / (x[j + 1] - x[j]);
    const double flo = f[j] + slope * (lo - x[j]), fhi = f[j] + slope * (hi - x[j]);
    s += 0.5 * (flo + fhi) * (hi - lo);
  }
  return s;
}

// Delta-method SE of the difference of two self-normalized means on the same draws.
Estimate ratio_difference(const std::vector<double>& Fa, const std::vector<double>& wa, const std::vector<double>& Fb,
                          const std::vector<double>& wb) {
  const std::size_t n = Fa.size();
  double swa = 0, swb = 0, sa = 0, sb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    swa += wa[i];
    swb += wb[i];
    sa += wa[i] * Fa[i];
    sb += wb[i] * Fb[i];
  }
  const double A = sa / swa, B = sb / swb;
  std::vector<double> psi(n);
  for (std::size_t i = 0; i < n; ++i)
    psi[i] = wa[i] * (Fa[i] - A) / (swa / double(n)) - wb[i] * (Fb[i] - B) / (swb / double(n));
  return {A - B, mean_se(psi).se};
}

}  // namespace

MomentTable moment_uniformity(const std::vector<double>& L_list, const std::vector<double>& r_list,
                              const WeightSpec& w, std::size_t n, std::uint64_t seed, const MomentOptions& options) {
  w.validate();
  require(!L_list.empty() && !r_list.empty(), ErrorKind::invalid_parameter, "empty L or r list");
  for (double r : r_list) require(r >= 2.0, ErrorKind::invalid_parameter, "moment order must be >= 2");
  MomentTable table;
  for (std::size_t li = 0; li < L_list.size(); ++li) {
    const double L = L_list[li];
    const double R = options.R ? *options.R
                               : choose_R(L, options.choose_R_n, seed + 1000 + li, options.V, options.mode, options.C).R;
    auto spec = windowed_spec(L, options.n_cut, options.V, options.mode, R, options.C);
    const auto ens = importance_ensemble(n, spec, seed + li);
    for (const auto& warn : ens.warnings) table.warnings.push_back(warn + " at L=" + std::to_string(L));
    std::vector<double> norm(n);
    parallel_for(n, [&](std::size_t i) { norm[i] = frac_sobolev_weighted(ens.samples[i], w, false).value; });
    for (int c = 0; c < options.cross_checks && c < static_cast<int>(n); ++c)
      if (frac_sobolev_weighted(ens.samples[c], w, true).warning)
        table.warnings.push_back("discretization-warning at L=" + std::to_string(L));
    for (double r : r_list) {
      std::vector<double> p(n);
      for (std::size_t i = 0; i < n; ++i) p[i] = std::pow(norm[i], r);
      table.rows.push_back({L, R, r, weighted_mean(p, *ens.weights)});
    }
  }
  for (double r : r_list) {
    std::vector<double> est;
    for (const auto& row : table.rows)
      if (row.r == r) est.push_back(row.moment.value);
    const double lo = *std::min_element(est.begin(), est.end());
    const double hi = *std::max_element(est.begin(), est.end());
    table.max_min_ratio = std::max(table.max_min_ratio, hi / lo);
    const double med = median(est);
    for (double v : est)
      if (v > 2.0 * med) table.uniformity_flag = true;
  }
  return table;
}

IncrementTable increment_moments(double R, double r, double s, const std::vector<std::pair<double, double>>& pairs,
                                 std::size_t n, std::uint64_t seed, const Potential& V, ValueMode mode, double h) {
  require(s > 0.0 && s < 0.5, ErrorKind::invalid_parameter, "s must lie in (0, 1/2)");
  require(r >= 1.0, ErrorKind::invalid_parameter, "r must be >= 1");
  require(!pairs.empty(), ErrorKind::invalid_parameter, "no pairs");
  std::vector<double> pts;
  const auto cells = static_cast<std::size_t>(std::ceil(2.0 * R / h - 1e-9));
  for (std::size_t j = 0; j <= cells; ++j) pts.push_back(cells ? -R + 2.0 * R * double(j) / double(cells) : 0.0);
  for (const auto& [x, y] : pairs) {
    require(x != y, ErrorKind::invalid_parameter, "pairs need x != y");
    require(std::abs(x) <= R && std::abs(y) <= R, ErrorKind::invalid_parameter, "pair outside the window");
    pts.push_back(x);
    pts.push_back(y);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }),
            pts.end());
  auto index_of = [&](double x) {
    return static_cast<std::size_t>(std::lower_bound(pts.begin(), pts.end(), x - 1e-12) - pts.begin());
  };
  std::vector<std::pair<std::size_t, std::size_t>> idx;
  for (const auto& [x, y] : pairs) idx.emplace_back(index_of(x), index_of(y));

  std::vector<double> weights(n);
  std::vector<std::vector<double>> incr(pairs.size(), std::vector<double>(n));
  parallel_for(n, [&](std::size_t i) {
    auto rng = make_engine(seed, i, 40);
    const auto g = sample_ou(pts, mode, rng);
    std::vector<double> f(pts.size());
    for (std::size_t j = 0; j < pts.size(); ++j) f[j] = V(std::norm(g.values[j]));
    weights[i] = std::exp(-window_integral(pts, f, -R, R));
    for (std::size_t p = 0; p < idx.size(); ++p)
      incr[p][i] = std::pow(std::abs(g.values[idx[p].first] - g.values[idx[p].second]), r);
  });
  IncrementTable table{R, {}, {}};
  std::map<double, double> env;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto [x, y] = pairs[p];
    const auto m = weighted_mean(incr[p], weights);
    const double scale = std::pow(std::abs(x - y), 1.0 + r * s);
    const Estimate norm{m.value / scale, m.se / scale};
    table.rows.push_back({x, y, m, norm});
    const double key = std::max(std::abs(x), std::abs(y));
    env[key] = std::max(env[key], norm.value);
  }
  table.envelope.assign(env.begin(), env.end());
  return table;
}

HolderEstimate holder_exponent(const std::vector<GridField>& samples, int levels) {
  require(levels >= 3, ErrorKind::insufficient_levels, "need at least 3 dyadic levels");
  require(!samples.empty(), ErrorKind::invalid_parameter, "no samples");
  HolderEstimate out{};
  for (const auto& g : samples) {
    const std::size_t n = g.points.size();
    require(n >= 2 && (std::size_t(1) << (levels - 1)) < n / 2, ErrorKind::insufficient_levels,
            "grid too coarse for the requested levels");
    const double h = g.points[1] - g.points[0];
    for (std::size_t j = 1; j < n; ++j)
      require(std::abs(g.points[j] - g.points[j - 1] - h) <= 1e-9 * std::abs(h), ErrorKind::invalid_parameter,
              "holder_exponent needs a uniform grid");
    std::vector<double> lx, ly;
    for (int level = 0; level < levels; ++level) {
      const std::size_t step = std::size_t(1) << level;
      double m = 0.0;
      for (std::size_t j = 0; j + step < n; ++j) m = std::max(m, std::abs(g.values[j + step] - g.values[j]));
      if (m == 0.0) continue;
      lx.push_back(std::log(double(step) * h));
      ly.push_back(std::log(m));
    }
    // A constant field has no increments at any scale: count it as Lipschitz.
    out.per_sample.push_back(lx.size() >= 2 ? fit_line(lx, ly).slope : 1.0);
  }
  auto sorted = out.per_sample;
  std::sort(sorted.begin(), sorted.end());
  out.median = median(sorted);
  const double n = double(sorted.size());
  const auto lo = static_cast<long>(std::floor(0.5 * n - 0.98 * std::sqrt(n)));
  const auto hi = static_cast<long>(std::ceil(0.5 * n + 0.98 * std::sqrt(n)));
  out.ci_low = sorted[static_cast<std::size_t>(std::clamp(lo, 0L, long(n) - 1))];
  out.ci_high = sorted[static_cast<std::size_t>(std::clamp(hi, 0L, long(n) - 1))];
  return out;
}

std::vector<LadderObservable> default_ladder_observables(const WeightSpec& w) {
  std::vector<LadderObservable> out;
  out.push_back({"tanh_norm_phi", [w](const std::vector<double>& x, const std::vector<Complex>& u) {
                   double s = 0.0;
                   for (std::size_t j = 0; j < x.size(); ++j) {
                     const double weight = w.phi(x[j]) / (w.bracket_factor ? bracket(x[j]) : 1.0);
                     s += weight * weight * std::norm(u[j]);
                   }
                   return std::tanh(std::sqrt(s * (x[1] - x[0])));
                 }});
  out.push_back({"tanh_u0", [](const std::vector<double>& x, const std::vector<Complex>& u) {
                   const auto j = static_cast<std::size_t>(std::lower_bound(x.begin(), x.end(), -1e-12) - x.begin());
                   return std::tanh(u[j].real());
                 }});
  return out;
}

std::vector<LadderRow> convergence_ladder(const std::vector<double>& L_list, std::size_t n, std::uint64_t seed,
                                          const std::vector<LadderObservable>& F_list,
                                          const LadderOptions& options) {
  require(n >= 2 && !L_list.empty() && !F_list.empty(), ErrorKind::invalid_parameter, "empty ladder request");
  require(options.refine >= 2 && std::has_single_bit(static_cast<unsigned>(options.refine)),
          ErrorKind::invalid_parameter, "refine must be a power of two >= 2");
  require(options.n_hi >= options.n_cut, ErrorKind::invalid_parameter, "n_hi must be >= n_cut");
  std::vector<LadderRow> rows;
  const int m = options.refine;
  for (std::size_t li = 0; li < L_list.size(); ++li) {
    const double L = L_list[li];
    require(std::abs(L - std::round(L)) < 1e-12 && L >= 1, ErrorKind::invalid_parameter,
            "ladder L must be a positive integer");
    const double R = options.R ? *options.R
                               : choose_R(L, options.choose_R_n, seed + 2000 + li, options.V, options.mode, options.C).R;
    const auto chi = build_chi(R, r_prime_for(R, L, options.C));
    const double Lf = m * L;
    const int Kc = mode_cutoff(L, options.n_hi);
    const int Kf = mode_cutoff(Lf, options.n_hi);
    require(Kf == m * Kc, ErrorKind::invalid_parameter, "n_hi L must be an integer");
    const std::size_t Mc = ProblemSpec::default_grid_size(L, options.n_hi);
    const std::size_t Mf = static_cast<std::size_t>(m) * Mc;
    const std::size_t offset = (static_cast<std::size_t>(m) - 1) * Mc / 2;
    SpectralGrid coarse_probe(L, Kc, Mc);
    const auto x = coarse_probe.points();
    std::vector<double> chi_x(Mc);
    for (std::size_t j = 0; j < Mc; ++j) chi_x[j] = chi(x[j]);
    const double h = coarse_probe.spacing();

    const std::size_t nF = F_list.size();
    std::vector<std::vector<double>> F3(nF, std::vector<double>(n)), F1(nF, std::vector<double>(n)),
        F0(nF, std::vector<double>(n));
    std::vector<double> w3(n), w2(n), w1(n), w0(n);
    const double sd = 1.0 / std::sqrt(2.0 * kPi * Lf);
    parallel_for(n, [&](std::size_t i) {
      auto rng = make_engine(seed + li, i, 50);
      // Fine amplitudes for j in [-Kf - m + 1, Kf]; coarse mode q sums fine
      // modes j with (q-1)m < j <= qm, i.e. the cell ((q-1)/L, q/L].
      const int lo = -Kf - m + 1;
      std::vector<Complex> fine(static_cast<std::size_t>(Kf - lo + 1));
      for (auto& z : fine) z = sd * complex_normal(rng);
      std::vector<Complex> gf(fine.begin() + (-Kf - lo), fine.end());
      std::vector<Complex> gc(static_cast<std::size_t>(2 * Kc + 1));
      for (int q = -Kc; q <= Kc; ++q) {
        Complex s{};
        for (int j = (q - 1) * m + 1; j <= q * m; ++j) s += fine[static_cast<std::size_t>(j - lo)];
        gc[static_cast<std::size_t>(q + Kc)] = s;
      }
      const auto xi_fine = xi_from_amplitudes(Lf, options.n_hi, options.mode, gf);
      const auto xi_L = xi_from_amplitudes(L, options.n_hi, options.mode, gc);
      const auto xi_Lf = project_low(xi_L, options.n_cut);
      const auto vf_all = evaluate_grid(xi_fine, Mf);
      std::vector<Complex> vf(vf_all.values.begin() + offset, vf_all.values.begin() + offset + Mc);
      const auto vL = evaluate_grid(xi_L, Mc).values;
      const auto vLf = evaluate_grid(xi_Lf, Mc).values;
      auto smooth_energy = [&](const std::vector<Complex>& v) {
        double s = 0.0;
        for (std::size_t j = 0; j < Mc; ++j)
          if (chi_x[j] != 0.0) s += chi_x[j] * options.V(std::norm(v[j]));
        return s * h;
      };
      std::vector<double> Vf(Mc);
      for (std::size_t j = 0; j < Mc; ++j) Vf[j] = options.V(std::norm(vf[j]));
      w3[i] = std::exp(-window_integral(x, Vf, -R, R));
      w2[i] = std::exp(-smooth_energy(vf));
      w1[i] = std::exp(-smooth_energy(vL));
      w0[i] = std::exp(-smooth_energy(vLf));
      for (std::size_t f = 0; f < nF; ++f) {
        F3[f][i] = F_list[f].F(x, vf);
        F1[f][i] = F_list[f].F(x, vL);
        F0[f][i] = F_list[f].F(x, vLf);
      }
    });
    const auto z3 = mean_se(w3);
    for (std::size_t f = 0; f < nF; ++f) {
      LadderRow row{L, R, F_list[f].name, {}, {}, {}, z3};
      row.II = ratio_difference(F3[f], w3, F3[f], w2);
      row.III = ratio_difference(F3[f], w2, F1[f], w1);
      row.IV = ratio_difference(F1[f], w1, F0[f], w0);
      rows.push_back(row);
    }
  }
  return rows;
}

TrajectoryNorms trajectory_norms(const std::vector<double>& t, const std::vector<SpectralField>& u,
                                 const WeightSpec& w, double s_time_power, double S_time_power) {
  require(t.size() == u.size() && t.size() >= 2, ErrorKind::invalid_parameter, "need at least two snapshots");
  const std::size_t n = t.size();
  auto weighted = [&](const SpectralField& f) {
    const auto g = multiplied_grid(f, bessel_multiplier, w.s - w.kappa, quadrature_size(f));
    double s = 0.0;
    for (std::size_t j = 0; j < g.points.size(); ++j) s += std::pow(w.phi(g.points[j]), 2) * std::norm(g.values[j]);
    return s * f.period() / double(g.points.size());
  };
  std::vector<double> integrand(n);
  double S = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = i == 0 ? 0 : i - 1, b = i + 1 == n ? n - 1 : i + 1;
    SpectralField dt = u[b] - u[a];
    dt *= Complex(1.0 / (t[b] - t[a]));
    const double tw = std::pow(bracket(t[i]), -2.0 * s_time_power);
    integrand[i] = tw * (weighted(u[i]) + weighted(dt));
    const double nphi = norm_Hphi(u[i], w);
    S = std::max(S, std::pow(bracket(t[i]), -S_time_power) * nphi * nphi);
  }
  double Ss = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) Ss += 0.5 * (integrand[i] + integrand[i + 1]) * (t[i + 1] - t[i]);
  return {std::sqrt(Ss), std::sqrt(S)};
}

}  // namespace gibbs
