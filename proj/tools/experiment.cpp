#include "experiment.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "gibbs/diagnostics.hpp"
#include "gibbs/feynman_kac.hpp"
#include "gibbs/gibbs.hpp"
#include "gibbs/io.hpp"
#include "gibbs/variable_coeff.hpp"

namespace lab {

using namespace gibbs;
using Json = nlohmann::ordered_json;

namespace {

// Turns library validation errors raised while reading config values into
// config errors that name the offending key.
template <class F>
auto checked(const Config& c, const std::string& section, const std::string& key, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    c.reject(section, key, e.what());
  }
}

double positive(const Config& c, const std::string& section, const std::string& key) {
  const double v = c.number(section, key);
  if (!(v > 0.0)) c.reject(section, key, "must be positive");
  return v;
}

std::size_t count(const Config& c, const std::string& section, const std::string& key) {
  const long v = c.integer(section, key);
  if (v < 1) c.reject(section, key, "must be at least 1");
  return static_cast<std::size_t>(v);
}

Potential potential(const Config& c, const std::string& section) {
  const double p = c.number(section, "V_power");
  const double a = c.number(section, "V_coeff");
  return checked(c, section, "V_power", [&] { return Potential::power(p, a); });
}

std::shared_ptr<ProblemSpec> build_spec(const Config& c, std::uint64_t seed) {
  auto s = std::make_shared<ProblemSpec>();
  s->L = positive(c, "problem", "L");
  s->n_cut = static_cast<int>(count(c, "problem", "n_cut"));
  s->mode = checked(c, "problem", "mode", [&] { return value_mode_from_string(c.text("problem", "mode")); });
  s->J = checked(c, "problem", "J", [&] { return j_kind_from_string(c.text("problem", "J")); });
  s->V = potential(c, "problem");
  const double C = positive(c, "problem", "C");
  double R = 0.0;
  if (c.text("problem", "R") == "auto") {
    // Largest admissible window for this L, seeded apart from the experiment draws.
    R = checked(c, "problem", "R", [&] {
      return choose_R(s->L, count(c, "problem", "choose_R_n"), seed + 0x5eed, s->V, s->mode, C).R;
    });
  } else {
    R = c.number("problem", "R");
    if (R < 0.0) c.reject("problem", "R", "must be >= 0 or auto");
  }
  const double Rp = c.text("problem", "R_prime") == "auto" ? r_prime_for(R, s->L, C) : c.number("problem", "R_prime");
  s->chi = checked(c, "problem", "R_prime", [&] { return build_chi(R, Rp); });
  s->kappa = c.number("problem", "kappa");
  s->grid_size = c.text("problem", "grid_size") == "auto" ? ProblemSpec::default_grid_size(s->L, s->n_cut)
                                                           : count(c, "problem", "grid_size");
  try {
    s->validate();
  } catch (const Error& e) {
    throw ConfigError(c.origin() + ": [problem]: " + e.what());
  }
  return s;
}

WeightSpec weights(const Config& c) {
  WeightSpec w;
  w.phi_power = c.number("weights", "phi_power");
  w.phi1_power = c.number("weights", "phi1_power");
  w.s = c.number("weights", "s");
  w.kappa = c.number("problem", "kappa");
  checked(c, "weights", "s", [&] {
    w.validate();
    return 0;
  });
  return w;
}

Json estimate_json(const Estimate& e) { return Json{{"value", e.value}, {"se", e.se}}; }

class Run {
 public:
  Run(const std::string& sub, const Config& cfg) : cfg_(cfg), out_(cfg.text("run", "out")) {
    const long seed = cfg.integer("run", "seed");
    if (seed < 0) cfg.reject("run", "seed", "must be >= 0");
    prov_.seed = static_cast<std::uint64_t>(seed);
    prov_.config = cfg.resolved();
    // Where the artifacts go is not part of the experiment.
    prov_.config["run"].erase("out");
    prov_.config["subcommand"] = sub;
    prov_.config_hash = hex64(fnv1a(prov_.config.dump()));
    std::error_code ec;
    std::filesystem::create_directories(out_, ec);
    if (ec) cfg.reject("run", "out", "cannot create directory: " + ec.message());
  }

  const Config& cfg() const { return cfg_; }
  const Provenance& prov() const { return prov_; }
  std::uint64_t seed() const { return prov_.seed; }

  void write(const std::string& name, const std::string& body) const {
    std::ofstream os(out_ / name, std::ios::binary);
    os << body;
    if (!os) throw Error(ErrorKind::internal, "cannot write " + (out_ / name).string());
  }

  void write_json(const std::string& name, Json body) const {
    Json j;
    j["provenance"] = prov_.to_json();
    for (auto& [k, v] : body.items()) j[k] = v;
    write(name, j.dump(2) + "\n");
  }

  void status(const std::string& state, const std::string& message) const {
    write_json("status.json", Json{{"status", state}, {"message", message}});
  }

 private:
  const Config& cfg_;
  std::filesystem::path out_;
  Provenance prov_;
};

template <class Fn>
std::string csv(const Provenance& prov, Fn&& body) {
  std::ostringstream os;
  prov.write_csv_header(os);
  body(os);
  return os.str();
}

std::string fmt(double v) { return format_double(v); }

int cmd_sample(const Run& run) {
  const auto& c = run.cfg();
  auto spec = build_spec(c, run.seed());
  const auto n = count(c, "sample", "n");
  const auto sampler = c.text("sample", "sampler");
  GibbsEnsemble e;
  if (sampler == "importance") {
    e = importance_ensemble(n, spec, run.seed());
  } else if (sampler == "pcn") {
    const double beta = c.number("sample", "beta");
    if (!(beta > 0.0 && beta <= 1.0)) c.reject("sample", "beta", "must lie in (0, 1]");
    const long burn = c.integer("sample", "burn_in");
    if (burn < 0) c.reject("sample", "burn_in", "must be >= 0");
    e = pcn_sample(n, beta, spec, run.seed(), static_cast<std::size_t>(burn), count(c, "sample", "thin"));
  } else {
    c.reject("sample", "sampler", "expected importance or pcn");
  }
  std::ostringstream summary;
  write_ensemble_csv(summary, run.prov(), e);
  run.write("ensemble.csv", summary.str());
  if (c.flag("sample", "write_fields")) run.write("ensemble.json", ensemble_to_json(e, run.prov()).dump() + "\n");
  run.write_json("report.json", Json{{"sampler", sampler},
                                     {"spec", spec_to_json(*spec)},
                                     {"n", n},
                                     {"Z", estimate_json(e.Z)},
                                     {"ess", e.ess},
                                     {"acceptance", e.acceptance},
                                     {"warnings", e.warnings},
                                     {"passed", e.warnings.empty()}});
  return e.warnings.empty() ? kPass : kExperimentFailure;
}

int cmd_flow(const Run& run) {
  const auto& c = run.cfg();
  auto spec = build_spec(c, run.seed());
  const auto w = weights(c);
  const double dt = positive(c, "flow", "dt");
  const double t_final = c.number("flow", "t_final");
  if (t_final < 0.0) c.reject("flow", "t_final", "must be >= 0");
  FlowOptions opt;
  opt.scheme = checked(c, "flow", "scheme", [&] { return scheme_from_string(c.text("flow", "scheme")); });
  opt.tol = positive(c, "flow", "tol");
  const auto snaps = count(c, "flow", "snapshots");

  FlowState state{sample_xi_Lf(spec->L, spec->n_cut, spec->mode, run.seed()), 0.0, spec};
  auto& engine = thread_engine(spec);
  const auto q0 = engine.conserved(state.field);
  std::vector<TrajectoryRecord> records{{0.0, state.field, q0.H, q0.M}};
  std::vector<DriftRecord> history{{0.0, q0.H, q0.M}};
  int halvings = 0;
  for (std::size_t i = 1; i <= snaps && t_final > 0.0; ++i) {
    const double t = t_final * double(i) / double(snaps);
    auto r = flow_to(engine, state, t, dt, opt);
    halvings += r.halvings;
    state = r.state;
    history.insert(history.end(), r.history.begin() + (r.history.empty() ? 0 : 1), r.history.end());
    const auto q = engine.conserved(state.field);
    records.push_back({state.t, state.field, q.H, q.M});
  }
  double dH = 0.0, dM = 0.0;
  for (const auto& h : history) {
    dH = std::max(dH, std::abs(h.H - q0.H) / std::max(1.0, std::abs(q0.H)));
    dM = std::max(dM, std::abs(h.M - q0.M) / std::max(1.0, std::abs(q0.M)));
  }
  std::vector<double> ts;
  std::vector<SpectralField> us;
  for (const auto& r : records) {
    ts.push_back(r.t);
    us.push_back(r.field);
  }
  Json norms = nullptr;
  if (records.size() >= 3) {
    const auto tn = trajectory_norms(ts, us, w, c.number("weights", "s_time_power"), c.number("weights", "S_time_power"));
    norms = Json{{"S_s", tn.S_s}, {"S", tn.S}};
  }
  std::ostringstream traj, drift;
  write_trajectory_jsonl(traj, run.prov(), *spec, records);
  write_drift_csv(drift, run.prov(), history);
  run.write("trajectory.jsonl", traj.str());
  run.write("drift.csv", drift.str());
  run.write_json("report.json", Json{{"spec", spec_to_json(*spec)},
                                     {"scheme", to_string(opt.scheme)},
                                     {"dt", dt},
                                     {"t_final", t_final},
                                     {"halvings", halvings},
                                     {"max_relative_energy_drift", dH},
                                     {"max_relative_mass_drift", dM},
                                     {"trajectory_norms", norms},
                                     {"passed", true}});
  return kPass;
}

int cmd_invariance(const Run& run) {
  const auto& c = run.cfg();
  auto spec = build_spec(c, run.seed());
  InvarianceOptions opt;
  opt.weights = weights(c);
  opt.scheme = checked(c, "flow", "scheme", [&] { return scheme_from_string(c.text("flow", "scheme")); });
  opt.tol = positive(c, "flow", "tol");
  opt.alpha = positive(c, "invariance", "alpha");
  opt.permutations = static_cast<int>(count(c, "invariance", "permutations"));
  opt.x0 = c.number("invariance", "x0");
  const double dt = positive(c, "flow", "dt");
  const double t_final = c.number("flow", "t_final");
  if (t_final < 0.0) c.reject("flow", "t_final", "must be >= 0");
  const auto expect = c.text("invariance", "expect");
  if (expect != "pass" && expect != "fail") c.reject("invariance", "expect", "expected pass or fail");
  const double drift_max = positive(c, "invariance", "max_energy_drift");
  const auto obs = c.words("invariance", "observables");
  for (const auto& o : obs) {
    const std::vector<std::string> known{"re_u", "abs_u_sq", "mass", "energy", "norm_phi", "frac_sobolev"};
    if (std::find(known.begin(), known.end(), o) == known.end())
      c.reject("invariance", "observables", "unknown observable '" + o + "'");
  }
  const auto rep = checked(c, "problem", "J", [&] {
    return invariance_test(spec, count(c, "invariance", "n"), t_final, dt, run.seed(), obs, opt);
  });

  const bool tests_pass = rep.passed && rep.valid;
  const bool drift_ok = rep.max_energy_drift <= drift_max;
  // A negative control succeeds when the statistics reject the flow.
  const bool ok = expect == "pass" ? tests_pass && drift_ok : !tests_pass;
  run.write("invariance.csv", csv(run.prov(), [&](std::ostream& os) {
              os << "observable,ks,ks_threshold,energy,energy_threshold,pass\n";
              for (const auto& o : rep.observables)
                os << o.name << ',' << fmt(o.ks) << ',' << fmt(o.ks_threshold) << ',' << fmt(o.energy) << ','
                   << fmt(o.energy_threshold) << ',' << (o.pass ? 1 : 0) << '\n';
            }));
  Json per = Json::array();
  for (const auto& o : rep.observables)
    per.push_back(Json{{"name", o.name},
                       {"ks", o.ks},
                       {"ks_threshold", o.ks_threshold},
                       {"energy", o.energy},
                       {"energy_threshold", o.energy_threshold},
                       {"pass", o.pass}});
  run.write_json("report.json", Json{{"spec", spec_to_json(*spec)},
                                     {"n", rep.n},
                                     {"ess", rep.ess},
                                     {"t_final", rep.t_final},
                                     {"dt", rep.dt},
                                     {"scheme", to_string(rep.scheme)},
                                     {"observables", per},
                                     {"failures", rep.failures},
                                     {"max_energy_drift", rep.max_energy_drift},
                                     {"max_mass_drift", rep.max_mass_drift},
                                     {"statistics_pass", tests_pass},
                                     {"drift_ok", drift_ok},
                                     {"expect", expect},
                                     {"passed", ok}});
  return ok ? kPass : kExperimentFailure;
}

int cmd_rate(const Run& run) {
  const auto& c = run.cfg();
  const auto xs = c.numbers("rate", "x_list");
  const auto Ls = c.numbers("rate", "L_list");
  const double s = c.number("rate", "s");
  const auto form_name = c.text("rate", "form");
  RateForm form = RateForm::sobolev;
  if (form_name == "literal")
    form = RateForm::literal;
  else if (form_name != "sobolev")
    c.reject("rate", "form", "expected sobolev or literal");
  const double lo = c.number("rate", "slope_min"), hi = c.number("rate", "slope_max");

  std::vector<RateResult> results;
  for (double x : xs) results.push_back(checked(c, "rate", "x_list", [&] { return prop1_rate(x, s, Ls, form); }));
  // One global constant with value <= C L^{-1} <x>.
  double C = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = 0; j < Ls.size(); ++j)
      C = std::max(C, results[i].values[j] * Ls[j] / bracket(xs[i]));
  bool ok = true;
  Json slopes = Json::array();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const bool in = results[i].slope >= lo && results[i].slope <= hi;
    ok = ok && in;
    slopes.push_back(Json{{"x", xs[i]}, {"slope", results[i].slope}, {"in_band", in}});
  }
  run.write("rate.csv", csv(run.prov(), [&](std::ostream& os) {
              os << "x,L,value,bound\n";
              for (std::size_t i = 0; i < xs.size(); ++i)
                for (std::size_t j = 0; j < Ls.size(); ++j)
                  os << fmt(xs[i]) << ',' << fmt(Ls[j]) << ',' << fmt(results[i].values[j]) << ','
                     << fmt(C * bracket(xs[i]) / Ls[j]) << '\n';
            }));
  run.write_json("report.json", Json{{"s", s},
                                     {"form", form_name},
                                     {"C", C},
                                     {"slopes", slopes},
                                     {"slope_band", {lo, hi}},
                                     {"passed", ok}});
  return ok ? kPass : kExperimentFailure;
}

int cmd_oracle(const Run& run) {
  const auto& c = run.cfg();
  const double R = positive(c, "oracle", "R");
  const double x = c.number("oracle", "x");
  const auto V = potential(c, "oracle");
  const auto n = count(c, "oracle", "n");
  const auto rs = c.numbers("oracle", "r_list");
  const double h = positive(c, "oracle", "h");
  const auto bins = count(c, "oracle", "bins");
  const double range = positive(c, "oracle", "bin_range");
  const double tv_max = positive(c, "oracle", "tv_max");
  const double sigmas = positive(c, "oracle", "sigmas");
  const auto grid = checked(c, "oracle", "du", [&] {
    return StateGrid::make(c.number("oracle", "u_max"), c.number("oracle", "du"));
  });
  if (range >= grid.u_max) c.reject("oracle", "bin_range", "must be below u_max");
  for (double r : rs)
    if (r < 2.0) c.reject("oracle", "r_list", "moment orders must be >= 2");

  const auto p = checked(c, "oracle", "x", [&] { return marginal_rho3(R, x, V, grid); });
  const auto mc = mc_rho3_values(R, x, V, n, run.seed(), h);

  // Bins over [-range, range] plus the two tails.
  std::vector<double> edges{-grid.u_max};
  for (std::size_t b = 0; b <= bins; ++b) edges.push_back(-range + 2.0 * range * double(b) / double(bins));
  edges.push_back(grid.u_max);
  const auto pt = p.bin_masses(edges);
  std::vector<double> pm(edges.size() - 1, 0.0);
  double wsum = 0.0;
  for (std::size_t i = 0; i < mc.values.size(); ++i) {
    const double u = mc.values[i];
    std::size_t b = 0;
    if (u >= range)
      b = pm.size() - 1;
    else if (u >= -range)
      b = 1 + std::min(bins - 1, static_cast<std::size_t>((u + range) / (2.0 * range) * double(bins)));
    pm[b] += mc.weights[i];
    wsum += mc.weights[i];
  }
  double tv = 0.0;
  for (std::size_t b = 0; b < pm.size(); ++b) tv += 0.5 * std::abs(pt[b] - pm[b] / wsum);

  Json moments = Json::array();
  bool moments_ok = true;
  std::vector<std::vector<double>> moment_rows;
  for (double r : rs) {
    std::vector<double> f(mc.values.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::pow(std::abs(mc.values[i]), r);
    const auto e = weighted_mean(f, mc.weights);
    const double m = p.moment(r);
    const bool agree = std::abs(m - e.value) <= sigmas * e.se;
    moments_ok = moments_ok && agree;
    moments.push_back(Json{{"r", r}, {"transfer", m}, {"mc", estimate_json(e)}, {"agree", agree}});
    moment_rows.push_back({r, m, e.value, e.se});
  }
  const double free_m2 = moment_under_rho3(2.0, x, R, Potential::zero(), grid);
  const bool free_ok = std::abs(free_m2 - 0.5) <= 1e-3;

  const auto g0 = ground_state(SchrodingerOp::build(grid, Potential::zero()));
  double overlap = 0.0, gnorm = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double gauss = std::exp(-0.5 * grid.u[i] * grid.u[i]);
    overlap += g0.omega[i] * gauss * grid.du;
    gnorm += gauss * gauss * grid.du;
  }
  overlap = std::abs(overlap) / std::sqrt(gnorm);
  const auto gv = ground_state(SchrodingerOp::build(grid, V));
  const bool ground_ok = overlap >= 1.0 - 1e-6 && gv.E1 - gv.E > 0.0;

  const bool ok = tv <= tv_max && moments_ok && free_ok && ground_ok;
  run.write("oracle_density.csv", csv(run.prov(), [&](std::ostream& os) {
              os << "u,density\n";
              for (std::size_t i = 0; i < grid.size(); ++i) os << fmt(grid.u[i]) << ',' << fmt(p.density[i]) << '\n';
            }));
  run.write("oracle_histogram.csv", csv(run.prov(), [&](std::ostream& os) {
              os << "lo,hi,transfer,mc\n";
              for (std::size_t b = 0; b < pm.size(); ++b)
                os << fmt(edges[b]) << ',' << fmt(edges[b + 1]) << ',' << fmt(pt[b]) << ',' << fmt(pm[b] / wsum)
                   << '\n';
            }));
  std::ostringstream mcsv;
  write_table_csv(mcsv, run.prov(), {"r", "transfer", "mc", "mc_se"}, moment_rows);
  run.write("oracle_moments.csv", mcsv.str());
  run.write_json("report.json", Json{{"R", R},
                                     {"x", x},
                                     {"V", V.name},
                                     {"n", n},
                                     {"tv", tv},
                                     {"tv_max", tv_max},
                                     {"moments", moments},
                                     {"free_r2_moment", free_m2},
                                     {"ground_state",
                                      Json{{"E0_free", g0.E},
                                           {"overlap_defect", 1.0 - overlap},
                                           {"E0_V", gv.E},
                                           {"E1_V", gv.E1},
                                           {"gap_V", gv.E1 - gv.E}}},
                                     {"passed", ok}});
  return ok ? kPass : kExperimentFailure;
}

int cmd_zladder(const Run& run) {
  const auto& c = run.cfg();
  auto base = build_spec(c, run.seed());
  const auto Ls = c.numbers("zladder", "L_list");
  for (double L : Ls)
    if (L < 1.0) c.reject("zladder", "L_list", "every L must be >= 1");
  const auto n = count(c, "zladder", "n");
  const auto nR = count(c, "zladder", "choose_R_n");
  const double sigmas = positive(c, "zladder", "sigmas");
  ZOptions zopt{static_cast<int>(count(c, "zladder", "n_hi")), positive(c, "zladder", "ou_step")};
  const double C = positive(c, "problem", "C");

  bool ok = true;
  Json rows = Json::array();
  std::vector<std::vector<double>> table;
  for (std::size_t i = 0; i < Ls.size(); ++i) {
    const double L = Ls[i];
    const auto choice =
        checked(c, "zladder", "ou_step", [&] { return choose_R(L, nR, run.seed() + i, base->V, base->mode, C, zopt.ou_step); });
    auto spec = std::make_shared<ProblemSpec>(*base);
    spec->L = L;
    spec->chi = build_chi(choice.R, r_prime_for(choice.R, L, C));
    spec->grid_size = ProblemSpec::default_grid_size(L, spec->n_cut);
    spec->validate();
    const auto z = z_ladder(spec, n, run.seed() + 1000 * (i + 1), sigmas, zopt);
    const double threshold = std::pow(L, -1.0 / 6.0);
    ok = ok && z.holds();
    Json checks = Json::array();
    for (const auto& k : z.checks)
      checks.push_back(Json{{"check", k.name}, {"lhs", k.lhs}, {"rhs", k.rhs}, {"se", k.se}, {"holds", k.holds}});
    rows.push_back(Json{{"L", L},
                        {"R", choice.R},
                        {"Z", estimate_json(z.Z)},
                        {"Z1", estimate_json(z.Z1)},
                        {"Z2", estimate_json(z.Z2)},
                        {"Z3", estimate_json(z.Z3)},
                        {"Z3_threshold", threshold},
                        {"checks", checks}});
    table.push_back({L, choice.R, z.Z.value, z.Z.se, z.Z1.value, z.Z1.se, z.Z2.value, z.Z2.se, z.Z3.value, z.Z3.se,
                     threshold});
  }
  std::ostringstream os;
  write_table_csv(os, run.prov(),
                  {"L", "R", "Z", "Z_se", "Z1", "Z1_se", "Z2", "Z2_se", "Z3", "Z3_se", "Z3_threshold"}, table);
  run.write("zladder.csv", os.str());
  run.write_json("report.json", Json{{"n", n}, {"sigmas", sigmas}, {"rows", rows}, {"passed", ok}});
  return ok ? kPass : kExperimentFailure;
}

int cmd_appendix(const Run& run) {
  const auto& c = run.cfg();
  auto base = build_spec(c, run.seed());
  auto spec = std::make_shared<ProblemSpec>(*base);
  const double R = positive(c, "appendix", "R");
  spec->chi = build_chi(R, r_prime_for(R, spec->L, positive(c, "problem", "C")));
  spec->J = JKind::variable_coeff;
  if (spec->mode != ValueMode::complex) c.reject("problem", "mode", "the appendix flow needs complex fields");
  const double power = c.number("appendix", "a_power");
  auto problem = checked(c, "appendix", "a_power", [&] {
    return build_variable_coeff(Coefficient::bracket_power(power), spec);
  });
  const double t = positive(c, "appendix", "t");
  const double dt = positive(c, "appendix", "dt");
  const double tol = positive(c, "appendix", "tol");
  const double tau = positive(c, "appendix", "tau");
  if (tau >= t) c.reject("appendix", "tau", "must be below t");
  const double width = positive(c, "appendix", "width");
  std::vector<TestFunction> tests;
  for (double x : c.numbers("appendix", "centers")) tests.push_back({x, width});
  const double limit = positive(c, "appendix", "residual_max");

  // Smooth localized datum 0.5 e^{-y^2/2} (1 + 0.3 i y), projected.
  SpectralGrid grid(spec->L, spec->max_mode(), spec->grid_size);
  std::vector<Complex> values(grid.size());
  for (std::size_t j = 0; j < values.size(); ++j) {
    const double y = grid.point(j);
    values[j] = 0.5 * std::exp(-0.5 * y * y) * Complex(1.0, 0.3 * y);
  }
  auto v0 = spec->zero_field();
  grid.to_coeffs(values, v0.coeffs());

  const auto res = weak_form_residual(problem, v0, t, dt, tol, tests, tau);
  const double e0 = problem.energy(v0);
  const double e1 = problem.energy(problem.flow(v0, t, dt, tol));
  const bool ok = res.max_relative <= limit;
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < tests.size(); ++i) rows.push_back({tests[i].center, tests[i].width, res.relative[i]});
  std::ostringstream os;
  write_table_csv(os, run.prov(), {"center", "width", "relative_residual"}, rows);
  run.write("appendix.csv", os.str());
  run.write_json("report.json", Json{{"spec", spec_to_json(*spec)},
                                     {"a", "<x>^-" + format_double(power)},
                                     {"t", t},
                                     {"max_relative_residual", res.max_relative},
                                     {"residual_max", limit},
                                     {"energy_start", e0},
                                     {"energy_end", e1},
                                     {"passed", ok}});
  return ok ? kPass : kExperimentFailure;
}

}  // namespace

int run(const std::string& subcommand, const Config& cfg) {
  static const std::map<std::string, std::function<int(const Run&)>> table{
      {"sample", cmd_sample}, {"flow", cmd_flow},       {"invariance", cmd_invariance}, {"rate", cmd_rate},
      {"oracle", cmd_oracle}, {"zladder", cmd_zladder}, {"appendix", cmd_appendix}};
  const auto it = table.find(subcommand);
  if (it == table.end()) throw ConfigError("unknown subcommand '" + subcommand + "'");
  const Run r(subcommand, cfg);
  r.status("running", "");
  try {
    const int code = it->second(r);
    r.status(code == kPass ? "pass" : "fail", "");
    return code;
  } catch (const ConfigError& e) {
    r.status("config-error", e.what());
    throw;
  } catch (const std::exception& e) {
    r.status("error", std::string(e.what()) + " (outputs in this directory may be partial)");
    throw;
  }
}

}  // namespace lab
