#include "gibbs/io.hpp"

#include <cstdio>
#include <istream>
#include <ostream>

namespace gibbs {

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::ordered_json Provenance::to_json() const {
  nlohmann::ordered_json j;
  j["version"] = kVersion;
  j["normalization"] = kNormalizationTag;
  j["config_hash"] = config_hash;
  j["seed"] = seed;
  j["config"] = config;
  return j;
}

void Provenance::write_csv_header(std::ostream& os) const {
  os << "# version: " << kVersion << '\n';
  os << "# normalization: " << kNormalizationTag << '\n';
  os << "# config_hash: " << config_hash << '\n';
  os << "# seed: " << seed << '\n';
}

nlohmann::ordered_json spec_to_json(const ProblemSpec& spec) {
  nlohmann::ordered_json j;
  j["L"] = spec.L;
  j["N_cut"] = spec.n_cut;
  j["K"] = spec.max_mode();
  j["value_mode"] = to_string(spec.mode);
  j["J"] = to_string(spec.J);
  j["V"] = spec.V.name;
  j["R"] = spec.chi.R();
  j["R_prime"] = spec.chi.R_prime();
  j["kappa"] = spec.kappa;
  j["grid_size"] = spec.grid_size;
  j["normalization"] = kNormalizationTag;
  return j;
}

nlohmann::ordered_json field_to_json(const SpectralField& f) {
  nlohmann::ordered_json j;
  j["L"] = f.L();
  j["N_cut"] = f.n_cut();
  j["value_mode"] = to_string(f.mode());
  j["normalization"] = kNormalizationTag;
  auto re = nlohmann::ordered_json::array();
  auto im = nlohmann::ordered_json::array();
  for (const auto& c : f.coeffs()) {
    re.push_back(c.real());
    im.push_back(c.imag());
  }
  j["k_min"] = -f.max_mode();
  j["re"] = std::move(re);
  j["im"] = std::move(im);
  return j;
}

SpectralField field_from_json(const nlohmann::json& j) {
  try {
    require(j.at("normalization").get<std::string>() == kNormalizationTag, ErrorKind::invalid_parameter,
            "field record has a foreign normalization tag");
    const auto re = j.at("re").get<std::vector<double>>();
    const auto im = j.at("im").get<std::vector<double>>();
    require(re.size() == im.size(), ErrorKind::invalid_parameter, "re/im length mismatch");
    std::vector<Complex> c(re.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = {re[i], im[i]};
    return SpectralField(j.at("L").get<double>(), j.at("N_cut").get<int>(),
                         value_mode_from_string(j.at("value_mode").get<std::string>()), std::move(c));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::invalid_parameter, std::string("malformed field record: ") + e.what());
  }
}

void write_grid_csv(std::ostream& os, const Provenance& prov, const GridField& g) {
  prov.write_csv_header(os);
  os << "x,re_u,im_u\n";
  for (std::size_t i = 0; i < g.points.size(); ++i)
    os << format_double(g.points[i]) << ',' << format_double(g.values[i].real()) << ','
       << format_double(g.values[i].imag()) << '\n';
}

void write_trajectory_jsonl(std::ostream& os, const Provenance& prov, const ProblemSpec& spec,
                            const std::vector<TrajectoryRecord>& records) {
  nlohmann::ordered_json header;
  header["provenance"] = prov.to_json();
  header["spec"] = spec_to_json(spec);
  os << header.dump() << '\n';
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["t"] = r.t;
    j["H"] = r.H;
    j["M"] = r.M;
    j["field"] = field_to_json(r.field);
    os << j.dump() << '\n';
  }
}

std::vector<TrajectoryRecord> read_trajectory_jsonl(std::istream& is) {
  std::vector<TrajectoryRecord> out;
  std::string line;
  bool header = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line, nullptr, false);
    require(!j.is_discarded(), ErrorKind::invalid_parameter, "trajectory line is not JSON");
    if (header) {
      header = false;
      continue;
    }
    out.push_back({j.at("t").get<double>(), field_from_json(j.at("field")), j.at("H").get<double>(),
                   j.at("M").get<double>()});
  }
  return out;
}

void write_drift_csv(std::ostream& os, const Provenance& prov, const std::vector<DriftRecord>& history) {
  prov.write_csv_header(os);
  os << "t,H,M\n";
  for (const auto& r : history)
    os << format_double(r.t) << ',' << format_double(r.H) << ',' << format_double(r.M) << '\n';
}

nlohmann::ordered_json ensemble_to_json(const GibbsEnsemble& e, const Provenance& prov) {
  nlohmann::ordered_json j;
  j["provenance"] = prov.to_json();
  j["spec"] = spec_to_json(*e.spec);
  j["target"] = to_string(e.target);
  j["seed"] = e.seed;
  j["Z"] = {{"value", e.Z.value}, {"se", e.Z.se}};
  j["ess"] = e.ess;
  j["acceptance"] = e.acceptance;
  j["warnings"] = e.warnings;
  auto samples = nlohmann::ordered_json::array();
  const auto w = e.weight_vector();
  for (std::size_t i = 0; i < e.samples.size(); ++i)
    samples.push_back({{"weight", w[i]}, {"field", field_to_json(e.samples[i])}});
  j["samples"] = std::move(samples);
  return j;
}

void write_ensemble_csv(std::ostream& os, const Provenance& prov, const GibbsEnsemble& e) {
  prov.write_csv_header(os);
  os << "# target: " << to_string(e.target) << '\n';
  os << "# Z: " << format_double(e.Z.value) << " +- " << format_double(e.Z.se) << '\n';
  os << "weight,M,H,re_u0,im_u0\n";
  const auto w = e.weight_vector();
  auto& engine = thread_engine(e.spec);
  for (std::size_t i = 0; i < e.samples.size(); ++i) {
    const auto& f = e.samples[i];
    const auto q = engine.conserved(f);
    Complex u0{};
    for (int k = -f.max_mode(); k <= f.max_mode(); ++k) u0 += f[k];
    os << format_double(w[i]) << ',' << format_double(q.M) << ',' << format_double(q.H) << ','
       << format_double(u0.real()) << ',' << format_double(u0.imag()) << '\n';
  }
}

void write_table_csv(std::ostream& os, const Provenance& prov, const std::vector<std::string>& columns,
                     const std::vector<std::vector<double>>& rows) {
  prov.write_csv_header(os);
  for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << columns[c];
  os << '\n';
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size(); ++c) os << (c ? "," : "") << format_double(r[c]);
    os << '\n';
  }
}

}  // namespace gibbs
