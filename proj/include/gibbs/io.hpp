#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gibbs/field.hpp"
#include "gibbs/flow.hpp"
#include "gibbs/gibbs.hpp"

namespace gibbs {

inline constexpr std::string_view kVersion = "gibbslab 1.0";

/// 64-bit FNV-1a, printed as 16 hex digits.
std::uint64_t fnv1a(std::string_view bytes);
std::string hex64(std::uint64_t v);

/// Stamped on every artifact: which config produced it, with which seed.
struct Provenance {
  std::string config_hash;
  std::uint64_t seed = 0;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();

  nlohmann::ordered_json to_json() const;
  /// "# key: value" lines for CSV headers.
  void write_csv_header(std::ostream& os) const;
};

std::string format_double(double v);

nlohmann::ordered_json spec_to_json(const ProblemSpec& spec);

nlohmann::ordered_json field_to_json(const SpectralField& f);
/// Rejects records whose normalization tag differs from this build's.
SpectralField field_from_json(const nlohmann::json& j);

void write_grid_csv(std::ostream& os, const Provenance& prov, const GridField& g);

struct TrajectoryRecord {
  double t;
  SpectralField field;
  double H;
  double M;
};

/// First line is the header object; each further line one record.
void write_trajectory_jsonl(std::ostream& os, const Provenance& prov, const ProblemSpec& spec,
                            const std::vector<TrajectoryRecord>& records);
std::vector<TrajectoryRecord> read_trajectory_jsonl(std::istream& is);

void write_drift_csv(std::ostream& os, const Provenance& prov, const std::vector<DriftRecord>& history);

nlohmann::ordered_json ensemble_to_json(const GibbsEnsemble& e, const Provenance& prov);
/// Columns weight, M, H, re_u0, im_u0.
void write_ensemble_csv(std::ostream& os, const Provenance& prov, const GibbsEnsemble& e);

/// Plain numeric table with a provenance header.
void write_table_csv(std::ostream& os, const Provenance& prov, const std::vector<std::string>& columns,
                     const std::vector<std::vector<double>>& rows);

}  // namespace gibbs
