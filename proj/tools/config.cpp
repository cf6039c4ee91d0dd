#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace lab {

namespace {

struct Entry {
  const char* section;
  const char* key;
  const char* value;
};

// clang-format off
const Entry kSchema[] = {
  {"run", "seed", "1"},
  {"run", "out", "gibbs_out"},

  {"problem", "L", "4"},
  {"problem", "n_cut", "8"},
  {"problem", "mode", "complex"},
  {"problem", "J", "multiply_i"},
  {"problem", "V_power", "2"},
  {"problem", "V_coeff", "0.5"},
  {"problem", "R", "auto"},
  {"problem", "choose_R_n", "20000"},
  {"problem", "R_prime", "auto"},
  {"problem", "C", "100"},
  {"problem", "kappa", "0"},
  {"problem", "grid_size", "auto"},

  {"weights", "phi_power", "2"},
  {"weights", "phi1_power", "2"},
  {"weights", "s", "0.25"},
  {"weights", "s_time_power", "1"},
  {"weights", "S_time_power", "3"},

  {"sample", "n", "1000"},
  {"sample", "sampler", "importance"},
  {"sample", "beta", "0.3"},
  {"sample", "burn_in", "1000"},
  {"sample", "thin", "1"},
  {"sample", "write_fields", "true"},

  {"flow", "dt", "1e-3"},
  {"flow", "t_final", "1"},
  {"flow", "scheme", "midpoint"},
  {"flow", "tol", "1e-12"},
  {"flow", "snapshots", "10"},

  {"invariance", "n", "2000"},
  {"invariance", "alpha", "0.01"},
  {"invariance", "permutations", "400"},
  {"invariance", "observables", "re_u, abs_u_sq, mass, energy, norm_phi"},
  {"invariance", "x0", "0"},
  {"invariance", "max_energy_drift", "1e-6"},
  {"invariance", "expect", "pass"},

  {"rate", "x_list", "0, 1, 2, 4"},
  {"rate", "L_list", "4, 8, 16, 32, 64"},
  {"rate", "s", "0.25"},
  {"rate", "form", "sobolev"},
  {"rate", "slope_min", "-1.15"},
  {"rate", "slope_max", "-0.85"},

  {"oracle", "R", "2"},
  {"oracle", "x", "0"},
  {"oracle", "V_power", "1"},
  {"oracle", "V_coeff", "1"},
  {"oracle", "n", "100000"},
  {"oracle", "r_list", "2, 4"},
  {"oracle", "u_max", "8"},
  {"oracle", "du", "0.02"},
  {"oracle", "h", "0.0078125"},
  {"oracle", "bins", "40"},
  {"oracle", "bin_range", "3"},
  {"oracle", "tv_max", "0.02"},
  {"oracle", "sigmas", "3"},

  {"zladder", "L_list", "4, 8, 16"},
  {"zladder", "n", "100000"},
  {"zladder", "choose_R_n", "20000"},
  {"zladder", "n_hi", "32"},
  {"zladder", "ou_step", "0.015625"},
  {"zladder", "sigmas", "3"},

  {"appendix", "a_power", "2"},
  {"appendix", "R", "30"},
  {"appendix", "t", "0.5"},
  {"appendix", "dt", "1e-3"},
  {"appendix", "tol", "1e-13"},
  {"appendix", "tau", "1e-3"},
  {"appendix", "centers", "-2, -1, 0, 1, 2"},
  {"appendix", "width", "0.7"},
  {"appendix", "residual_max", "1e-3"},
};
// clang-format on

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

const Entry* find_entry(const std::string& section, const std::string& key) {
  for (const auto& e : kSchema)
    if (section == e.section && key == e.key) return &e;
  return nullptr;
}

bool known_section(const std::string& section) {
  return std::any_of(std::begin(kSchema), std::end(kSchema), [&](const Entry& e) { return section == e.section; });
}

}  // namespace

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

Config Config::parse(const std::string& text, const std::string& origin) {
  Config c;
  c.origin_ = origin;
  for (const auto& e : kSchema) c.values_[std::string(e.section) + "." + e.key] = e.value;

  boost::property_tree::ptree tree;
  try {
    std::istringstream is(text);
    boost::property_tree::read_ini(is, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(origin + ":" + std::to_string(e.line()) + ": " + e.message());
  }

  // property_tree drops positions; recover the line of each key by a scan.
  std::istringstream lines(text);
  std::string line, section;
  for (int no = 1; std::getline(lines, line); ++no) {
    line = trim(line);
    if (line.empty() || line[0] == ';' || line[0] == '#') continue;
    if (line[0] == '[') {
      section = trim(line.substr(1, line.find(']') - 1));
      if (!known_section(section)) throw ConfigError(origin + ":" + std::to_string(no) + ": unknown section [" + section + "]");
      continue;
    }
    const std::string key = trim(line.substr(0, line.find('=')));
    if (section.empty()) throw ConfigError(origin + ":" + std::to_string(no) + ": key '" + key + "' outside any section");
    if (!find_entry(section, key))
      throw ConfigError(origin + ":" + std::to_string(no) + ": unknown key '" + key + "' in [" + section + "]");
    c.lines_[section + "." + key] = no;
  }
  for (const auto& [sec, body] : tree)
    for (const auto& [key, node] : body) c.values_[sec + "." + key] = trim(node.get_value<std::string>());
  return c;
}

void Config::reject(const std::string& section, const std::string& key, const std::string& why) const {
  const auto it = lines_.find(section + "." + key);
  const std::string where = it == lines_.end() ? origin_ + " (default)" : origin_ + ":" + std::to_string(it->second);
  throw ConfigError(where + ": [" + section + "] " + key + " = '" + raw(section, key) + "': " + why);
}

const std::string& Config::raw(const std::string& section, const std::string& key) const {
  const auto it = values_.find(section + "." + key);
  if (it == values_.end()) throw std::logic_error("key missing from schema: " + section + "." + key);
  return it->second;
}

double Config::number(const std::string& section, const std::string& key) const {
  const auto& s = raw(section, key);
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(v)) reject(section, key, "expected a number");
  return v;
}

long Config::integer(const std::string& section, const std::string& key) const {
  const auto& s = raw(section, key);
  long v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) reject(section, key, "expected an integer");
  return v;
}

std::string Config::text(const std::string& section, const std::string& key) const { return raw(section, key); }

bool Config::flag(const std::string& section, const std::string& key) const {
  const auto& s = raw(section, key);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  reject(section, key, "expected true or false");
}

std::vector<std::string> Config::words(const std::string& section, const std::string& key) const {
  std::vector<std::string> out;
  std::istringstream is(raw(section, key));
  std::string item;
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (item.empty()) reject(section, key, "empty list item");
    out.push_back(item);
  }
  if (out.empty()) reject(section, key, "expected a comma-separated list");
  return out;
}

std::vector<double> Config::numbers(const std::string& section, const std::string& key) const {
  std::vector<double> out;
  for (const auto& w : words(section, key)) {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
    if (ec != std::errc{} || p != w.data() + w.size() || !std::isfinite(v))
      reject(section, key, "'" + w + "' is not a number");
    out.push_back(v);
  }
  return out;
}

nlohmann::ordered_json Config::resolved() const {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& e : kSchema) j[e.section][e.key] = raw(e.section, e.key);
  return j;
}

}  // namespace lab
