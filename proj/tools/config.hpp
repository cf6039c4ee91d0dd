#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace lab {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// INI config checked against a fixed key schema. Every key has a default;
/// unknown sections or keys are rejected with their line number.
class Config {
 public:
  static Config load(const std::string& path);
  static Config parse(const std::string& text, const std::string& origin = "<config>");

  double number(const std::string& section, const std::string& key) const;
  long integer(const std::string& section, const std::string& key) const;
  std::string text(const std::string& section, const std::string& key) const;
  bool flag(const std::string& section, const std::string& key) const;
  std::vector<double> numbers(const std::string& section, const std::string& key) const;
  std::vector<std::string> words(const std::string& section, const std::string& key) const;

  /// Raises a ConfigError pointing at the key's line (or saying it was a default).
  [[noreturn]] void reject(const std::string& section, const std::string& key, const std::string& why) const;

  /// Every schema key with its effective value, in schema order.
  nlohmann::ordered_json resolved() const;
  const std::string& origin() const { return origin_; }

 private:
  std::string origin_;
  std::map<std::string, std::string> values_;  // "section.key" -> raw text
  std::map<std::string, int> lines_;
  const std::string& raw(const std::string& section, const std::string& key) const;
};

}  // namespace lab
