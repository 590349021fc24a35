#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

/// Flat `key = value` run configuration with dotted keys. Every key has a
/// default; unknown keys are rejected. Layering order: defaults, preset, file,
/// overrides.
namespace wavefreeze::config {

struct KeyInfo {
  const char* key;
  const char* default_value;
  const char* doc;
};

/// The complete key table, in documentation order.
const std::vector<KeyInfo>& keys();

/// Names accepted by apply_preset().
std::vector<std::string> preset_names();

class Config {
 public:
  Config();  // all defaults

  /// Throws Config for an unknown key.
  void set(const std::string& key, const std::string& value);
  const std::string& get(const std::string& key) const;
  bool is_default(const std::string& key) const;

  /// `key = value` lines; '#' starts a comment; blank lines ignored.
  /// Malformed lines and unknown or repeated keys throw Config.
  void merge_text(const std::string& text, const std::string& origin = "<text>");
  void merge_file(const std::filesystem::path& path);
  /// "key=value"
  void apply_override(const std::string& assignment);
  void apply_preset(const std::string& name);

  double number(const std::string& key) const;
  long integer(const std::string& key) const;
  bool boolean(const std::string& key) const;
  /// Comma-separated numbers.
  std::vector<double> number_list(const std::string& key) const;

  /// Sorted `key = value` lines, one per key.
  std::string to_text() const;
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
  std::map<std::string, bool> explicit_;
};

}  // namespace wavefreeze::config
