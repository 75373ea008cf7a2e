#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "aaoreg/harness.hpp"

namespace aaoreg {

/// Bad key, bad value or a value violating a config invariant.
class SettingsError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Flat `key = value` overrides, later entries win. Keys are validated on
/// insertion; values when applied.
class Settings {
 public:
  void set(const std::string& key, const std::string& value);
  std::optional<std::string> get(const std::string& key) const;
  bool empty() const noexcept { return entries_.empty(); }
  const std::vector<std::pair<std::string, std::string>>& entries() const noexcept { return entries_; }

  /// Entries of `other` override ours.
  void merge(const Settings& other);

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

const std::vector<std::string>& valid_setting_keys();

/// One `key = value` per line; '#' starts a comment; blank lines ignored.
Settings parse_settings(std::istream& in, const std::string& source = "<input>");
Settings parse_settings_file(const std::filesystem::path& path);

/// Method name such as "irgnm-aao" or "landweber-reduced".
std::pair<Paradigm, Formulation> parse_method(const std::string& name);

/// Applies solver keys (including `method`) to one config and validates it.
void apply_settings(const Settings& s, SolverConfig& cfg);

/// Applies experiment keys, and solver keys to every config of the matrix.
/// Here `method` may only name a paradigm ("irgnm", "landweber", "tikhonov").
void apply_settings(const Settings& s, ExperimentSpec& spec);

}  // namespace aaoreg
