#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace bsv {

/// Flat `key = value` text with `[section]` headers. `#` and `;` start a
/// comment line. Keys before the first header belong to section "".
class ConfigFile {
 public:
  /// Throws IoError naming the line on malformed input or duplicate keys.
  static ConfigFile parse(const std::string& text, const std::string& origin = "<config>");
  static ConfigFile load(const std::filesystem::path& path);

  std::optional<std::string> get(const std::string& section, const std::string& key) const;
  /// Typed getters throw IoError when the value does not parse.
  std::optional<double> get_double(const std::string& section, const std::string& key) const;
  std::optional<long long> get_int(const std::string& section, const std::string& key) const;
  std::optional<bool> get_bool(const std::string& section, const std::string& key) const;

  void set(const std::string& section, const std::string& key, const std::string& value);
  std::string to_string() const;

  /// "section.key" entries never read by a getter, for unknown-key warnings.
  std::vector<std::string> unused_keys() const;
  const std::string& origin() const { return origin_; }

 private:
  std::map<std::string, std::map<std::string, std::string>> values_;
  mutable std::map<std::string, bool> used_;
  std::string origin_;
};

}  // namespace bsv
