#include "bsv/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "bsv/error.hpp"

namespace bsv {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

ConfigFile ConfigFile::parse(const std::string& text, const std::string& origin) {
  ConfigFile cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    const auto where = origin + ":" + std::to_string(number);
    if (t.front() == '[') {
      if (t.back() != ']') throw IoError(where + ": unterminated section header");
      section = lower(trim(t.substr(1, t.size() - 2)));
      if (section.empty()) throw IoError(where + ": empty section name");
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw IoError(where + ": expected key = value");
    const std::string key = lower(trim(t.substr(0, eq)));
    if (key.empty()) throw IoError(where + ": empty key");
    auto& sec = cfg.values_[section];
    if (sec.count(key)) throw IoError(where + ": duplicate key '" + key + "'");
    sec[key] = trim(t.substr(eq + 1));
  }
  return cfg;
}

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return parse(s.str(), path.string());
}

std::optional<std::string> ConfigFile::get(const std::string& section, const std::string& key) const {
  auto sec = values_.find(section);
  if (sec == values_.end()) return std::nullopt;
  auto it = sec->second.find(key);
  if (it == sec->second.end()) return std::nullopt;
  used_[section + "." + key] = true;
  return it->second;
}

std::optional<double> ConfigFile::get_double(const std::string& section,
                                             const std::string& key) const {
  const auto v = get(section, key);
  if (!v || v->empty()) return std::nullopt;
  double out = 0.0;
  const auto* end = v->data() + v->size();
  const auto [ptr, ec] = std::from_chars(v->data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw IoError(origin_ + ": " + section + "." + key + " = '" + *v + "' is not a number");
  }
  return out;
}

std::optional<long long> ConfigFile::get_int(const std::string& section,
                                             const std::string& key) const {
  const auto v = get(section, key);
  if (!v || v->empty()) return std::nullopt;
  long long out = 0;
  const auto* end = v->data() + v->size();
  const auto [ptr, ec] = std::from_chars(v->data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw IoError(origin_ + ": " + section + "." + key + " = '" + *v + "' is not an integer");
  }
  return out;
}

std::optional<bool> ConfigFile::get_bool(const std::string& section, const std::string& key) const {
  const auto v = get(section, key);
  if (!v || v->empty()) return std::nullopt;
  const auto l = lower(*v);
  if (l == "true" || l == "yes" || l == "on" || l == "1") return true;
  if (l == "false" || l == "no" || l == "off" || l == "0") return false;
  throw IoError(origin_ + ": " + section + "." + key + " = '" + *v + "' is not a boolean");
}

void ConfigFile::set(const std::string& section, const std::string& key, const std::string& value) {
  values_[lower(section)][lower(key)] = value;
}

std::string ConfigFile::to_string() const {
  std::ostringstream out;
  bool first = true;
  for (const auto& [section, keys] : values_) {
    if (!first) out << '\n';
    first = false;
    if (!section.empty()) out << '[' << section << "]\n";
    for (const auto& [k, v] : keys) out << k << " = " << v << '\n';
  }
  return out.str();
}

std::vector<std::string> ConfigFile::unused_keys() const {
  std::vector<std::string> out;
  for (const auto& [section, keys] : values_) {
    for (const auto& [k, v] : keys) {
      if (!used_.count(section + "." + k)) out.push_back(section + "." + k);
    }
  }
  return out;
}

}  // namespace bsv
