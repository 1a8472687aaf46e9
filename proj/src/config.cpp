#include "fracfield/config.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <stdexcept>

namespace fracfield {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T v{};
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end || text.empty()) {
    throw ConfigError("invalid value for '" + key + "': '" + text + "'");
  }
  return v;
}

std::vector<std::string> split(const std::string& text, const std::string& seps) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    if (seps.find(ch) != std::string::npos) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace

ConfigMap parse_config(std::istream& in, const std::set<std::string>& allowed, const std::string& source) {
  ConfigMap out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    const std::string where = source + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (key.empty()) throw ConfigError(where + ": empty key");
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
    if (!out.emplace(key, value).second) throw ConfigError(where + ": duplicate key '" + key + "'");
  }
  return out;
}

ConfigMap load_config_file(const std::string& path, const std::set<std::string>& allowed) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in, allowed, path);
}

double config_double(const ConfigMap& c, const std::string& key, double fallback) {
  const auto it = c.find(key);
  return it == c.end() ? fallback : parse_number<double>(key, it->second);
}

long long config_int(const ConfigMap& c, const std::string& key, long long fallback) {
  const auto it = c.find(key);
  return it == c.end() ? fallback : parse_number<long long>(key, it->second);
}

bool config_bool(const ConfigMap& c, const std::string& key, bool fallback) {
  const auto it = c.find(key);
  if (it == c.end()) return fallback;
  if (it->second == "true" || it->second == "1" || it->second == "yes") return true;
  if (it->second == "false" || it->second == "0" || it->second == "no") return false;
  throw ConfigError("invalid value for '" + key + "': '" + it->second + "' (expected true or false)");
}

std::string config_string(const ConfigMap& c, const std::string& key, const std::string& fallback) {
  const auto it = c.find(key);
  return it == c.end() ? fallback : it->second;
}

std::vector<double> config_doubles(const ConfigMap& c, const std::string& key, const std::vector<double>& fallback) {
  const auto it = c.find(key);
  if (it == c.end()) return fallback;
  std::vector<double> out;
  for (const std::string& item : split(it->second, ", \t")) out.push_back(parse_number<double>(key, item));
  return out;
}

std::vector<Eigen::Index> config_ints(const ConfigMap& c, const std::string& key,
                                      const std::vector<Eigen::Index>& fallback) {
  const auto it = c.find(key);
  if (it == c.end()) return fallback;
  std::vector<Eigen::Index> out;
  for (const std::string& item : split(it->second, ", \t")) out.push_back(parse_number<Eigen::Index>(key, item));
  return out;
}

std::vector<std::string> config_names(const ConfigMap& c, const std::string& key,
                                      const std::vector<std::string>& fallback) {
  const auto it = c.find(key);
  return it == c.end() ? fallback : split(it->second, "; \t");
}

}  // namespace fracfield
