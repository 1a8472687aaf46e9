#pragma once

#include <iosfwd>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace fracfield {

/// Flat key = value settings. Lines starting with '#' and blank lines are
/// ignored; keys may not repeat.
using ConfigMap = std::map<std::string, std::string>;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses `in`; keys outside `allowed` are errors. `source` names the input
/// in messages.
ConfigMap parse_config(std::istream& in, const std::set<std::string>& allowed, const std::string& source);
ConfigMap load_config_file(const std::string& path, const std::set<std::string>& allowed);

/// Typed accessors; each throws ConfigError naming the key on bad input.
double config_double(const ConfigMap& c, const std::string& key, double fallback);
long long config_int(const ConfigMap& c, const std::string& key, long long fallback);
bool config_bool(const ConfigMap& c, const std::string& key, bool fallback);
std::string config_string(const ConfigMap& c, const std::string& key, const std::string& fallback);
/// Comma- or whitespace-separated lists.
std::vector<double> config_doubles(const ConfigMap& c, const std::string& key, const std::vector<double>& fallback);
std::vector<Eigen::Index> config_ints(const ConfigMap& c, const std::string& key,
                                      const std::vector<Eigen::Index>& fallback);
/// Functional names separated by ';' or whitespace (probit(a,c) contains a comma).
std::vector<std::string> config_names(const ConfigMap& c, const std::string& key,
                                      const std::vector<std::string>& fallback);

}  // namespace fracfield
