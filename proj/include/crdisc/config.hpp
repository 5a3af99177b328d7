#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace crd {

enum class KeyType { Int, UInt, Double, Bool, String };

struct ConfigKey {
  std::string name;
  KeyType type;
  std::string value;  // default
  double lo = 0.0, hi = 0.0;
  /// allowed values of a String key (empty: free form, checked by the consumer)
  std::vector<std::string> choices;
  std::string doc;
};

/// Documented keys in serialization order.
const std::vector<ConfigKey>& config_keys();

/// Flat key = value configuration; every value is validated and stored in canonical form, so
/// serialize and parse round-trip exactly.
class RunConfig {
 public:
  RunConfig();

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;
  const std::string& raw(const std::string& key) const;

  int get_int(const std::string& key) const;
  std::uint64_t get_uint(const std::string& key) const;
  double get_double(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  const std::string& get_string(const std::string& key) const;

  std::string serialize() const;
  /// Lines "key = value"; '#' starts a comment. Unknown keys and bad values throw Config errors.
  static RunConfig parse(const std::string& text);
  static RunConfig load(const std::string& path);

  bool operator==(const RunConfig& o) const { return values_ == o.values_; }

 private:
  std::map<std::string, std::string> values_;
};

/// Level of a dictionary id "bump-L<k>".
int dictionary_level(const std::string& id);

}  // namespace crd
