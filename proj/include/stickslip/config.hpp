#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "stickslip/friction.hpp"

namespace stickslip {

// `key = value` text with `#` comments. Each key may appear once.
class KeyValueFile {
 public:
  static KeyValueFile parse(std::istream& in, const std::string& source = "<stream>");
  static KeyValueFile load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  const std::string& raw(const std::string& key) const;

  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;

  // Throws ParseError naming the first key not in `known`.
  void require_known(const std::set<std::string>& known) const;

 private:
  struct Entry {
    std::string value;
    std::size_t line;
  };
  [[noreturn]] void fail(const std::string& key, const std::string& what) const;

  std::string source_;
  std::map<std::string, Entry> entries_;
};

bool parse_bool(const std::string& text);

// Unlisted keys keep FrictionParams defaults. Keys: mu_s, mu_k, k, c, g,
// string_gain (alias C_l), sim_rate, travel_target.
FrictionParams friction_params_from(const KeyValueFile& file, FrictionParams base = {});
FrictionParams load_friction_params(const std::filesystem::path& path);
void write_friction_params(std::ostream& out, const FrictionParams& params);

}  // namespace stickslip
