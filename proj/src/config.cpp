#include "stickslip/config.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "stickslip/errors.hpp"

namespace stickslip {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::tolower(ch); });
  return s;
}

}  // namespace

bool parse_bool(const std::string& text) {
  const std::string t = lower(trim(text));
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw InvalidParameter("not a boolean: '" + text + "'");
}

KeyValueFile KeyValueFile::parse(std::istream& in, const std::string& source) {
  KeyValueFile file;
  file.source_ = source;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(source, line_no, "expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError(source, line_no, "empty key");
    if (file.entries_.count(key) != 0) throw ParseError(source, line_no, "duplicate key '" + key + "'");
    file.entries_.emplace(std::move(key), Entry{std::move(value), line_no});
  }
  return file;
}

KeyValueFile KeyValueFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  return parse(in, path.string());
}

void KeyValueFile::fail(const std::string& key, const std::string& what) const {
  throw ParseError(source_, entries_.at(key).line, key + ": " + what);
}

const std::string& KeyValueFile::raw(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw ValidationError(source_ + ": missing key '" + key + "'");
  return it->second.value;
}

double KeyValueFile::get_double(const std::string& key, double fallback) const {
  if (!has(key)) return fallback;
  const std::string& text = raw(key);
  std::size_t used = 0;
  try {
    const double value = std::stod(text, &used);
    if (used == text.size()) return value;
  } catch (const std::exception&) {
  }
  fail(key, "not a number: '" + text + "'");
}

std::int64_t KeyValueFile::get_int(const std::string& key, std::int64_t fallback) const {
  if (!has(key)) return fallback;
  const std::string& text = raw(key);
  std::size_t used = 0;
  try {
    const long long value = std::stoll(text, &used);
    if (used == text.size()) return value;
  } catch (const std::exception&) {
  }
  fail(key, "not an integer: '" + text + "'");
}

std::uint64_t KeyValueFile::get_uint(const std::string& key, std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  const std::string& text = raw(key);
  std::size_t used = 0;
  try {
    if (!text.empty() && text[0] != '-') {
      const unsigned long long value = std::stoull(text, &used);
      if (used == text.size()) return value;
    }
  } catch (const std::exception&) {
  }
  fail(key, "not an unsigned integer: '" + text + "'");
}

bool KeyValueFile::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  try {
    return parse_bool(raw(key));
  } catch (const InvalidParameter& e) {
    fail(key, e.what());
  }
}

std::string KeyValueFile::get_string(const std::string& key, const std::string& fallback) const {
  return has(key) ? raw(key) : fallback;
}

std::vector<double> KeyValueFile::get_doubles(const std::string& key,
                                              const std::vector<double>& fallback) const {
  if (!has(key)) return fallback;
  std::vector<double> values;
  std::stringstream ss(raw(key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (item.empty() || used != item.size()) fail(key, "bad list item '" + item + "'");
    values.push_back(value);
  }
  return values;
}

void KeyValueFile::require_known(const std::set<std::string>& known) const {
  for (const auto& [key, entry] : entries_) {
    if (known.count(key) == 0) throw ParseError(source_, entry.line, "unknown key '" + key + "'");
  }
}

FrictionParams friction_params_from(const KeyValueFile& file, FrictionParams base) {
  file.require_known({"mu_s", "mu_k", "k", "c", "g", "string_gain", "C_l", "sim_rate", "travel_target"});
  if (file.has("string_gain") && file.has("C_l")) {
    throw ValidationError("string_gain and C_l are aliases; give only one");
  }
  FrictionParams p = base;
  p.mu_s = file.get_double("mu_s", p.mu_s);
  p.mu_k = file.get_double("mu_k", p.mu_k);
  p.k = file.get_double("k", p.k);
  p.c = file.get_double("c", p.c);
  p.g = file.get_double("g", p.g);
  p.string_gain = file.get_double("C_l", file.get_double("string_gain", p.string_gain));
  p.sim_rate = file.get_double("sim_rate", p.sim_rate);
  p.travel_target = file.get_double("travel_target", p.travel_target);
  p.validate();
  return p;
}

FrictionParams load_friction_params(const std::filesystem::path& path) {
  return friction_params_from(KeyValueFile::load(path));
}

void write_friction_params(std::ostream& out, const FrictionParams& p) {
  out << fmt::format("mu_s = {}\nmu_k = {}\nk = {}\nc = {}\ng = {}\nstring_gain = {}\n", p.mu_s,
                     p.mu_k, p.k, p.c, p.g, p.string_gain)
      << fmt::format("sim_rate = {}\ntravel_target = {}\n", p.sim_rate, p.travel_target);
}

}  // namespace stickslip
