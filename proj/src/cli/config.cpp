#include "photonbound/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace photonbound::cli {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T>
bool parse_number(const std::string& s, T& out) {
  const char* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, out);
  return res.ec == std::errc() && res.ptr == end;
}

}  // namespace

Config Config::parse(const std::string& text, const std::string& origin) {
  Config cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(line) + ": expected `section.key = value`");
    }
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    const auto dot = key.find('.');
    if (key.empty() || dot == std::string::npos || dot == 0 || dot + 1 == key.size()) {
      throw ConfigError(origin + ":" + std::to_string(line) + ": key `" + key + "` is not of the form section.key");
    }
    if (cfg.entries_.count(key) != 0) {
      throw ConfigError(origin + ":" + std::to_string(line) + ": duplicate key `" + key + "` (first set on line " +
                        std::to_string(cfg.entries_[key].line) + ")");
    }
    cfg.entries_[key] = {value, line};
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

void Config::set(const std::string& key, const std::string& value) { entries_[key] = {value, 0}; }

const Config::Entry* Config::find(const std::string& key) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

void Config::fail(const std::string& key, const std::string& what) const {
  const Entry* e = find(key);
  std::string where = origin_;
  if (e != nullptr && e->line > 0) where += ":" + std::to_string(e->line);
  throw ConfigError(where + ": " + key + ": " + what);
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  const Entry* e = find(key);
  return e == nullptr ? fallback : e->value;
}

double Config::get_double(const std::string& key, double fallback) const {
  const Entry* e = find(key);
  if (e == nullptr) return fallback;
  double v = 0.0;
  if (!parse_number(e->value, v)) fail(key, "not a number: `" + e->value + "`");
  return v;
}

int Config::get_int(const std::string& key, int fallback) const {
  const Entry* e = find(key);
  if (e == nullptr) return fallback;
  int v = 0;
  if (!parse_number(e->value, v)) fail(key, "not an integer: `" + e->value + "`");
  return v;
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
  const Entry* e = find(key);
  if (e == nullptr) return fallback;
  std::uint64_t v = 0;
  if (!parse_number(e->value, v)) fail(key, "not a non-negative integer: `" + e->value + "`");
  return v;
}

std::vector<double> Config::get_doubles(const std::string& key, const std::vector<double>& fallback) const {
  const Entry* e = find(key);
  if (e == nullptr) return fallback;
  std::vector<double> out;
  for (const std::string& item : split_list(e->value)) {
    double v = 0.0;
    if (!parse_number(item, v)) fail(key, "not a number: `" + item + "`");
    out.push_back(v);
  }
  return out;
}

std::vector<std::string> Config::get_strings(const std::string& key, const std::vector<std::string>& fallback) const {
  const Entry* e = find(key);
  return e == nullptr ? fallback : split_list(e->value);
}

void Config::check_keys(const std::vector<std::string>& known) const {
  for (const auto& [key, entry] : entries_) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError(origin_ + ":" + std::to_string(entry.line) + ": unknown key `" + key + "`");
    }
  }
}

}  // namespace photonbound::cli
