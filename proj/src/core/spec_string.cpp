#include "igo/core/spec_string.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace igo {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE)
    throw InvalidInput(what + ": '" + text + "' is not a number");
  return v;
}

Index parse_integer(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  char* end = nullptr;
  errno = 0;
  const long long v = std::strtoll(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE)
    throw InvalidInput(what + ": '" + text + "' is not an integer");
  return static_cast<Index>(v);
}

Vector parse_real_list(const std::string& text, const std::string& what) {
  std::vector<double> items;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) items.push_back(parse_real(item, what));
  if (items.empty()) throw InvalidInput(what + ": empty list");
  return Eigen::Map<Vector>(items.data(), static_cast<Index>(items.size()));
}

SpecString SpecString::parse(const std::string& text) {
  SpecString s;
  const std::string t = trim(text);
  const auto colon = t.find(':');
  s.kind = trim(t.substr(0, colon));
  if (s.kind.empty()) throw InvalidInput("empty specification '" + text + "'");
  if (colon == std::string::npos) return s;
  std::stringstream ss(t.substr(colon + 1));
  std::string part;
  while (std::getline(ss, part, ';')) {
    if (trim(part).empty()) continue;
    const auto eq = part.find('=');
    if (eq == std::string::npos) throw InvalidInput("'" + part + "' in '" + text + "' is not key=value");
    const std::string key = trim(part.substr(0, eq));
    if (s.values.count(key)) throw InvalidInput("duplicate key '" + key + "' in '" + text + "'");
    s.values[key] = trim(part.substr(eq + 1));
  }
  return s;
}

std::string SpecString::text(const std::string& key, const std::string& fallback) const {
  auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

double SpecString::real(const std::string& key) const {
  if (!has(key)) throw InvalidInput(kind + ": missing '" + key + "'");
  return parse_real(values.at(key), kind + "." + key);
}

double SpecString::real(const std::string& key, double fallback) const {
  return has(key) ? real(key) : fallback;
}

Index SpecString::integer(const std::string& key) const {
  if (!has(key)) throw InvalidInput(kind + ": missing '" + key + "'");
  return parse_integer(values.at(key), kind + "." + key);
}

Index SpecString::integer(const std::string& key, Index fallback) const {
  return has(key) ? integer(key) : fallback;
}

std::uint64_t SpecString::seed(const std::string& key, std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  const std::string t = values.at(key);
  char* end = nullptr;
  const unsigned long long v = std::strtoull(t.c_str(), &end, 0);
  if (t.empty() || end != t.c_str() + t.size()) throw InvalidInput(kind + "." + key + ": bad seed '" + t + "'");
  return v;
}

Vector SpecString::list(const std::string& key) const {
  if (!has(key)) throw InvalidInput(kind + ": missing '" + key + "'");
  return parse_real_list(values.at(key), kind + "." + key);
}

void SpecString::require_known(std::initializer_list<const char*> known) const {
  for (const auto& [key, value] : values) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw InvalidInput(kind + ": unknown key '" + key + "'");
  }
}

}  // namespace igo
