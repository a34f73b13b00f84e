#pragma once

#include <cstdint>
#include <initializer_list>
#include <map>
#include <string>
#include <vector>

#include "igo/core/types.hpp"

namespace igo {

/// `kind:key=value;key=value` with comma-separated lists as values.
struct SpecString {
  std::string kind;
  std::map<std::string, std::string> values;

  static SpecString parse(const std::string& text);

  bool has(const std::string& key) const { return values.count(key) != 0; }
  std::string text(const std::string& key, const std::string& fallback) const;
  double real(const std::string& key) const;
  double real(const std::string& key, double fallback) const;
  Index integer(const std::string& key) const;
  Index integer(const std::string& key, Index fallback) const;
  std::uint64_t seed(const std::string& key, std::uint64_t fallback) const;
  Vector list(const std::string& key) const;

  /// InvalidInput naming the first key not in `known`.
  void require_known(std::initializer_list<const char*> known) const;
};

double parse_real(const std::string& text, const std::string& what);
Index parse_integer(const std::string& text, const std::string& what);
Vector parse_real_list(const std::string& text, const std::string& what);
std::string trim(const std::string& s);

}  // namespace igo
