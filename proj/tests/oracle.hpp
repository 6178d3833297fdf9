#pragma once

#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace test_support {

/// Frozen reference values from tests/oracles/derive.py.
inline const nlohmann::json& oracle() {
  static const nlohmann::json j = [] {
    std::ifstream f(INVIS_ORACLE_PATH);
    if (!f) throw std::runtime_error("missing oracle file " INVIS_ORACLE_PATH);
    return nlohmann::json::parse(f);
  }();
  return j;
}

inline double oracle_value(const std::string& key) { return oracle().at(key).get<double>(); }

}  // namespace test_support
