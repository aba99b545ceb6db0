#pragma once

// nlohmann::json conversions shared between modules. Kept out of the public
// headers so that consumers of the library do not need the JSON header.

#include <json.hpp>

#include "wulfflab/anisotropy.hpp"
#include "wulfflab/linalg.hpp"

namespace wulfflab::json_io {

nlohmann::json to_value(const AnisotropyFunction& f);
AnisotropyFunction anisotropy_from_value(const nlohmann::json& j);

inline nlohmann::json to_value(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

inline nlohmann::json to_value(const Mat& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < m.rows(); ++i) {
    std::vector<double> row(m.cols());
    for (int j = 0; j < m.cols(); ++j) row[j] = m(i, j);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace wulfflab::json_io
