#pragma once

// JSON matrix files: {"dim": N, "entries": [[...], ...]}.

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "owenext/errors.hpp"
#include "owenext/pd_matrix.hpp"

namespace owenext {

inline nlohmann::json matrix_to_json(const SquareMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < m.dim(); ++i) {
    std::vector<double> row(m.dim());
    for (std::size_t j = 0; j < m.dim(); ++j) row[j] = m(i, j);
    rows.push_back(row);
  }
  return {{"dim", m.dim()}, {"entries", rows}};
}

inline nlohmann::json matrix_to_json(const PdMatrix& m) { return matrix_to_json(m.entries()); }

/// Accepts the {"dim", "entries"} object or a bare array of rows.
inline PdMatrix matrix_from_json(const nlohmann::json& j) {
  const nlohmann::json* rows = &j;
  std::size_t dim = 0;
  if (j.is_object()) {
    if (!j.contains("entries")) throw DomainError("matrix JSON: missing \"entries\"");
    rows = &j.at("entries");
    if (j.contains("dim")) {
      if (!j.at("dim").is_number_unsigned()) throw DomainError("matrix JSON: \"dim\" must be a positive integer");
      dim = j.at("dim").get<std::size_t>();
    }
  }
  if (!rows->is_array()) throw DomainError("matrix JSON: entries must be an array of rows");
  if (dim == 0) dim = rows->size();
  if (rows->size() != dim) throw DomainError("matrix JSON: number of rows does not match dim");
  std::vector<double> flat;
  for (const auto& row : *rows) {
    if (!row.is_array() || row.size() != dim) throw DomainError("matrix JSON: every row must have dim entries");
    for (const auto& x : row) {
      if (!x.is_number()) throw DomainError("matrix JSON: entries must be numbers");
      flat.push_back(x.get<double>());
    }
  }
  return PdMatrix::from_entries(dim, flat);
}

inline PdMatrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open matrix file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError("matrix file " + path + ": " + e.what());
  }
  return matrix_from_json(j);
}

}  // namespace owenext
