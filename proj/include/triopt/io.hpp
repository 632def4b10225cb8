#pragma once

#include "triopt/types.hpp"

#include <filesystem>
#include <string>

#include <json.hpp>

namespace triopt {

/// Headerless numeric CSV, '.' decimal separator. Ragged rows or
/// non-numeric cells raise ParseError with the 1-based line number;
/// an empty file raises ParseError with row 0.
Matrix read_csv_matrix(const std::filesystem::path& path);

/// Writes with shortest-round-trip precision (%.17g), LF line endings.
void write_csv_matrix(const std::filesystem::path& path, const Matrix& m);

nlohmann::json dag_to_json(const WeightedDag& dag);
WeightedDag dag_from_json(const nlohmann::json& j);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

void write_order_json(const std::filesystem::path& path, const CausalOrder& order);
CausalOrder read_order_json(const std::filesystem::path& path);

std::string format_double(double v);

}  // namespace triopt
