#pragma once

#include "macrostate/pipeline.hpp"
#include "macrostate/validation.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace macrostate {

using Json = nlohmann::ordered_json;

/// Shortest round-trip decimal form of `x`.
std::string format_double(double x);

/// JSON header {dims, spacing, origin} with either an inline "values" array,
/// a "values_file" path (relative to the header), or a sibling .csv file.
DensityGrid read_density_grid(const std::filesystem::path& path);
void write_density_grid(const std::filesystem::path& path, const DensityGrid& grid);

/// One item per row. A header row is detected when any field of the first
/// row is not numeric. `round_step > 0` rounds every value to the nearest
/// multiple of the step and drops duplicate rows, keeping the first.
ItemSet read_items_csv(const std::filesystem::path& path, bool id_column = false,
                       double round_step = 0.0);

/// "src dst [weight]" per line, tab or space separated, '#' comments.
GraphSpec read_graph_tsv(const std::filesystem::path& path, bool directed = true);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

/// Numeric matrix from a CSV with a header row.
Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path);
void write_matrix_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                      const Eigen::MatrixXd& values);

/// Labels from the "label" column, or the last column when there is none.
std::vector<int> read_labels_csv(const std::filesystem::path& path);

/// beta, r_2 .. r_{m_max}; failed columns are written as empty fields.
void write_gap_table_csv(const std::filesystem::path& path, const GapTable& table);

/// {beta, m, upsilon, a, M, rates, gaps}.
Json model_json(const FitResult& result);
Json error_json(const std::exception& e);

void write_json(const std::filesystem::path& path, const Json& json);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace macrostate
