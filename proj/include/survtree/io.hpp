#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace survtree {

// Header plus rows of raw string cells.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Comma-separated, optional double quotes, first line is the header. Rows
// whose width differs from the header raise DataError naming the line.
CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

// Raw feature columns of a survival CSV.
struct RawTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

// time, event, then feature columns.
struct SurvivalTable {
  std::vector<double> times;
  std::vector<int> events;
  RawTable features;
};

// Requires the first two columns to be named time and event.
SurvivalTable to_survival_table(const CsvTable& csv);
// Feature-only view for prediction inputs: time/event columns are dropped
// when present.
RawTable to_feature_table(const CsvTable& csv);

// 17 significant digits.
std::string format_double(double value);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

// FNV-1a 64-bit digest as 16 hex characters.
std::string digest_hex(std::string_view bytes);

}  // namespace survtree
