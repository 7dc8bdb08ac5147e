#include "survtree/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "survtree/error.hpp"

namespace survtree {

namespace {

std::vector<std::string> split_line(std::string_view line, std::size_t line_no) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cell.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else {
      cell.push_back(ch);
    }
  }
  if (quoted) throw DataError("line " + std::to_string(line_no) + ": unterminated quote");
  cells.push_back(std::move(cell));
  return cells;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& text, std::size_t line_no, std::string_view what) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end || !std::isfinite(v)) {
    throw DataError("line " + std::to_string(line_no) + ": invalid " + std::string(what) + " '" +
                    text + "'");
  }
  return v;
}

}  // namespace

CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    auto cells = split_line(line, line_no);
    for (auto& c : cells) c = trim(std::move(c));
    if (table.header.empty()) {
      table.header = std::move(cells);
      continue;
    }
    if (cells.size() != table.header.size()) {
      throw DataError("line " + std::to_string(line_no) + ": expected " +
                      std::to_string(table.header.size()) + " fields, found " +
                      std::to_string(cells.size()));
    }
    table.rows.push_back(std::move(cells));
  }
  if (table.header.empty()) throw DataError("CSV input has no header");
  return table;
}

CsvTable read_csv(const std::filesystem::path& path) { return parse_csv(read_file(path)); }

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  std::string out;
  auto emit = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out.push_back(',');
      const bool quote = cells[i].find_first_of(",\"\n") != std::string::npos;
      if (!quote) {
        out += cells[i];
        continue;
      }
      out.push_back('"');
      for (char ch : cells[i]) {
        if (ch == '"') out.push_back('"');
        out.push_back(ch);
      }
      out.push_back('"');
    }
    out.push_back('\n');
  };
  emit(table.header);
  for (const auto& row : table.rows) emit(row);
  write_file(path, out);
}

SurvivalTable to_survival_table(const CsvTable& csv) {
  if (csv.header.size() < 2 || csv.header[0] != "time" || csv.header[1] != "event") {
    throw DataError("line 1: the first two columns must be 'time' and 'event'");
  }
  SurvivalTable out;
  out.features.columns.assign(csv.header.begin() + 2, csv.header.end());
  out.times.reserve(csv.rows.size());
  out.events.reserve(csv.rows.size());
  out.features.rows.reserve(csv.rows.size());
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const auto& row = csv.rows[r];
    const std::size_t line_no = r + 2;
    const double t = parse_number(row[0], line_no, "time");
    if (!(t > 0.0)) throw DataError("line " + std::to_string(line_no) + ": time must be positive");
    if (row[1] != "0" && row[1] != "1") {
      throw DataError("line " + std::to_string(line_no) + ": event must be 0 or 1, got '" +
                      row[1] + "'");
    }
    out.times.push_back(t);
    out.events.push_back(row[1] == "1" ? 1 : 0);
    out.features.rows.emplace_back(row.begin() + 2, row.end());
  }
  return out;
}

RawTable to_feature_table(const CsvTable& csv) {
  std::size_t skip = 0;
  if (csv.header.size() >= 2 && csv.header[0] == "time" && csv.header[1] == "event") skip = 2;
  RawTable out;
  out.columns.assign(csv.header.begin() + static_cast<std::ptrdiff_t>(skip), csv.header.end());
  for (const auto& row : csv.rows) {
    out.rows.emplace_back(row.begin() + static_cast<std::ptrdiff_t>(skip), row.end());
  }
  return out;
}

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

std::string digest_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace survtree
