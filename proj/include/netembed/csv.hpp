#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "netembed/errors.hpp"

namespace netembed {

// Shortest representation that round-trips to the same double; keeps CSV
// bodies byte-stable across runs.
inline std::string format_double(double value) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

inline std::string format_u64(std::uint64_t value) {
  char buf[32];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

// Writes '#'-prefixed metadata lines, a header row, then data rows, all with
// '\n' endings. Cells are written verbatim; callers pass preformatted text.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header,
            const std::vector<std::pair<std::string, std::string>>& meta = {})
      : out_(path, std::ios::binary), columns_(header.size()) {
    if (!out_)
      throw std::runtime_error("csv: cannot open '" + path + "' for writing");
    for (const auto& [key, value] : meta)
      out_ << "# " << key << "=" << value << "\n";
    write_row(header);
  }

  void row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_)
      throw std::invalid_argument("csv: row has " + std::to_string(cells.size()) +
                                  " cells, header has " + std::to_string(columns_));
    write_row(cells);
  }

 private:
  void write_row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

  std::ofstream out_;
  std::size_t columns_;
};

struct CsvTable {
  std::vector<std::string> meta;    // '#' lines, without the marker
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column_of(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    return -1;
  }

  std::string available_columns() const {
    std::string list;
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i) list += ", ";
      list += header[i];
    }
    return list;
  }
};

// Reads the simple dialect CsvWriter produces: no quoting, '#' metadata
// preamble, one header row.
inline CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("csv: cannot open '" + path + "'");
  CsvTable table;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string note = line.substr(1);
      if (!note.empty() && note[0] == ' ') note.erase(0, 1);
      table.meta.push_back(note);
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.push_back("");
    if (!have_header) {
      table.header = std::move(cells);
      have_header = true;
    } else {
      table.rows.push_back(std::move(cells));
    }
  }
  if (!have_header) throw std::runtime_error("csv: '" + path + "' has no header");
  return table;
}

}  // namespace netembed
