#ifndef STARFORMS_CSV_HPP
#define STARFORMS_CSV_HPP

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

namespace starforms {

struct CsvIoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// shortest representation that round-trips a double (up to 17 significant digits)
inline std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row) { rows.push_back(std::move(row)); }

  std::string to_string() const {
    std::string out;
    auto append = [&out](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += cells[i];
      }
      out += '\n';
    };
    append(header);
    for (const auto& r : rows) append(r);
    return out;
  }
};

// Plain CSV: header row, '.' decimal separator, LF line ends, rows in the
// order they were added (callers keep that order deterministic).
inline void emit_csv(const CsvTable& table, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw CsvIoError("emit_csv: cannot open '" + path + "' for writing");
  os << table.to_string();
  if (!os) throw CsvIoError("emit_csv: write to '" + path + "' failed");
}

}  // namespace starforms

#endif
