#include "tables.hpp"

#include <plm_enet/error.hpp>

namespace plm_enet::cli {

namespace {

void append_line(std::string& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) out += ',';
    out += cells[i];
  }
  out += '\n';
}

}  // namespace

CsvTable::CsvTable(std::vector<std::string> header) : width_(header.size()) { append_line(text_, header); }

CsvTable& CsvTable::row(std::vector<std::string> cells) {
  if (cells.size() != width_) throw Error(ErrorKind::dimension, "table row has the wrong number of cells");
  append_line(text_, cells);
  return *this;
}

std::string CsvTable::str() const { return text_; }

std::string cell(double value) { return format_double(value); }
std::string cell(Index value) { return std::to_string(value); }
std::string cell(int value) { return std::to_string(value); }
std::string cell(bool value) { return value ? "1" : "0"; }

}  // namespace plm_enet::cli
