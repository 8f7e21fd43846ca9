#pragma once

#include <plm_enet/data_model.hpp>

#include <initializer_list>
#include <string>
#include <vector>

namespace plm_enet::cli {

/// Comma-separated text built row by row. Numbers go through
/// format_double so that every value round-trips exactly.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  CsvTable& row(std::vector<std::string> cells);
  [[nodiscard]] std::string str() const;

 private:
  std::string text_;
  std::size_t width_;
};

std::string cell(double value);
std::string cell(Index value);
std::string cell(int value);
std::string cell(bool value);

}  // namespace plm_enet::cli
