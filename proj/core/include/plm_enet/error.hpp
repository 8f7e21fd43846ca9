#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace plm_enet {

/// Error classes raised by the library. The CLI maps each one to a distinct
/// exit code, so keep this list in sync with tools/src/commands.hpp.
enum class ErrorKind {
  schema,              // missing or duplicated column in a CSV schema
  ingestion,           // unparseable or non-finite cell, malformed file
  degenerate_column,   // zero-variance design column
  dimension,           // length / shape mismatch between arguments
  precondition,        // argument outside its documented domain
  config,              // inconsistent penalty, smoother or plan settings
  empty_neighborhood,  // kernel weights sum to zero at an evaluation point
  degenerate_grid,     // lambda_max == 0, no grid can be formed
  bound_undefined,     // group-effect bound requested with lambda2 == 0
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace plm_enet
