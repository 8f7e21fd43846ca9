#pragma once

#include "manifest.hpp"
#include "parameters.hpp"

#include <plm_enet/error.hpp>

#include <filesystem>
#include <string>

namespace plm_enet::cli {

/// Process exit codes. Each error class maps to exactly one code.
enum ExitCode : int {
  exit_ok = 0,
  exit_usage = 1,            // bad flags, flag conflicts, invalid configuration
  exit_input = 2,            // unreadable input, schema or ingestion error
  exit_nonconvergence = 3,   // a fit (or too many replicates) did not converge
  exit_degenerate_grid = 4,  // lambda_max is 0
  exit_bound_undefined = 5,  // group effect requested for lambda2 = 0
};

int exit_code_for(ErrorKind kind) noexcept;

int run_fit(const Parameters& params, const std::filesystem::path& out);
int run_cv(const Parameters& params, const std::filesystem::path& out);
int run_simulate(const Parameters& params, const std::filesystem::path& out);
int run_group_effect(const Parameters& params, const std::filesystem::path& out);
int run_smooth(const Parameters& params, const std::filesystem::path& out);

/// Dispatches on the subcommand name ("fit", "cv", ...).
int run_command(const std::string& command, const Parameters& params, const std::filesystem::path& out);

/// Re-executes the run recorded in `manifest_path`, writing into `out`.
/// Fails with an input error if any recorded input changed since.
int run_from_manifest(const std::filesystem::path& manifest_path, const std::filesystem::path& out);

}  // namespace plm_enet::cli
