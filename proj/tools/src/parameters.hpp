#pragma once

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace plm_enet::cli {

/// Every flag of every subcommand, fully resolved. The same record is
/// written into manifest.json, so a rerun sees exactly what the first run saw.
/// The output directory is deliberately not part of it.
struct Parameters {
  // data
  std::string data;
  std::string response = "y";
  std::string covariate = "t";
  std::vector<std::string> predictors;
  bool standardize = true;

  // smoothing; bandwidth <= 0 means c * n^(-1/5)
  std::string kernel = "box";
  double bandwidth = 0.0;
  double bandwidth_c = 1.0;

  // penalty
  std::string method = "enet";
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double gamma = 1.0;
  double tolerance = 1e-8;
  int max_iterations = 10000;
  bool rescaled = false;

  // cross-validation
  int cv_folds = 10;
  int grid_size = 100;
  bool one_se = false;
  bool emit_path = false;

  // 0-1 response pathway
  std::string test_data;
  bool classify = false;
  double threshold = 0.5;

  // simulate
  long long n = 1000;
  int reps = 50;
  double sigma = 0.2;

  // group-effect
  std::string fit_dir;
  std::string pairs = "all";
  bool sign_flip = true;

  std::uint64_t seed = 1;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(Parameters, data, response, covariate, predictors, standardize,
                                                kernel, bandwidth, bandwidth_c, method, lambda1, lambda2, gamma,
                                                tolerance, max_iterations, rescaled, cv_folds, grid_size, one_se,
                                                emit_path, test_data, classify, threshold, n, reps, sigma, fit_dir,
                                                pairs, sign_flip, seed)

}  // namespace plm_enet::cli
