#pragma once

#include "plm_enet/data_model.hpp"
#include "plm_enet/diagnostics.hpp"
#include "plm_enet/enet_solver.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace plm_enet {

/// Nonparametric component f(T) of the simulated model.
enum class NonparametricTerm { t_squared };

struct SimulationConfig {
  Index n = 1000;
  int reps = 50;
  /// Noise standard deviation (variance 0.04 by default).
  double sigma = 0.2;
  double lambda2 = 1.0 / 3.0;
  int cv_folds = 10;
  std::uint64_t seed = 1;
  NonparametricTerm f = NonparametricTerm::t_squared;
  /// h = c * n^(-1/5), box kernel.
  double bandwidth_constant = 1.0;
  int grid_size = 100;
  bool one_se = false;
  int threads = 1;
  SolverOptions solver;
};

void validate(const SimulationConfig& config);

/// beta = (-2, 1, 1, 0, 2/3, 0, 0, 0).
CoefficientVector simulation_true_beta();

struct SimulatedData {
  Dataset data;
  CoefficientVector beta_true;
};

/// One replicate of the eight-predictor design with x3 = x2 (bitwise) and
/// x4 = (2/3)x1 + (1/3)x2 + (1/3)x3 + (2/3)e; T ~ U[-1, 1];
/// y = X beta + T^2 + eps, eps ~ N(0, sigma^2). Deterministic in (seed, rep).
SimulatedData generate_dgp(const SimulationConfig& config, int rep_index);

/// Methods compared by the experiment, in report order.
inline constexpr std::array<Method, 4> kExperimentMethods{Method::lasso, Method::alasso, Method::ridge,
                                                          Method::enet};

struct MethodFit {
  Method method = Method::enet;
  /// Original-scale coefficients.
  Vector beta;
  double mse = 0.0;
  bool converged = false;
  /// Selected penalty (lambda1, or lambda2 for ridge) and its grid index.
  double selected_penalty = 0.0;
  Index selected_index = 0;
};

struct ReplicateResult {
  int rep = 0;
  bool failed = false;
  std::vector<MethodFit> fits;  // kExperimentMethods order
  /// Group effect of (x2, x3) for the enet fit, on the standardized design.
  GroupEffectReport enet_pair_23;
};

struct MethodSummary {
  Method method = Method::enet;
  Vector mean_coefficients;
  Vector mean_abs_coefficients;
  double mse_mean = 0.0;
  double mse_se = 0.0;
  /// Fraction of replicates with beta_j != 0.
  Vector selection_frequency;
  double mean_selected_index = 0.0;
};

struct GroupEffectSummary {
  double d_mean = 0.0;
  double d_max = 0.0;
  double m_max = 0.0;
  double bound_max = 0.0;
  int violations = 0;
};

struct ExperimentReport {
  SimulationConfig config;
  std::vector<std::string> column_names;
  std::vector<MethodSummary> methods;  // kExperimentMethods order
  GroupEffectSummary group_effect;
  std::vector<ReplicateResult> replicates;
  int failed_replicates = 0;
  /// More than 10% of replicates failed.
  bool run_failed = false;

  [[nodiscard]] const MethodSummary& summary(Method method) const;
};

/// Per replicate: generate, standardize, partial out (box kernel,
/// h = c n^(-1/5)), choose each method's penalty by k-fold CV and refit on
/// all rows. Lasso and adaptive lasso leave duplicated columns untied; ridge
/// drops aliased columns; the elastic net holds lambda2 fixed.
ExperimentReport run_experiment(const SimulationConfig& config);

/// Fits one already generated replicate; exposed for tests.
ReplicateResult run_replicate(const SimulationConfig& config, int rep_index);

/// High-dimensional surrogate: n rows, p > n predictors. Each group is a
/// latent N(0,1) factor plus N(0, within_noise^2) per member; remaining
/// predictors are iid N(0,1). beta is `signal` on every member of every
/// group (alternating sign by group) and 0 elsewhere. The response is 1 when
/// X beta + N(0, response_noise^2) exceeds its sample median, else 0.
struct HighDimConfig {
  Index n = 38;
  Index p = 500;
  std::vector<Index> group_sizes{10, 10};
  std::uint64_t seed = 1;
  double within_noise = 0.2;
  double signal = 1.0;
  double response_noise = 1.0;
};

SimulatedData generate_pggn(const HighDimConfig& config);
SimulatedData generate_pggn(Index n, Index p, const std::vector<Index>& group_sizes, std::uint64_t seed);

}  // namespace plm_enet
