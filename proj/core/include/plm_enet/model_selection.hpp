#pragma once

#include "plm_enet/data_model.hpp"
#include "plm_enet/enet_solver.hpp"
#include "plm_enet/kernel_smoothing.hpp"

#include <cstdint>
#include <vector>

namespace plm_enet {

/// Random balanced partition of 0..n-1 into k folds (ids 0..k-1); fold sizes
/// differ by at most one. Deterministic in `seed`.
std::vector<int> make_folds(Index n, int k, std::uint64_t seed);

/// Which penalty the grid sweeps. Ridge has no l1 term, so its grid is over lambda2.
enum class TunedParameter { lambda1, lambda2 };

struct CvPlan {
  int k = 10;
  /// Strictly descending penalty values.
  std::vector<double> grid;
  /// Held fixed while lambda1 is tuned.
  double lambda2 = 0.0;
  std::uint64_t seed = 0;
  std::vector<int> fold_assignment;
  /// Pick the largest penalty within one standard error of the minimum.
  bool one_se = false;
};

CvPlan make_cv_plan(Index n, int k, std::vector<double> grid, double lambda2, std::uint64_t seed);
/// Throws ErrorKind::config (or precondition) on an invalid plan.
void validate(const CvPlan& plan, Index n);

/// lambda_max = max_k |2 x_k'y| / w_k, then a log-spaced grid of `grid_size`
/// values down to lambda_max * min_ratio. Throws ErrorKind::degenerate_grid
/// when lambda_max is 0.
std::vector<double> default_lambda1_grid(const Matrix& x, const Vector& y, const PenaltySpec& spec,
                                         int grid_size, double min_ratio = 1e-4);
std::vector<double> default_lambda1_grid(const PartialResiduals& pr, const PenaltySpec& spec,
                                         int grid_size, double min_ratio = 1e-4);

/// Log-spaced lambda2 grid for ridge, from 100 * s down to 1e-4 * s where
/// s = trace(X'X) / p.
std::vector<double> default_lambda2_grid(const Matrix& x, int grid_size);

struct CvOptions {
  SolverOptions solver;
  RidgeOptions ridge;
  AdaptiveLassoOptions alasso;
  int threads = 1;
  /// Grid length used when CvPlan::grid is empty.
  int grid_size = 100;
  double min_ratio = 1e-4;
};

struct CvResult {
  TunedParameter tuned = TunedParameter::lambda1;
  std::vector<double> grid;
  std::vector<double> mean_cv_error;
  std::vector<double> se_cv_error;
  Index best_index = 0;
  double best_value = 0.0;
  /// Held-out points whose kernel neighbourhood in the training T's was empty.
  Index fallback_count = 0;
  /// Fits that did not converge, over all folds and grid points.
  Index nonconverged_fits = 0;
  /// fold_coefficients[f] is p x grid, the fold-f training fits along the grid.
  std::vector<Matrix> fold_coefficients;
};

/// k-fold cross-validation of the penalty along `plan.grid`.
///
/// For every fold the smoother and the penalized fit see the training rows
/// only: partial residuals of the training rows come from partial_out on
/// them, held-out partial residuals come from kernel averages over training
/// rows evaluated at the held-out T's. The fold error is the mean squared
/// held-out prediction error of y_tilde; folds are weighted equally.
///
/// With an empty plan.grid a grid is built here: for lambda1 it starts at the
/// largest lambda_max over the full data and every training fold, so the
/// first grid point yields beta = 0 in every fold.
///
/// `spec` fixes the method (and lambda2 for enet, which must equal
/// plan.lambda2). For alasso without weights the weights are re-estimated
/// inside each fold from the training rows.
CvResult cross_validate(const Dataset& data, const CvPlan& plan, const SmootherConfig& smoother,
                        const PenaltySpec& spec, const CvOptions& opts = {});

/// Index chosen from CV curves: argmin (ties to the smallest index), or the
/// one-standard-error rule.
Index select_index(const std::vector<double>& mean, const std::vector<double>& se, bool one_se);

/// Predicted y at new rows (t, x): m_Y(T) + (X - m_X(T))'beta with the
/// conditional means estimated on `reference` rows.
Vector predict(const Dataset& reference, const Vector& t, const Matrix& x, const Vector& beta,
               const SmootherConfig& smoother);

}  // namespace plm_enet
