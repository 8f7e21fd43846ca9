#pragma once

#include "plm_enet/data_model.hpp"
#include "plm_enet/kernel_smoothing.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace plm_enet {

/// Penalized least-squares objective used throughout:
///
///   L(beta) = ||y - X beta||^2 + lambda2 ||beta||^2 + lambda1 sum_j w_j |beta_j|
///
/// The residual sum of squares is NOT divided by 2n, so lambda values here are
/// larger than glmnet-style lambdas by a factor of order n. See
/// `from_normalized_penalty` for the conversion.
enum class Method { enet, lasso, alasso, ridge, ols };

std::string_view to_string(Method method) noexcept;
Method parse_method(std::string_view name);

struct PenaltySpec {
  Method method = Method::enet;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  /// Per-coordinate l1 weights; alasso only.
  std::optional<Vector> adaptive_weights;
  double adaptive_gamma = 1.0;

  static PenaltySpec enet(double lambda1, double lambda2);
  static PenaltySpec lasso(double lambda1);
  static PenaltySpec alasso(double lambda1, Vector weights, double gamma = 1.0);
  static PenaltySpec ridge(double lambda2);
  static PenaltySpec ols();

  [[nodiscard]] double l1_weight(Index j) const {
    return adaptive_weights ? (*adaptive_weights)(j) : 1.0;
  }
  [[nodiscard]] PenaltySpec with_lambda1(double value) const;
  [[nodiscard]] PenaltySpec with_lambda2(double value) const;
};

/// Throws ErrorKind::config when the method tag and (lambda1, lambda2,
/// weights) disagree, e.g. lasso with lambda2 != 0.
void validate(const PenaltySpec& spec, Index p);

/// (lambda1, lambda2) for this objective from a glmnet-style pair
/// (lambda, alpha) with loss (1/2n)||y - X b||^2 + lambda(alpha|b|_1 + (1-alpha)/2 |b|^2).
struct PenaltyPair {
  double lambda1;
  double lambda2;
};
PenaltyPair from_normalized_penalty(double lambda, double alpha, Index n);

struct SolverOptions {
  /// Stop when the largest coordinate move in a sweep is below
  /// tolerance * (1 + max|beta_j|) and every stationarity condition holds to
  /// within `tolerance`.
  double tolerance = 1e-8;
  int max_iterations = 10000;
  /// Report (1 + lambda2) * beta (the rescaled variant) instead of the naive
  /// minimizer. Off by default.
  bool rescaled = false;
  /// Keep the objective value after every sweep in FitResult::objective_trace.
  bool record_trace = false;
  /// Bitwise-identical columns share one coefficient when lambda2 > 0. With
  /// lambda2 = 0 the group total goes to its lowest-weight (then lowest-index)
  /// member and the rest stay at 0.
  bool symmetrize_duplicates = true;
  /// Solve the smooth problem on a stable active set exactly.
  bool active_set_refinement = true;
};

struct FitResult {
  CoefficientVector beta;
  /// r_i = y_i - sum_j beta_j x_ij for the reported beta.
  Vector residuals;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Largest stationarity violation at the naive minimizer.
  double dual_gap_proxy = 0.0;
  PenaltySpec spec;
  /// 1 for the naive estimator, 1 + lambda2 when SolverOptions::rescaled.
  double rescale_factor = 1.0;
  std::vector<double> objective_trace;
  std::vector<std::string> notes;

  [[nodiscard]] Index nonzero_count() const;
  /// Coefficients of the naive minimizer (beta / rescale_factor).
  [[nodiscard]] Vector naive_beta() const { return beta.values / rescale_factor; }
};

double objective(const Vector& beta, const Matrix& x, const Vector& y, const PenaltySpec& spec);
double objective(const CoefficientVector& beta, const PartialResiduals& pr, const PenaltySpec& spec);

/// Cyclic coordinate descent, ascending column order, soft-thresholding update
///   beta_k <- S(2 x_k'(y - sum_{j!=k} beta_j x_j), lambda1 w_k) / (2 x_k'x_k + 2 lambda2).
/// `warm_start`, when given, must have length p.
FitResult fit(const Matrix& x, const Vector& y, const PenaltySpec& spec,
              const SolverOptions& opts = {}, const Vector* warm_start = nullptr);
FitResult fit(const PartialResiduals& pr, const PenaltySpec& spec, const SolverOptions& opts = {},
              const Vector* warm_start = nullptr);

/// Fits along a strictly descending lambda1 grid, warm-starting each point
/// from the previous solution. The grid overrides spec.lambda1.
std::vector<FitResult> fit_path(const Matrix& x, const Vector& y, const PenaltySpec& spec,
                                const std::vector<double>& lambda1_grid,
                                const SolverOptions& opts = {});

/// Lasso reformulation of the elastic net on (n+p) x p augmented data.
struct AugmentedProblem {
  Matrix x_star;
  Vector y_star;
  /// (1 + lambda2)^(-1/2)
  double scale = 1.0;
  double lambda_star = 0.0;
};

/// x_star = scale * [X; sqrt(lambda2) I], y_star = [y; 0], lambda_star = lambda1 * scale.
/// The naive elastic net solution is scale * (lasso solution on the augmented data).
AugmentedProblem augment_to_lasso(const Matrix& x, const Vector& y, double lambda2, double lambda1);
AugmentedProblem augment_to_lasso(const PartialResiduals& pr, double lambda2, double lambda1);

/// Elastic net solved through the augmented Lasso; returned in the original
/// coordinates with residuals and objective of the original problem.
FitResult fit_via_augmentation(const Matrix& x, const Vector& y, double lambda1, double lambda2,
                               const SolverOptions& opts = {});

struct RidgeOptions {
  /// Keep only the lowest-index member of each group of bitwise-identical
  /// columns; the others are fixed at 0. Mirrors least-squares software that
  /// drops aliased columns.
  bool drop_duplicate_columns = false;
  /// Condition number of X'X + lambda2 I above which a note is attached.
  double condition_warning = 1e12;
};

/// beta = (X'X + lambda2 I)^(-1) X'y via Cholesky.
FitResult fit_ridge_closed_form(const Matrix& x, const Vector& y, double lambda2,
                                const RidgeOptions& opts = {});
FitResult fit_ridge_closed_form(const PartialResiduals& pr, double lambda2,
                                const RidgeOptions& opts = {});

struct AdaptiveLassoOptions {
  /// Ridge penalty of the initial estimator; negative means 1e-3 * n.
  double initial_lambda2 = -1.0;
  double gamma = 1.0;
  double weight_guard = 1e-6;
};

/// w_j = 1 / (|beta_init_j| + guard)^gamma from a ridge initial estimator.
Vector adaptive_weights(const Matrix& x, const Vector& y, const AdaptiveLassoOptions& opts = {});

FitResult fit_alasso(const Matrix& x, const Vector& y, double lambda1,
                     const AdaptiveLassoOptions& alasso = {}, const SolverOptions& opts = {});
FitResult fit_alasso(const PartialResiduals& pr, double lambda1,
                     const AdaptiveLassoOptions& alasso = {}, const SolverOptions& opts = {});

/// Groups of bitwise-identical columns (only groups with two or more members).
std::vector<std::vector<Index>> duplicate_column_groups(const Matrix& x);

/// max_k |2 x_k'y| / w_k: the smallest lambda1 whose solution is exactly 0.
double lambda1_max(const Matrix& x, const Vector& y, const PenaltySpec& spec);

}  // namespace plm_enet
