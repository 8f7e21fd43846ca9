#include "plm_enet/model_selection.hpp"

#include "plm_enet/error.hpp"
#include "plm_enet/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace plm_enet {

std::vector<int> make_folds(Index n, int k, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorKind::config, "cross-validation needs k >= 2");
  if (static_cast<Index>(k) > n) {
    throw Error(ErrorKind::config, "cannot split " + std::to_string(n) + " rows into " +
                                       std::to_string(k) + " folds");
  }
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> folds(static_cast<std::size_t>(n));
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    folds[static_cast<std::size_t>(order[pos])] = static_cast<int>(pos % static_cast<std::size_t>(k));
  }
  return folds;
}

CvPlan make_cv_plan(Index n, int k, std::vector<double> grid, double lambda2, std::uint64_t seed) {
  CvPlan plan;
  plan.k = k;
  plan.grid = std::move(grid);
  plan.lambda2 = lambda2;
  plan.seed = seed;
  plan.fold_assignment = make_folds(n, k, seed);
  validate(plan, n);
  return plan;
}

void validate(const CvPlan& plan, Index n) {
  if (plan.k < 2) throw Error(ErrorKind::config, "cross-validation needs k >= 2");
  if (static_cast<Index>(plan.fold_assignment.size()) != n) {
    throw Error(ErrorKind::config, "fold assignment length differs from the number of rows");
  }
  std::vector<Index> sizes(static_cast<std::size_t>(plan.k), 0);
  for (int f : plan.fold_assignment) {
    if (f < 0 || f >= plan.k) throw Error(ErrorKind::config, "fold id out of range");
    ++sizes[static_cast<std::size_t>(f)];
  }
  const auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
  if (*lo < 1) throw Error(ErrorKind::config, "every fold needs at least one observation");
  if (*hi - *lo > 1) throw Error(ErrorKind::config, "fold sizes differ by more than one");
  for (std::size_t i = 0; i < plan.grid.size(); ++i) {
    if (!(plan.grid[i] > 0.0) || !std::isfinite(plan.grid[i])) {
      throw Error(ErrorKind::config, "grid values must be positive and finite");
    }
    if (i > 0 && !(plan.grid[i] < plan.grid[i - 1])) {
      throw Error(ErrorKind::config, "grid must be strictly descending");
    }
  }
  if (!(plan.lambda2 >= 0.0)) throw Error(ErrorKind::config, "lambda2 must be >= 0");
}

namespace {

std::vector<double> log_spaced(double top, double ratio, int size) {
  std::vector<double> grid(static_cast<std::size_t>(size));
  const double log_top = std::log(top);
  const double step = std::log(ratio) / static_cast<double>(size - 1);
  grid.front() = top;
  for (int i = 1; i < size; ++i) grid[static_cast<std::size_t>(i)] = std::exp(log_top + step * i);
  return grid;
}

void check_grid_request(int grid_size, double min_ratio) {
  if (grid_size < 2) throw Error(ErrorKind::precondition, "grid size must be >= 2");
  if (!(min_ratio > 0.0 && min_ratio < 1.0)) {
    throw Error(ErrorKind::precondition, "grid ratio must lie in (0, 1)");
  }
}

}  // namespace

std::vector<double> default_lambda1_grid(const Matrix& x, const Vector& y, const PenaltySpec& spec,
                                         int grid_size, double min_ratio) {
  check_grid_request(grid_size, min_ratio);
  const double top = lambda1_max(x, y, spec);
  if (!(top > 0.0)) throw Error(ErrorKind::degenerate_grid, "lambda_max is zero; response has no signal");
  return log_spaced(top, min_ratio, grid_size);
}

std::vector<double> default_lambda1_grid(const PartialResiduals& pr, const PenaltySpec& spec,
                                         int grid_size, double min_ratio) {
  return default_lambda1_grid(pr.x_tilde, pr.y_tilde, spec, grid_size, min_ratio);
}

std::vector<double> default_lambda2_grid(const Matrix& x, int grid_size) {
  check_grid_request(grid_size, 1e-6);
  const double s = x.colwise().squaredNorm().sum() / static_cast<double>(x.cols());
  if (!(s > 0.0)) throw Error(ErrorKind::degenerate_grid, "design has no variation");
  return log_spaced(100.0 * s, 1e-6, grid_size);
}

Index select_index(const std::vector<double>& mean, const std::vector<double>& se, bool one_se) {
  if (mean.empty()) throw Error(ErrorKind::precondition, "empty CV curve");
  Index best = 0;
  for (std::size_t i = 1; i < mean.size(); ++i) {
    if (mean[i] < mean[static_cast<std::size_t>(best)]) best = static_cast<Index>(i);
  }
  if (!one_se) return best;
  const double limit = mean[static_cast<std::size_t>(best)] + se[static_cast<std::size_t>(best)];
  for (std::size_t i = 0; i < mean.size(); ++i) {
    if (mean[i] <= limit) return static_cast<Index>(i);
  }
  return best;
}

namespace {

struct FoldData {
  PartialResiduals train;
  PartialResiduals held_out;
  Index fallbacks = 0;
  PenaltySpec spec;
};

FoldData prepare_fold(const Dataset& data, const std::vector<int>& folds, int fold,
                      const SmootherConfig& smoother, const PenaltySpec& spec, const CvOptions& opts) {
  std::vector<Index> train_rows, test_rows;
  for (std::size_t i = 0; i < folds.size(); ++i) {
    (folds[i] == fold ? test_rows : train_rows).push_back(static_cast<Index>(i));
  }
  const Dataset train = data.subset(train_rows);
  const auto m = static_cast<Index>(test_rows.size());
  Vector y(m), t(m);
  Matrix x(m, data.p());
  for (Index r = 0; r < m; ++r) {
    const Index src = test_rows[static_cast<std::size_t>(r)];
    y(r) = data.y()(src);
    t(r) = data.t()(src);
    x.row(r) = data.x().row(src);
  }
  FoldData out;
  out.train = partial_out(train, smoother);
  auto held = partial_out_against(train, y, t, x, smoother);
  out.held_out = std::move(held.residuals);
  out.fallbacks = static_cast<Index>(held.fallback_points.size());
  out.spec = spec;
  if (spec.method == Method::alasso && !spec.adaptive_weights) {
    out.spec.adaptive_weights = adaptive_weights(out.train.x_tilde, out.train.y_tilde, opts.alasso);
    out.spec.adaptive_gamma = opts.alasso.gamma;
  }
  return out;
}

}  // namespace

CvResult cross_validate(const Dataset& data, const CvPlan& plan, const SmootherConfig& smoother,
                        const PenaltySpec& spec, const CvOptions& opts) {
  validate(plan, data.n());
  validate(smoother);
  if (spec.method == Method::ols) throw Error(ErrorKind::config, "ols has no penalty to cross-validate");
  if (spec.method == Method::enet && spec.lambda2 != plan.lambda2) {
    throw Error(ErrorKind::config, "enet lambda2 differs from the plan's fixed lambda2");
  }
  const bool tune_lambda2 = spec.method == Method::ridge;

  std::vector<FoldData> folds(static_cast<std::size_t>(plan.k));
  parallel_for(folds.size(), opts.threads, [&](std::size_t f) {
    folds[f] = prepare_fold(data, plan.fold_assignment, static_cast<int>(f), smoother, spec, opts);
  });

  CvResult result;
  result.tuned = tune_lambda2 ? TunedParameter::lambda2 : TunedParameter::lambda1;
  result.grid = plan.grid;
  if (result.grid.empty()) {
    const PartialResiduals full = partial_out(data, smoother);
    if (tune_lambda2) {
      result.grid = default_lambda2_grid(full.x_tilde, opts.grid_size);
    } else {
      PenaltySpec full_spec = spec;
      if (spec.method == Method::alasso && !spec.adaptive_weights) {
        full_spec.adaptive_weights = adaptive_weights(full.x_tilde, full.y_tilde, opts.alasso);
      }
      double top = lambda1_max(full.x_tilde, full.y_tilde, full_spec);
      for (const auto& fold : folds) {
        top = std::max(top, lambda1_max(fold.train.x_tilde, fold.train.y_tilde, fold.spec));
      }
      if (!(top > 0.0)) throw Error(ErrorKind::degenerate_grid, "lambda_max is zero; response has no signal");
      check_grid_request(opts.grid_size, opts.min_ratio);
      result.grid = log_spaced(top, opts.min_ratio, opts.grid_size);
    }
  }

  const std::size_t grid_len = result.grid.size();
  std::vector<std::vector<double>> errors(folds.size(), std::vector<double>(grid_len));
  std::vector<Index> nonconverged(folds.size(), 0);
  result.fold_coefficients.resize(folds.size());
  parallel_for(folds.size(), opts.threads, [&](std::size_t f) {
    const FoldData& fold = folds[f];
    Matrix& coefs = result.fold_coefficients[f];
    coefs.resize(data.p(), static_cast<Index>(grid_len));
    if (tune_lambda2) {
      for (std::size_t g = 0; g < grid_len; ++g) {
        const FitResult r = fit_ridge_closed_form(fold.train.x_tilde, fold.train.y_tilde, result.grid[g], opts.ridge);
        coefs.col(static_cast<Index>(g)) = r.beta.values;
        if (!r.converged) ++nonconverged[f];
      }
    } else {
      const auto path = fit_path(fold.train.x_tilde, fold.train.y_tilde, fold.spec, result.grid, opts.solver);
      for (std::size_t g = 0; g < grid_len; ++g) {
        coefs.col(static_cast<Index>(g)) = path[g].beta.values;
        if (!path[g].converged) ++nonconverged[f];
      }
    }
    const Matrix predictions = fold.held_out.x_tilde * coefs;
    for (std::size_t g = 0; g < grid_len; ++g) {
      errors[f][g] = (fold.held_out.y_tilde - predictions.col(static_cast<Index>(g))).squaredNorm() /
                     static_cast<double>(fold.held_out.n());
    }
  });

  const auto k = static_cast<double>(folds.size());
  result.mean_cv_error.resize(grid_len);
  result.se_cv_error.resize(grid_len);
  for (std::size_t g = 0; g < grid_len; ++g) {
    double mean = 0.0;
    for (const auto& fe : errors) mean += fe[g];
    mean /= k;
    double ss = 0.0;
    for (const auto& fe : errors) ss += (fe[g] - mean) * (fe[g] - mean);
    result.mean_cv_error[g] = mean;
    result.se_cv_error[g] = std::sqrt(ss / (k - 1.0)) / std::sqrt(k);
  }
  for (std::size_t f = 0; f < folds.size(); ++f) {
    result.fallback_count += folds[f].fallbacks;
    result.nonconverged_fits += nonconverged[f];
  }
  result.best_index = select_index(result.mean_cv_error, result.se_cv_error, plan.one_se);
  result.best_value = result.grid[static_cast<std::size_t>(result.best_index)];
  return result;
}

Vector predict(const Dataset& reference, const Vector& t, const Matrix& x, const Vector& beta,
               const SmootherConfig& smoother) {
  if (beta.size() != reference.p()) throw Error(ErrorKind::dimension, "predict: beta length mismatch");
  const Vector zeros = Vector::Zero(t.size());
  const auto held = partial_out_against(reference, zeros, t, x, smoother);
  // y_hat = m_Y + x_tilde' beta; the zero response gives y_tilde = -m_Y.
  return -held.residuals.y_tilde + held.residuals.x_tilde * beta;
}

}  // namespace plm_enet
