#pragma once

#include "plm_enet/data_model.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace plm_enet {

enum class Kernel { box, epanechnikov, gaussian };

std::string_view to_string(Kernel kernel) noexcept;
/// Accepts "box", "epanechnikov", "gaussian"; throws ErrorKind::config otherwise.
Kernel parse_kernel(std::string_view name);

/// K(u). Box: 1/2 on |u| <= 1. Epanechnikov: 3/4 (1 - u^2) on |u| <= 1.
/// Gaussian: standard normal density.
double kernel_weight(Kernel kernel, double u) noexcept;

/// h = c * n^(-1/5). Requires n >= 2 and c > 0.
double default_bandwidth(Index n, double c);

struct SmootherConfig {
  Kernel kernel = Kernel::box;
  double bandwidth = 1.0;
  /// The c in c * n^(-1/5); informational once `bandwidth` is set.
  double bandwidth_constant = 1.0;
  /// Drop the evaluation point from its own average. Diagnostics only.
  bool leave_one_out = false;
};

/// Box kernel with h = c * n^(-1/5).
SmootherConfig rule_of_thumb_smoother(Index n, double c = 1.0, Kernel kernel = Kernel::box);
void validate(const SmootherConfig& config);

/// Nadaraya-Watson fitted means at the sample points:
///   m(T_j) = sum_i K((T_i - T_j)/h) v_i / sum_i K((T_i - T_j)/h).
/// Columns are smoothed independently.
Vector nw_smooth(const Vector& values, const Vector& t, const SmootherConfig& config);
Matrix nw_smooth(const Matrix& values, const Vector& t, const SmootherConfig& config);

struct OffSampleSmooth {
  Matrix fitted;
  /// Evaluation points with no positive kernel weight; they received the
  /// column means of the reference values instead.
  std::vector<Index> fallback_points;
};

/// Smooths `values` (observed at `t`) and evaluates the fit at `eval_t`.
OffSampleSmooth nw_smooth_at(const Matrix& values, const Vector& t, const Vector& eval_t,
                             const SmootherConfig& config);

/// Kernel-residualized design and response: x_tilde = X - m_X(T),
/// y_tilde = y - m_Y(T).
struct PartialResiduals {
  Matrix x_tilde;
  Vector y_tilde;
  SmootherConfig config;
  Matrix mx_hat;
  Vector my_hat;
  std::vector<std::string> column_names;

  [[nodiscard]] Index n() const noexcept { return y_tilde.size(); }
  [[nodiscard]] Index p() const noexcept { return x_tilde.cols(); }
};

PartialResiduals partial_out(const Dataset& data, const SmootherConfig& config);

/// Partial residuals of `target` rows using conditional means estimated on
/// `reference` rows only. `fallback_points` lists target rows that had an
/// empty kernel neighborhood in the reference T's.
struct OffSampleResiduals {
  PartialResiduals residuals;
  std::vector<Index> fallback_points;
};

OffSampleResiduals partial_out_against(const Dataset& reference, const Dataset& target,
                                       const SmootherConfig& config);
/// Same, for target rows given as raw containers (allows a single row).
OffSampleResiduals partial_out_against(const Dataset& reference, const Vector& y, const Vector& t,
                                       const Matrix& x, const SmootherConfig& config);

}  // namespace plm_enet
