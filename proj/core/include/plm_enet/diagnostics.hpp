#pragma once

#include "plm_enet/data_model.hpp"
#include "plm_enet/enet_solver.hpp"
#include "plm_enet/kernel_smoothing.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace plm_enet {

/// Group effect of a coefficient pair and its upper bound
///   D(k,l) = |beta_k - beta_l| <= (2 m / lambda2) sum_i |r_i|,
///   m = max_i |x_ik - x_il|,
/// where x is the (standardized) design before kernel smoothing and r the
/// fit's in-sample residuals. The bound is guaranteed when beta_k beta_l > 0.
struct GroupEffectReport {
  std::pair<Index, Index> pair{0, 0};
  double d_value = 0.0;
  double m_value = 0.0;
  double bound = 0.0;
  bool sign_condition_met = false;
  double residual_l1 = 0.0;
  /// Column k entered as -x_k (and beta_k as -beta_k).
  bool k_negated = false;

  /// d_value <= bound + slack.
  [[nodiscard]] bool satisfied(double slack = 1e-8) const { return d_value <= bound + slack; }
};

struct GroupEffectResult {
  GroupEffectReport report;
  /// Re-evaluation against -x_k when the signs of beta_k and beta_l differ.
  std::optional<GroupEffectReport> sign_flipped;
};

/// Throws ErrorKind::bound_undefined when lambda2 <= 0 and
/// ErrorKind::precondition when k == l or an index is out of range.
GroupEffectResult group_effect(const FitResult& fit, const Matrix& raw_x, std::pair<Index, Index> pair,
                               double lambda2, bool sign_flip = true);

/// Every unordered pair k < l.
std::vector<GroupEffectResult> group_effect_all_pairs(const FitResult& fit, const Matrix& raw_x,
                                                      double lambda2, bool sign_flip = true);

struct KktReport {
  /// Per coordinate: |d/d beta_k| for active coordinates,
  /// max(0, |2 x_k'r| - lambda1 w_k) for inactive ones.
  Vector violations;
  double max_violation = 0.0;
  bool passed = false;
};

/// Recomputes the residuals from fit.beta and checks the subgradient
/// stationarity conditions of the naive objective at tolerance `tol`.
KktReport kkt_check(const FitResult& fit, const Matrix& x, const Vector& y, const PenaltySpec& spec, double tol);
KktReport kkt_check(const FitResult& fit, const PartialResiduals& pr, const PenaltySpec& spec, double tol);

/// ||beta_hat - beta_true||^2.
double mse(const CoefficientVector& beta_hat, const CoefficientVector& beta_true);
double mse(const Vector& beta_hat, const Vector& beta_true);

}  // namespace plm_enet
