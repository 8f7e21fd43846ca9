#include "plm_enet/diagnostics.hpp"

#include "plm_enet/error.hpp"

#include <algorithm>
#include <cmath>

namespace plm_enet {

namespace {

GroupEffectReport evaluate_pair(const Vector& beta, const Matrix& raw_x, Index k, Index l, double lambda2,
                                double residual_l1, bool negate_k) {
  const double sk = negate_k ? -1.0 : 1.0;
  GroupEffectReport report;
  report.pair = {k, l};
  report.k_negated = negate_k;
  const double bk = sk * beta(k);
  const double bl = beta(l);
  report.d_value = std::abs(bk - bl);
  report.m_value = (sk * raw_x.col(k) - raw_x.col(l)).cwiseAbs().maxCoeff();
  report.residual_l1 = residual_l1;
  report.bound = 2.0 * report.m_value * residual_l1 / lambda2;
  report.sign_condition_met = bk * bl > 0.0;
  return report;
}

}  // namespace

GroupEffectResult group_effect(const FitResult& fit, const Matrix& raw_x, std::pair<Index, Index> pair,
                               double lambda2, bool sign_flip) {
  if (!(lambda2 > 0.0)) {
    throw Error(ErrorKind::bound_undefined, "group-effect bound divides by lambda2, which is 0");
  }
  const auto [k, l] = pair;
  const Index p = fit.beta.values.size();
  if (k == l) throw Error(ErrorKind::precondition, "group effect needs two distinct columns");
  if (k < 0 || l < 0 || k >= p || l >= p) throw Error(ErrorKind::precondition, "column index out of range");
  if (raw_x.cols() != p) throw Error(ErrorKind::dimension, "design width differs from the coefficient vector");
  if (raw_x.rows() != fit.residuals.size()) {
    throw Error(ErrorKind::dimension, "design rows differ from the residual length");
  }
  const double residual_l1 = fit.residuals.cwiseAbs().sum();
  GroupEffectResult result;
  result.report = evaluate_pair(fit.beta.values, raw_x, k, l, lambda2, residual_l1, false);
  if (sign_flip && fit.beta.values(k) * fit.beta.values(l) < 0.0) {
    result.sign_flipped = evaluate_pair(fit.beta.values, raw_x, k, l, lambda2, residual_l1, true);
  }
  return result;
}

std::vector<GroupEffectResult> group_effect_all_pairs(const FitResult& fit, const Matrix& raw_x,
                                                      double lambda2, bool sign_flip) {
  std::vector<GroupEffectResult> out;
  const Index p = fit.beta.values.size();
  for (Index k = 0; k < p; ++k) {
    for (Index l = k + 1; l < p; ++l) out.push_back(group_effect(fit, raw_x, {k, l}, lambda2, sign_flip));
  }
  return out;
}

KktReport kkt_check(const FitResult& fit, const Matrix& x, const Vector& y, const PenaltySpec& spec, double tol) {
  if (x.rows() != y.size() || x.cols() != fit.beta.values.size()) {
    throw Error(ErrorKind::dimension, "kkt_check: dimensions disagree");
  }
  const Vector beta = fit.naive_beta();
  const Vector residuals = y - x * beta;
  const Vector corr = x.transpose() * residuals;
  KktReport report;
  report.violations.resize(beta.size());
  for (Index k = 0; k < beta.size(); ++k) {
    const double l1 = spec.lambda1 * spec.l1_weight(k);
    if (beta(k) != 0.0) {
      const double sgn = beta(k) > 0.0 ? 1.0 : -1.0;
      report.violations(k) = std::abs(-2.0 * corr(k) + l1 * sgn + 2.0 * spec.lambda2 * beta(k));
    } else {
      report.violations(k) = std::max(0.0, std::abs(2.0 * corr(k)) - l1);
    }
  }
  report.max_violation = report.violations.size() > 0 ? report.violations.maxCoeff() : 0.0;
  report.passed = report.max_violation <= tol;
  return report;
}

KktReport kkt_check(const FitResult& fit, const PartialResiduals& pr, const PenaltySpec& spec, double tol) {
  return kkt_check(fit, pr.x_tilde, pr.y_tilde, spec, tol);
}

double mse(const Vector& beta_hat, const Vector& beta_true) {
  if (beta_hat.size() != beta_true.size()) throw Error(ErrorKind::dimension, "mse: length mismatch");
  return (beta_hat - beta_true).squaredNorm();
}

double mse(const CoefficientVector& beta_hat, const CoefficientVector& beta_true) {
  return mse(beta_hat.values, beta_true.values);
}

}  // namespace plm_enet
