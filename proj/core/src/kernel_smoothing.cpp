#include "plm_enet/kernel_smoothing.hpp"

#include "plm_enet/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace plm_enet {

std::string_view to_string(Kernel kernel) noexcept {
  switch (kernel) {
    case Kernel::box: return "box";
    case Kernel::epanechnikov: return "epanechnikov";
    case Kernel::gaussian: return "gaussian";
  }
  return "box";
}

Kernel parse_kernel(std::string_view name) {
  if (name == "box") return Kernel::box;
  if (name == "epanechnikov") return Kernel::epanechnikov;
  if (name == "gaussian") return Kernel::gaussian;
  throw Error(ErrorKind::config, "unknown kernel '" + std::string(name) + "'");
}

double kernel_weight(Kernel kernel, double u) noexcept {
  switch (kernel) {
    case Kernel::box: return std::abs(u) <= 1.0 ? 0.5 : 0.0;
    case Kernel::epanechnikov: return std::abs(u) <= 1.0 ? 0.75 * (1.0 - u * u) : 0.0;
    case Kernel::gaussian: return std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
  }
  return 0.0;
}

double default_bandwidth(Index n, double c) {
  if (n < 2) throw Error(ErrorKind::precondition, "bandwidth rule needs n >= 2");
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw Error(ErrorKind::precondition, "bandwidth constant must be positive");
  }
  return c * std::pow(static_cast<double>(n), -0.2);
}

SmootherConfig rule_of_thumb_smoother(Index n, double c, Kernel kernel) {
  SmootherConfig config;
  config.kernel = kernel;
  config.bandwidth_constant = c;
  config.bandwidth = default_bandwidth(n, c);
  return config;
}

void validate(const SmootherConfig& config) {
  if (!(config.bandwidth > 0.0) || !std::isfinite(config.bandwidth)) {
    throw Error(ErrorKind::config, "bandwidth must be positive and finite");
  }
  if (!(config.bandwidth_constant > 0.0)) {
    throw Error(ErrorKind::config, "bandwidth constant must be positive");
  }
}

namespace {

/// Reference observations sorted by T so that bounded-support kernels only
/// visit a contiguous window.
class SortedReference {
 public:
  SortedReference(const Matrix& values, const Vector& t) : order_(static_cast<std::size_t>(t.size())) {
    std::iota(order_.begin(), order_.end(), Index{0});
    std::stable_sort(order_.begin(), order_.end(), [&](Index a, Index b) { return t(a) < t(b); });
    t_sorted_.resize(t.size());
    values_sorted_.resize(values.rows(), values.cols());
    for (Index r = 0; r < t.size(); ++r) {
      const Index src = order_[static_cast<std::size_t>(r)];
      t_sorted_(r) = t(src);
      values_sorted_.row(r) = values.row(src);
    }
  }

  /// Fills `weights`/`rows` with the positive-weight neighbours of `at`.
  /// `skip` is an original row index to exclude (-1 for none).
  void neighbours(double at, const SmootherConfig& config, Index skip, std::vector<double>& weights,
                  std::vector<Index>& rows) const {
    weights.clear();
    rows.clear();
    const double h = config.bandwidth;
    Index lo = 0;
    Index hi = t_sorted_.size();
    if (config.kernel != Kernel::gaussian) {
      // Widened slightly; membership is decided by kernel_weight below.
      const double reach = h * (1.0 + 1e-9);
      const double* begin = t_sorted_.data();
      const double* end = begin + t_sorted_.size();
      lo = std::lower_bound(begin, end, at - reach) - begin;
      hi = std::upper_bound(begin, end, at + reach) - begin;
    }
    for (Index r = lo; r < hi; ++r) {
      if (order_[static_cast<std::size_t>(r)] == skip) continue;
      const double w = kernel_weight(config.kernel, (t_sorted_(r) - at) / h);
      if (w > 0.0) {
        weights.push_back(w);
        rows.push_back(r);
      }
    }
  }

  /// Weighted mean of each column over the neighbour set, written into `out`.
  /// Values are shifted by the first neighbour's value before averaging so a
  /// constant column reproduces its constant exactly.
  void weighted_means(const std::vector<double>& weights, const std::vector<Index>& rows,
                      Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> out) const {
    double weight_sum = 0.0;
    for (double w : weights) weight_sum += w;
    for (Index c = 0; c < values_sorted_.cols(); ++c) {
      const double anchor = values_sorted_(rows.front(), c);
      double acc = 0.0;
      for (std::size_t k = 0; k < rows.size(); ++k) {
        acc += weights[k] * (values_sorted_(rows[k], c) - anchor);
      }
      out(c) = anchor + acc / weight_sum;
    }
  }

  [[nodiscard]] Eigen::RowVectorXd column_means() const { return values_sorted_.colwise().mean(); }

 private:
  std::vector<Index> order_;
  Vector t_sorted_;
  Matrix values_sorted_;
};

}  // namespace

Matrix nw_smooth(const Matrix& values, const Vector& t, const SmootherConfig& config) {
  validate(config);
  if (values.rows() != t.size()) throw Error(ErrorKind::dimension, "values and t disagree on n");
  if (!t.allFinite()) throw Error(ErrorKind::precondition, "t must be finite");
  const SortedReference ref(values, t);
  Matrix fitted(values.rows(), values.cols());
  std::vector<double> weights;
  std::vector<Index> rows;
  for (Index j = 0; j < t.size(); ++j) {
    ref.neighbours(t(j), config, config.leave_one_out ? j : Index{-1}, weights, rows);
    if (rows.empty()) {
      throw Error(ErrorKind::empty_neighborhood,
                  "no positive kernel weight at observation " + std::to_string(j + 1));
    }
    ref.weighted_means(weights, rows, fitted.row(j));
  }
  return fitted;
}

Vector nw_smooth(const Vector& values, const Vector& t, const SmootherConfig& config) {
  const Matrix as_matrix = values;
  return nw_smooth(as_matrix, t, config).col(0);
}

OffSampleSmooth nw_smooth_at(const Matrix& values, const Vector& t, const Vector& eval_t,
                             const SmootherConfig& config) {
  validate(config);
  if (values.rows() != t.size()) throw Error(ErrorKind::dimension, "values and t disagree on n");
  if (t.size() == 0) throw Error(ErrorKind::precondition, "no reference observations");
  const SortedReference ref(values, t);
  OffSampleSmooth out;
  out.fitted.resize(eval_t.size(), values.cols());
  std::vector<double> weights;
  std::vector<Index> rows;
  for (Index j = 0; j < eval_t.size(); ++j) {
    ref.neighbours(eval_t(j), config, -1, weights, rows);
    if (rows.empty()) {
      out.fitted.row(j) = ref.column_means();
      out.fallback_points.push_back(j);
      continue;
    }
    ref.weighted_means(weights, rows, out.fitted.row(j));
  }
  return out;
}

namespace {

/// [y | X] packed so the response and design share one smoothing pass.
Matrix stack_response_design(const Dataset& data) {
  Matrix stacked(data.n(), data.p() + 1);
  stacked.col(0) = data.y();
  stacked.rightCols(data.p()) = data.x();
  return stacked;
}

PartialResiduals residuals_from_means(const Vector& y, const Matrix& x, const Matrix& means,
                                      const SmootherConfig& config, std::vector<std::string> names) {
  PartialResiduals pr;
  pr.config = config;
  pr.my_hat = means.col(0);
  pr.mx_hat = means.rightCols(x.cols());
  pr.y_tilde = y - pr.my_hat;
  pr.x_tilde = x - pr.mx_hat;
  pr.column_names = std::move(names);
  return pr;
}

}  // namespace

PartialResiduals partial_out(const Dataset& data, const SmootherConfig& config) {
  const Matrix means = nw_smooth(stack_response_design(data), data.t(), config);
  return residuals_from_means(data.y(), data.x(), means, config, data.column_names());
}

OffSampleResiduals partial_out_against(const Dataset& reference, const Vector& y, const Vector& t,
                                       const Matrix& x, const SmootherConfig& config) {
  if (reference.p() != x.cols()) {
    throw Error(ErrorKind::dimension, "reference and target designs differ in width");
  }
  if (y.size() != t.size() || x.rows() != t.size()) {
    throw Error(ErrorKind::dimension, "target y, t and X disagree on the number of rows");
  }
  auto smooth = nw_smooth_at(stack_response_design(reference), reference.t(), t, config);
  return {residuals_from_means(y, x, smooth.fitted, config, reference.column_names()),
          std::move(smooth.fallback_points)};
}

OffSampleResiduals partial_out_against(const Dataset& reference, const Dataset& target,
                                       const SmootherConfig& config) {
  return partial_out_against(reference, target.y(), target.t(), target.x(), config);
}

}  // namespace plm_enet
