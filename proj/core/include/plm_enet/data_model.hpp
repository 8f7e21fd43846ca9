#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace plm_enet {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Observations (y, T, X) of a partially linear model y = X'beta + f(T) + e.
///
/// Immutable once built; the constructor enforces n >= 2, p >= 1, agreeing
/// row counts, one label per design column, and finite entries throughout.
class Dataset {
 public:
  Dataset(Vector y, Vector t, Matrix x, std::vector<std::string> column_names,
          std::string response_name = "y", std::string covariate_name = "t");

  [[nodiscard]] const Vector& y() const noexcept { return y_; }
  [[nodiscard]] const Vector& t() const noexcept { return t_; }
  [[nodiscard]] const Matrix& x() const noexcept { return x_; }
  [[nodiscard]] const std::vector<std::string>& column_names() const noexcept {
    return column_names_;
  }
  [[nodiscard]] const std::string& response_name() const noexcept { return response_name_; }
  [[nodiscard]] const std::string& covariate_name() const noexcept { return covariate_name_; }

  [[nodiscard]] Index n() const noexcept { return y_.size(); }
  [[nodiscard]] Index p() const noexcept { return x_.cols(); }

  /// Rows selected by `rows`, in that order.
  [[nodiscard]] Dataset subset(const std::vector<Index>& rows) const;

 private:
  Vector y_;
  Vector t_;
  Matrix x_;
  std::vector<std::string> column_names_;
  std::string response_name_;
  std::string covariate_name_;
};

/// Default predictor labels x1..xp.
std::vector<std::string> default_column_names(Index p);

/// Maps CSV header names to roles. An empty predictor list means "every
/// column that is neither the response nor the covariate, in file order".
struct CsvSchema {
  std::string response = "y";
  std::string covariate = "t";
  std::vector<std::string> predictors;
};

Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema);
Dataset read_csv(std::istream& in, const CsvSchema& schema,
                 std::string_view source_name = "<stream>");

/// Writes response, covariate, then predictors in shortest round-trip form so
/// that load_csv(save_csv(d)) reproduces d bit for bit.
void save_csv(const std::filesystem::path& path, const Dataset& data);
void write_csv(std::ostream& out, const Dataset& data);

/// Shortest round-trip-exact text for a double (17 significant digits max).
std::string format_double(double value);
/// Strict parse of a full cell; throws ErrorKind::ingestion on failure.
double parse_double(std::string_view text);

struct StandardizationInfo {
  double y_mean = 0.0;
  Vector x_means;
  Vector x_scales;
  bool applied = false;
};

struct StandardizedData {
  Dataset data;
  StandardizationInfo info;
};

/// Centres y and scales each design column to mean 0, sample sd 1 (divisor
/// n-1). T is left untouched. Throws ErrorKind::degenerate_column naming the
/// first zero-variance column.
StandardizedData standardize(const Dataset& data);

/// Applies an existing standardization (e.g. from a training set) to new rows.
Dataset apply_standardization(const Dataset& data, const StandardizationInfo& info);

struct CoefficientVector {
  Vector values;
  std::vector<std::string> names;

  [[nodiscard]] Index size() const noexcept { return values.size(); }
};

struct OriginalScaleCoefficients {
  CoefficientVector beta;
  /// y_mean - sum_j beta_j * x_mean_j; absorbed into f(T) by the model.
  double offset = 0.0;
};

OriginalScaleCoefficients unstandardize_coefficients(const CoefficientVector& beta,
                                                     const StandardizationInfo& info);

}  // namespace plm_enet
