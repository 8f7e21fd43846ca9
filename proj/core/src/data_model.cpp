#include "plm_enet/data_model.hpp"

#include "plm_enet/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>

namespace plm_enet {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::schema: return "schema error";
    case ErrorKind::ingestion: return "ingestion error";
    case ErrorKind::degenerate_column: return "degenerate column";
    case ErrorKind::dimension: return "dimension error";
    case ErrorKind::precondition: return "precondition violation";
    case ErrorKind::config: return "configuration error";
    case ErrorKind::empty_neighborhood: return "empty kernel neighborhood";
    case ErrorKind::degenerate_grid: return "degenerate lambda grid";
    case ErrorKind::bound_undefined: return "group-effect bound undefined";
  }
  return "error";
}

namespace {

std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(ws);
  return s.substr(first, last - first + 1);
}

std::string_view unquote(std::string_view s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

bool all_finite(const Eigen::Ref<const Matrix>& m) { return m.allFinite(); }

}  // namespace

Dataset::Dataset(Vector y, Vector t, Matrix x, std::vector<std::string> column_names,
                 std::string response_name, std::string covariate_name)
    : y_(std::move(y)),
      t_(std::move(t)),
      x_(std::move(x)),
      column_names_(std::move(column_names)),
      response_name_(std::move(response_name)),
      covariate_name_(std::move(covariate_name)) {
  if (y_.size() < 2) {
    throw Error(ErrorKind::dimension, "dataset needs at least 2 observations");
  }
  if (x_.cols() < 1) throw Error(ErrorKind::dimension, "dataset needs at least 1 predictor");
  if (t_.size() != y_.size() || x_.rows() != y_.size()) {
    throw Error(ErrorKind::dimension, "y, t and X disagree on the number of observations");
  }
  if (static_cast<Index>(column_names_.size()) != x_.cols()) {
    throw Error(ErrorKind::dimension, "one column name per predictor required");
  }
  if (!y_.allFinite() || !t_.allFinite() || !all_finite(x_)) {
    throw Error(ErrorKind::ingestion, "dataset contains non-finite values");
  }
}

Dataset Dataset::subset(const std::vector<Index>& rows) const {
  Vector y(static_cast<Index>(rows.size()));
  Vector t(y.size());
  Matrix x(y.size(), p());
  for (Index r = 0; r < y.size(); ++r) {
    const Index src = rows[static_cast<std::size_t>(r)];
    if (src < 0 || src >= n()) throw Error(ErrorKind::dimension, "subset row out of range");
    y(r) = y_(src);
    t(r) = t_(src);
    x.row(r) = x_.row(src);
  }
  return Dataset(std::move(y), std::move(t), std::move(x), column_names_, response_name_,
                 covariate_name_);
}

std::vector<std::string> default_column_names(Index p) {
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(p));
  for (Index j = 0; j < p; ++j) names.push_back("x" + std::to_string(j + 1));
  return names;
}

std::string format_double(double value) {
  char buf[64];
  // Shortest representation that round-trips; never more than 17 digits.
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw Error(ErrorKind::ingestion, "cannot parse '" + std::string(text) + "' as a number");
  }
  if (!std::isfinite(value)) {
    throw Error(ErrorKind::ingestion, "non-finite value '" + std::string(text) + "'");
  }
  return value;
}

Dataset read_csv(std::istream& in, const CsvSchema& schema, std::string_view source_name) {
  const std::string source(source_name);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::ingestion, source + ": empty file");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

  std::vector<std::string> header;
  for (auto f : split_fields(line)) header.emplace_back(unquote(f));
  std::unordered_map<std::string, std::size_t> position;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (!position.emplace(header[c], c).second) {
      throw Error(ErrorKind::schema, source + ": duplicate column '" + header[c] + "'");
    }
  }
  auto locate = [&](const std::string& name, std::string_view role) {
    const auto it = position.find(name);
    if (it == position.end()) {
      throw Error(ErrorKind::schema, source + ": missing " + std::string(role) + " column '" +
                                         name + "'");
    }
    return it->second;
  };
  const std::size_t y_col = locate(schema.response, "response");
  const std::size_t t_col = locate(schema.covariate, "covariate");
  if (y_col == t_col) throw Error(ErrorKind::schema, source + ": response and covariate coincide");

  std::vector<std::string> predictor_names = schema.predictors;
  if (predictor_names.empty()) {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c != y_col && c != t_col) predictor_names.push_back(header[c]);
    }
  }
  if (predictor_names.empty()) throw Error(ErrorKind::schema, source + ": no predictor columns");
  std::vector<std::size_t> x_cols;
  for (const auto& name : predictor_names) {
    const auto c = locate(name, "predictor");
    if (c == y_col || c == t_col) {
      throw Error(ErrorKind::schema, source + ": column '" + name + "' used in two roles");
    }
    x_cols.push_back(c);
  }

  std::vector<double> ys, ts;
  std::vector<std::vector<double>> rows;
  std::size_t row_number = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row_number;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw Error(ErrorKind::ingestion, source + ": row " + std::to_string(row_number) + " has " +
                                            std::to_string(fields.size()) + " fields, expected " +
                                            std::to_string(header.size()));
    }
    auto cell = [&](std::size_t c) {
      try {
        return parse_double(fields[c]);
      } catch (const Error& e) {
        throw Error(ErrorKind::ingestion, source + ": row " + std::to_string(row_number) +
                                              ", column '" + header[c] + "': " + e.what());
      }
    };
    ys.push_back(cell(y_col));
    ts.push_back(cell(t_col));
    std::vector<double> xr;
    xr.reserve(x_cols.size());
    for (auto c : x_cols) xr.push_back(cell(c));
    rows.push_back(std::move(xr));
  }

  const auto n = static_cast<Index>(ys.size());
  const auto p = static_cast<Index>(x_cols.size());
  Vector y = Eigen::Map<Vector>(ys.data(), n);
  Vector t = Eigen::Map<Vector>(ts.data(), n);
  Matrix x(n, p);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < p; ++j) x(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return Dataset(std::move(y), std::move(t), std::move(x), std::move(predictor_names),
                 schema.response, schema.covariate);
}

Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ingestion, "cannot open '" + path.string() + "'");
  return read_csv(in, schema, path.string());
}

void write_csv(std::ostream& out, const Dataset& data) {
  out << data.response_name() << ',' << data.covariate_name();
  for (const auto& name : data.column_names()) out << ',' << name;
  out << '\n';
  for (Index i = 0; i < data.n(); ++i) {
    out << format_double(data.y()(i)) << ',' << format_double(data.t()(i));
    for (Index j = 0; j < data.p(); ++j) out << ',' << format_double(data.x()(i, j));
    out << '\n';
  }
}

void save_csv(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::ingestion, "cannot write '" + path.string() + "'");
  write_csv(out, data);
}

StandardizedData standardize(const Dataset& data) {
  const Index n = data.n();
  const Index p = data.p();
  StandardizationInfo info;
  info.y_mean = data.y().mean();
  info.x_means = data.x().colwise().mean().transpose();
  info.x_scales.resize(p);
  Matrix x(n, p);
  for (Index j = 0; j < p; ++j) {
    const auto centred = (data.x().col(j).array() - info.x_means(j)).eval();
    const double sd = std::sqrt(centred.square().sum() / static_cast<double>(n - 1));
    const double floor = std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(info.x_means(j)));
    if (!(sd > floor)) {
      throw Error(ErrorKind::degenerate_column,
                  "column '" + data.column_names()[static_cast<std::size_t>(j)] + "' has zero variance");
    }
    info.x_scales(j) = sd;
    x.col(j) = centred.matrix() / sd;
  }
  info.applied = true;
  Vector y = data.y().array() - info.y_mean;
  return {Dataset(std::move(y), data.t(), std::move(x), data.column_names(), data.response_name(),
                  data.covariate_name()),
          std::move(info)};
}

Dataset apply_standardization(const Dataset& data, const StandardizationInfo& info) {
  if (!info.applied) return data;
  if (info.x_means.size() != data.p() || info.x_scales.size() != data.p()) {
    throw Error(ErrorKind::dimension, "standardization record does not match the design width");
  }
  Matrix x = (data.x().rowwise() - info.x_means.transpose()).array().rowwise() /
             info.x_scales.transpose().array();
  Vector y = data.y().array() - info.y_mean;
  return Dataset(std::move(y), data.t(), std::move(x), data.column_names(), data.response_name(),
                 data.covariate_name());
}

OriginalScaleCoefficients unstandardize_coefficients(const CoefficientVector& beta,
                                                     const StandardizationInfo& info) {
  if (!info.applied) {
    throw Error(ErrorKind::precondition, "standardization record was never applied");
  }
  if (beta.values.size() != info.x_scales.size() || beta.values.size() != info.x_means.size()) {
    throw Error(ErrorKind::dimension, "coefficient length does not match standardization record");
  }
  OriginalScaleCoefficients out;
  out.beta.names = beta.names;
  out.beta.values = beta.values.array() / info.x_scales.array();
  out.offset = info.y_mean - out.beta.values.dot(info.x_means);
  return out;
}

}  // namespace plm_enet
