#include "commands.hpp"

#include "tables.hpp"

#include <plm_enet/plm_enet.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace plm_enet::cli {

namespace fs = std::filesystem;
using nlohmann::json;

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::config:
    case ErrorKind::precondition:
      return exit_usage;
    case ErrorKind::schema:
    case ErrorKind::ingestion:
    case ErrorKind::degenerate_column:
    case ErrorKind::dimension:
    case ErrorKind::empty_neighborhood:
      return exit_input;
    case ErrorKind::degenerate_grid:
      return exit_degenerate_grid;
    case ErrorKind::bound_undefined:
      return exit_bound_undefined;
  }
  return exit_usage;
}

namespace {

int default_threads() {
  const auto hw = static_cast<int>(std::thread::hardware_concurrency());
  return thread_cap_from_env(hw > 0 ? hw : 1);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

struct Prepared {
  Dataset raw;
  StandardizedData standardized;
  SmootherConfig smoother;
  PartialResiduals pr;

  [[nodiscard]] const Dataset& data() const { return standardized.data; }
};

Dataset load(const std::string& path, const Parameters& p) {
  CsvSchema schema;
  schema.response = p.response;
  schema.covariate = p.covariate;
  schema.predictors = p.predictors;
  return load_csv(path, schema);
}

SmootherConfig make_smoother(const Parameters& p, Index n) {
  SmootherConfig config;
  config.kernel = parse_kernel(p.kernel);
  config.bandwidth_constant = p.bandwidth_c;
  if (!(p.bandwidth_c > 0.0)) throw Error(ErrorKind::config, "--bandwidth-c must be positive");
  config.bandwidth = p.bandwidth > 0.0 ? p.bandwidth : default_bandwidth(n, p.bandwidth_c);
  validate(config);
  return config;
}

Prepared prepare(const Parameters& p, Manifest& manifest) {
  if (p.data.empty()) throw Error(ErrorKind::config, "--data is required");
  manifest.add_input("data", p.data);
  Dataset raw = load(p.data, p);
  StandardizedData standardized = p.standardize ? standardize(raw) : StandardizedData{raw, StandardizationInfo{}};
  SmootherConfig smoother = make_smoother(p, raw.n());
  PartialResiduals pr = partial_out(standardized.data, smoother);
  return {std::move(raw), std::move(standardized), smoother, std::move(pr)};
}

SolverOptions solver_options(const Parameters& p) {
  SolverOptions opts;
  opts.tolerance = p.tolerance;
  opts.max_iterations = p.max_iterations;
  opts.rescaled = p.rescaled;
  if (!(opts.tolerance > 0.0)) throw Error(ErrorKind::config, "--tolerance must be positive");
  if (opts.max_iterations < 1) throw Error(ErrorKind::config, "--max-iterations must be >= 1");
  return opts;
}

/// Penalty as requested on the command line; flag conflicts surface here.
PenaltySpec requested_spec(const Parameters& p, Index cols) {
  PenaltySpec spec;
  spec.method = parse_method(p.method);
  spec.lambda1 = p.lambda1;
  spec.lambda2 = p.lambda2;
  spec.adaptive_gamma = p.gamma;
  if (spec.method == Method::alasso) spec.adaptive_weights = Vector::Ones(cols);
  validate(spec, cols);
  if (spec.method == Method::alasso) spec.adaptive_weights.reset();
  return spec;
}

FitResult fit_requested(const PartialResiduals& pr, const PenaltySpec& spec, const Parameters& p) {
  const SolverOptions opts = solver_options(p);
  switch (spec.method) {
    case Method::ridge:
      return fit_ridge_closed_form(pr, spec.lambda2);
    case Method::alasso: {
      AdaptiveLassoOptions alasso;
      alasso.gamma = p.gamma;
      return fit_alasso(pr, spec.lambda1, alasso, opts);
    }
    default:
      return fit(pr, spec, opts);
  }
}

std::vector<std::string> with_prefix(std::vector<std::string> head, const std::vector<std::string>& names) {
  head.insert(head.end(), names.begin(), names.end());
  return head;
}

/// coefficients.csv, residuals.csv, kkt.csv, optional predictions.csv; returns
/// the fit summary.
json write_fit_outputs(OutputDirectory& out, const Prepared& prep, const FitResult& result, const Parameters& p,
                       Manifest& manifest) {
  const auto& names = prep.data().column_names();
  const Vector original = prep.standardized.info.applied
                              ? unstandardize_coefficients(result.beta, prep.standardized.info).beta.values
                              : result.beta.values;
  const double offset = prep.standardized.info.applied
                            ? unstandardize_coefficients(result.beta, prep.standardized.info).offset
                            : 0.0;

  CsvTable coefficients({"name", "beta_standardized", "beta_original"});
  for (Index j = 0; j < result.beta.values.size(); ++j) {
    coefficients.row({names[static_cast<std::size_t>(j)], cell(result.beta.values(j)), cell(original(j))});
  }
  out.write("coefficients.csv", coefficients.str());

  CsvTable residuals({"row", "t", "y_tilde", "fitted", "residual"});
  for (Index i = 0; i < prep.pr.n(); ++i) {
    residuals.row({cell(i + 1), cell(prep.data().t()(i)), cell(prep.pr.y_tilde(i)),
                   cell(prep.pr.y_tilde(i) - result.residuals(i)), cell(result.residuals(i))});
  }
  out.write("residuals.csv", residuals.str());

  const KktReport kkt = kkt_check(result, prep.pr, result.spec, 10.0 * p.tolerance);
  CsvTable kkt_table({"name", "beta", "violation", "active"});
  const Vector naive = result.naive_beta();
  for (Index j = 0; j < naive.size(); ++j) {
    kkt_table.row({names[static_cast<std::size_t>(j)], cell(naive(j)), cell(kkt.violations(j)), cell(naive(j) != 0.0)});
  }
  out.write("kkt.csv", kkt_table.str());

  json summary = {
      {"method", std::string(to_string(result.spec.method))},
      {"lambda1", result.spec.lambda1},
      {"lambda2", result.spec.lambda2},
      {"objective", result.objective},
      {"iterations", result.iterations},
      {"converged", result.converged},
      {"dual_gap_proxy", result.dual_gap_proxy},
      {"kkt_max_violation", kkt.max_violation},
      {"kkt_tolerance", 10.0 * p.tolerance},
      {"kkt_passed", kkt.passed},
      {"nonzero", result.nonzero_count()},
      {"rescale_factor", result.rescale_factor},
      {"offset", offset},
      {"standardized", prep.standardized.info.applied},
      {"kernel", std::string(to_string(prep.smoother.kernel))},
      {"bandwidth", prep.smoother.bandwidth},
      {"n", prep.pr.n()},
      {"p", prep.pr.p()},
      {"notes", result.notes},
  };

  if (!p.test_data.empty()) {
    manifest.add_input("test_data", p.test_data);
    const Dataset test_raw = load(p.test_data, p);
    if (test_raw.column_names() != prep.raw.column_names()) {
      throw Error(ErrorKind::schema, "test data predictors differ from the training data");
    }
    const Dataset test = prep.standardized.info.applied ? apply_standardization(test_raw, prep.standardized.info)
                                                        : test_raw;
    Vector predicted = predict(prep.data(), test.t(), test.x(), result.beta.values, prep.smoother);
    predicted.array() += prep.standardized.info.y_mean;

    std::vector<std::string> header{"row", "y", "prediction"};
    if (p.classify) header.emplace_back("class");
    CsvTable predictions(header);
    double sq = 0.0;
    Index errors = 0;
    for (Index i = 0; i < test_raw.n(); ++i) {
      const double y = test_raw.y()(i);
      sq += (y - predicted(i)) * (y - predicted(i));
      std::vector<std::string> row{cell(i + 1), cell(y), cell(predicted(i))};
      if (p.classify) {
        const double label = predicted(i) > p.threshold ? 1.0 : 0.0;
        errors += label != y;
        row.push_back(cell(label));
      }
      predictions.row(std::move(row));
    }
    out.write("predictions.csv", predictions.str());
    summary["test_n"] = test_raw.n();
    summary["test_mse"] = sq / static_cast<double>(test_raw.n());
    if (p.classify) {
      summary["threshold"] = p.threshold;
      summary["test_errors"] = errors;
    }
  }
  return summary;
}

void report_nonconvergence(const FitResult& result) {
  std::cerr << "plm_enet: fit did not converge after " << result.iterations << " iterations (max violation "
            << result.dual_gap_proxy << ")\n";
}

}  // namespace

int run_fit(const Parameters& params, const fs::path& out_dir) {
  Manifest manifest;
  manifest.command = "fit";
  manifest.parameters = params;
  const Prepared prep = prepare(params, manifest);
  const PenaltySpec spec = requested_spec(params, prep.pr.p());
  if (spec.method == Method::ridge && !(spec.lambda2 > 0.0)) {
    throw Error(ErrorKind::config, "ridge needs --lambda2 > 0");
  }
  const FitResult result = fit_requested(prep.pr, spec, params);

  OutputDirectory out(out_dir, manifest);
  const json summary = write_fit_outputs(out, prep, result, params, manifest);
  out.write("fit_summary.json", dump(summary));
  out.finish();
  if (!result.converged) {
    report_nonconvergence(result);
    return exit_nonconvergence;
  }
  return exit_ok;
}

int run_cv(const Parameters& params, const fs::path& out_dir) {
  Manifest manifest;
  manifest.command = "cv";
  manifest.parameters = params;
  const Prepared prep = prepare(params, manifest);
  PenaltySpec spec = requested_spec(params, prep.pr.p());
  if (spec.method == Method::ols) throw Error(ErrorKind::config, "ols has no penalty to cross-validate");
  if (spec.method == Method::ridge) spec.lambda2 = 0.0;
  if (params.cv_folds < 2) throw Error(ErrorKind::config, "--cv-folds must be >= 2");
  if (params.grid_size < 2) throw Error(ErrorKind::config, "--grid-size must be >= 2");

  CvPlan plan = make_cv_plan(prep.data().n(), params.cv_folds, {}, spec.method == Method::enet ? spec.lambda2 : 0.0,
                             params.seed);
  plan.one_se = params.one_se;
  CvOptions opts;
  opts.solver = solver_options(params);
  opts.alasso.gamma = params.gamma;
  opts.threads = default_threads();
  opts.grid_size = params.grid_size;
  const CvResult cv = cross_validate(prep.data(), plan, prep.smoother, spec, opts);

  const bool over_lambda2 = cv.tuned == TunedParameter::lambda2;
  const PenaltySpec chosen = over_lambda2 ? spec.with_lambda2(cv.best_value) : spec.with_lambda1(cv.best_value);
  const FitResult result = fit_requested(prep.pr, chosen, params);

  OutputDirectory out(out_dir, manifest);
  CsvTable curve({"index", over_lambda2 ? "lambda2" : "lambda1", "mean_cv_error", "se_cv_error"});
  for (std::size_t g = 0; g < cv.grid.size(); ++g) {
    curve.row({cell(static_cast<Index>(g)), cell(cv.grid[g]), cell(cv.mean_cv_error[g]), cell(cv.se_cv_error[g])});
  }
  out.write("cv_curve.csv", curve.str());

  if (params.emit_path) {
    const auto& names = prep.data().column_names();
    CsvTable path(with_prefix({"index", over_lambda2 ? "lambda2" : "lambda1"}, names));
    std::vector<Vector> coefficients;
    if (over_lambda2) {
      for (double l2 : cv.grid) coefficients.push_back(fit_ridge_closed_form(prep.pr, l2).beta.values);
    } else {
      PenaltySpec path_spec = spec;
      if (spec.method == Method::alasso) {
        AdaptiveLassoOptions alasso;
        alasso.gamma = params.gamma;
        path_spec.adaptive_weights = adaptive_weights(prep.pr.x_tilde, prep.pr.y_tilde, alasso);
      }
      for (const auto& f : fit_path(prep.pr.x_tilde, prep.pr.y_tilde, path_spec, cv.grid, opts.solver)) {
        coefficients.push_back(f.beta.values);
      }
    }
    for (std::size_t g = 0; g < cv.grid.size(); ++g) {
      std::vector<std::string> row{cell(static_cast<Index>(g)), cell(cv.grid[g])};
      for (Index j = 0; j < coefficients[g].size(); ++j) row.push_back(cell(coefficients[g](j)));
      path.row(std::move(row));
    }
    out.write("path.csv", path.str());
  }

  json summary = write_fit_outputs(out, prep, result, params, manifest);
  summary["cv"] = {
      {"tuned", over_lambda2 ? "lambda2" : "lambda1"},
      {"folds", params.cv_folds},
      {"grid_size", static_cast<Index>(cv.grid.size())},
      {"best_index", cv.best_index},
      {"best_value", cv.best_value},
      {"one_se", params.one_se},
      {"fallback_points", cv.fallback_count},
      {"nonconverged_fits", cv.nonconverged_fits},
  };
  out.write("fit_summary.json", dump(summary));
  out.finish();
  if (!result.converged) {
    report_nonconvergence(result);
    return exit_nonconvergence;
  }
  return exit_ok;
}

int run_simulate(const Parameters& params, const fs::path& out_dir) {
  Manifest manifest;
  manifest.command = "simulate";
  manifest.parameters = params;

  SimulationConfig config;
  config.n = static_cast<Index>(params.n);
  config.reps = params.reps;
  config.sigma = params.sigma;
  config.lambda2 = params.lambda2;
  config.cv_folds = params.cv_folds;
  config.seed = params.seed;
  config.bandwidth_constant = params.bandwidth_c;
  config.grid_size = params.grid_size;
  config.one_se = params.one_se;
  config.threads = default_threads();
  config.solver = solver_options(params);
  const ExperimentReport report = run_experiment(config);

  const auto& names = report.column_names;
  CsvTable table1(with_prefix({"method"}, names));
  CsvTable selection(with_prefix({"method"}, names));
  CsvTable table2({"method", "mse_mean", "mse_se", "mean_selected_index"});
  json methods = json::object();
  for (const auto& s : report.methods) {
    const std::string method(to_string(s.method));
    std::vector<std::string> mean{method}, freq{method};
    for (Index j = 0; j < s.mean_coefficients.size(); ++j) {
      mean.push_back(cell(s.mean_coefficients(j)));
      freq.push_back(cell(s.selection_frequency(j)));
    }
    table1.row(std::move(mean));
    selection.row(std::move(freq));
    table2.row({method, cell(s.mse_mean), cell(s.mse_se), cell(s.mean_selected_index)});
    methods[method] = {
        {"mean_coefficients", std::vector<double>(s.mean_coefficients.begin(), s.mean_coefficients.end())},
        {"mean_abs_coefficients",
         std::vector<double>(s.mean_abs_coefficients.begin(), s.mean_abs_coefficients.end())},
        {"selection_frequency", std::vector<double>(s.selection_frequency.begin(), s.selection_frequency.end())},
        {"mse_mean", s.mse_mean},
        {"mse_se", s.mse_se},
        {"mean_selected_index", s.mean_selected_index},
    };
  }

  CsvTable replicates(with_prefix({"rep", "method", "failed", "mse", "selected_penalty", "selected_index"}, names));
  for (const auto& rep : report.replicates) {
    for (const auto& mf : rep.fits) {
      std::vector<std::string> row{cell(rep.rep),          std::string(to_string(mf.method)),
                                   cell(rep.failed),       cell(mf.mse),
                                   cell(mf.selected_penalty), cell(mf.selected_index)};
      for (Index j = 0; j < mf.beta.size(); ++j) row.push_back(cell(mf.beta(j)));
      replicates.row(std::move(row));
    }
  }

  OutputDirectory out(out_dir, manifest);
  out.write("table1.csv", table1.str());
  out.write("selection.csv", selection.str());
  out.write("table2.csv", table2.str());
  out.write("replicates.csv", replicates.str());
  const json summary = {
      {"n", config.n},
      {"reps", config.reps},
      {"sigma", config.sigma},
      {"lambda2", config.lambda2},
      {"cv_folds", config.cv_folds},
      {"bandwidth", default_bandwidth(config.n, config.bandwidth_constant)},
      {"failed_replicates", report.failed_replicates},
      {"run_failed", report.run_failed},
      {"methods", methods},
      {"group_effect_x2_x3",
       {{"d_mean", report.group_effect.d_mean},
        {"d_max", report.group_effect.d_max},
        {"m_max", report.group_effect.m_max},
        {"bound_max", report.group_effect.bound_max},
        {"violations", report.group_effect.violations}}},
  };
  out.write("summary.json", dump(summary));
  out.finish();
  if (report.run_failed) {
    std::cerr << "plm_enet: " << report.failed_replicates << " of " << config.reps
              << " replicates failed to converge\n";
    return exit_nonconvergence;
  }
  return exit_ok;
}

namespace {

std::vector<std::pair<Index, Index>> parse_pairs(const std::string& text, Index p) {
  std::vector<std::pair<Index, Index>> pairs;
  if (text == "all") {
    for (Index k = 0; k < p; ++k) {
      for (Index l = k + 1; l < p; ++l) pairs.emplace_back(k, l);
    }
    return pairs;
  }
  std::stringstream list(text);
  std::string item;
  while (std::getline(list, item, ';')) {
    const auto comma = item.find(',');
    if (comma == std::string::npos) throw Error(ErrorKind::config, "pair '" + item + "' is not of the form k,l");
    Index k = 0, l = 0;
    try {
      k = std::stol(item.substr(0, comma));
      l = std::stol(item.substr(comma + 1));
    } catch (const std::exception&) {
      throw Error(ErrorKind::config, "pair '" + item + "' is not of the form k,l");
    }
    if (k < 1 || l < 1 || k > p || l > p || k == l) {
      throw Error(ErrorKind::config, "pair '" + item + "' must name two distinct columns in 1.." + std::to_string(p));
    }
    pairs.emplace_back(k - 1, l - 1);
  }
  if (pairs.empty()) throw Error(ErrorKind::config, "--pairs is empty");
  return pairs;
}

Vector read_standardized_coefficients(const fs::path& path, Index p) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ingestion, "cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  Vector beta(p);
  Index j = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto first = line.find(',');
    const auto second = line.find(',', first + 1);
    if (first == std::string::npos || second == std::string::npos || j >= p) {
      throw Error(ErrorKind::schema, path.string() + ": unexpected layout at line " + std::to_string(j + 2));
    }
    beta(j++) = parse_double(std::string_view(line).substr(first + 1, second - first - 1));
  }
  if (j != p) throw Error(ErrorKind::schema, path.string() + ": expected " + std::to_string(p) + " coefficients");
  return beta;
}

}  // namespace

int run_group_effect(const Parameters& params, const fs::path& out_dir) {
  Manifest manifest;
  manifest.command = "group-effect";
  manifest.parameters = params;
  if (params.fit_dir.empty()) throw Error(ErrorKind::config, "--fit-dir is required");
  const fs::path fit_dir = params.fit_dir;
  const Manifest fit_manifest = read_manifest(fit_dir / "manifest.json");
  if (fit_manifest.command != "fit" && fit_manifest.command != "cv") {
    throw Error(ErrorKind::schema, "--fit-dir must hold the output of 'fit' or 'cv'");
  }
  manifest.add_input("fit_manifest", fit_dir / "manifest.json");
  manifest.add_input("coefficients", fit_dir / "coefficients.csv");
  manifest.add_input("fit_summary", fit_dir / "fit_summary.json");

  json fit_summary;
  {
    std::ifstream in(fit_dir / "fit_summary.json");
    if (!in) throw Error(ErrorKind::ingestion, "cannot open fit_summary.json in " + fit_dir.string());
    try {
      fit_summary = json::parse(in);
    } catch (const json::exception& e) {
      throw Error(ErrorKind::schema, std::string("malformed fit_summary.json: ") + e.what());
    }
  }
  const double lambda2 = fit_summary.at("lambda2").get<double>();
  const double rescale = fit_summary.value("rescale_factor", 1.0);

  const Prepared prep = prepare(fit_manifest.parameters, manifest);
  const Index p = prep.pr.p();
  FitResult fit;
  fit.beta.values = read_standardized_coefficients(fit_dir / "coefficients.csv", p) / rescale;
  fit.beta.names = prep.data().column_names();
  fit.residuals = prep.pr.y_tilde - prep.pr.x_tilde * fit.beta.values;

  if (!(lambda2 > 0.0)) {
    throw Error(ErrorKind::bound_undefined, "the fit has lambda2 = 0, so the group-effect bound is undefined");
  }
  const auto pairs = parse_pairs(params.pairs, p);
  const auto& names = prep.data().column_names();
  CsvTable table({"k", "l", "D", "m", "bound", "satisfied", "sign_condition", "k_negated", "name_k", "name_l"});
  Index violated = 0;
  const auto add = [&](const GroupEffectReport& r) {
    const auto [k, l] = r.pair;
    table.row({cell(k + 1), cell(l + 1), cell(r.d_value), cell(r.m_value), cell(r.bound), cell(r.satisfied()),
               cell(r.sign_condition_met), cell(r.k_negated), names[static_cast<std::size_t>(k)],
               names[static_cast<std::size_t>(l)]});
    if (r.sign_condition_met && !r.satisfied()) ++violated;
  };
  for (const auto& pair : pairs) {
    const GroupEffectResult result = group_effect(fit, prep.data().x(), pair, lambda2, params.sign_flip);
    add(result.report);
    if (result.sign_flipped) add(*result.sign_flipped);
  }

  OutputDirectory out(out_dir, manifest);
  out.write("group_effect.csv", table.str());
  out.write("group_effect_summary.json", dump({{"pairs", static_cast<Index>(pairs.size())},
                                               {"lambda2", lambda2},
                                               {"residual_l1", fit.residuals.cwiseAbs().sum()},
                                               {"violations_with_sign_condition", violated}}));
  out.finish();
  return exit_ok;
}

int run_smooth(const Parameters& params, const fs::path& out_dir) {
  Manifest manifest;
  manifest.command = "smooth";
  manifest.parameters = params;
  const Prepared prep = prepare(params, manifest);
  const auto& names = prep.data().column_names();
  std::vector<std::string> tilde_names, hat_names;
  for (const auto& name : names) {
    tilde_names.push_back(name + "_tilde");
    hat_names.push_back("m_" + name);
  }
  CsvTable residuals(with_prefix({"row", "t", "y_tilde"}, tilde_names));
  CsvTable means(with_prefix({"row", "t", "m_y"}, hat_names));
  for (Index i = 0; i < prep.pr.n(); ++i) {
    std::vector<std::string> r{cell(i + 1), cell(prep.data().t()(i)), cell(prep.pr.y_tilde(i))};
    std::vector<std::string> m{cell(i + 1), cell(prep.data().t()(i)), cell(prep.pr.my_hat(i))};
    for (Index j = 0; j < prep.pr.p(); ++j) {
      r.push_back(cell(prep.pr.x_tilde(i, j)));
      m.push_back(cell(prep.pr.mx_hat(i, j)));
    }
    residuals.row(std::move(r));
    means.row(std::move(m));
  }
  OutputDirectory out(out_dir, manifest);
  out.write("partial_residuals.csv", residuals.str());
  out.write("conditional_means.csv", means.str());
  out.write("smooth_summary.json", dump({{"kernel", std::string(to_string(prep.smoother.kernel))},
                                         {"bandwidth", prep.smoother.bandwidth},
                                         {"standardized", prep.standardized.info.applied},
                                         {"n", prep.pr.n()},
                                         {"p", prep.pr.p()}}));
  out.finish();
  return exit_ok;
}

int run_command(const std::string& command, const Parameters& params, const fs::path& out) {
  if (command == "fit") return run_fit(params, out);
  if (command == "cv") return run_cv(params, out);
  if (command == "simulate") return run_simulate(params, out);
  if (command == "group-effect") return run_group_effect(params, out);
  if (command == "smooth") return run_smooth(params, out);
  throw Error(ErrorKind::schema, "unknown command '" + command + "' in manifest");
}

int run_from_manifest(const fs::path& manifest_path, const fs::path& out) {
  const Manifest recorded = read_manifest(manifest_path);
  for (const auto& input : recorded.inputs) {
    if (file_sha256(input.path) != input.sha256) {
      throw Error(ErrorKind::ingestion, "input '" + input.path + "' changed since the manifest was written");
    }
  }
  return run_command(recorded.command, recorded.parameters, out);
}

}  // namespace plm_enet::cli
