#include "commands.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;
using plm_enet::cli::Parameters;

namespace {

constexpr const char* kExitCodes =
    "Exit codes: 0 ok, 1 usage or configuration error, 2 input error, 3 non-convergence,\n"
    "4 degenerate lambda grid, 5 group-effect bound undefined (lambda2 = 0).";

void add_data_flags(CLI::App& cmd, Parameters& p) {
  cmd.add_option("--data", p.data, "CSV file with a header row")->required();
  cmd.add_option("--response", p.response, "Response column")->capture_default_str();
  cmd.add_option("--covariate", p.covariate, "Scalar covariate T")->capture_default_str();
  cmd.add_option("--predictors", p.predictors, "Predictor columns (default: all others)")->delimiter(',');
  cmd.add_flag("!--no-standardize", p.standardize, "Fit on the raw design");
}

void add_smoother_flags(CLI::App& cmd, Parameters& p) {
  cmd.add_option("--kernel", p.kernel, "box | epanechnikov | gaussian")->capture_default_str();
  auto* h = cmd.add_option("--bandwidth", p.bandwidth, "Bandwidth h");
  auto* c = cmd.add_option("--bandwidth-c", p.bandwidth_c, "c in h = c n^(-1/5)")->capture_default_str();
  h->excludes(c);
}

void add_penalty_flags(CLI::App& cmd, Parameters& p) {
  cmd.add_option("--method", p.method, "enet | lasso | alasso | ridge | ols")->capture_default_str();
  cmd.add_option("--lambda1", p.lambda1, "l1 penalty")->capture_default_str();
  cmd.add_option("--lambda2", p.lambda2, "squared l2 penalty")->capture_default_str();
  cmd.add_option("--gamma", p.gamma, "Adaptive lasso weight exponent")->capture_default_str();
  cmd.add_option("--tolerance", p.tolerance, "Solver tolerance")->capture_default_str();
  cmd.add_option("--max-iterations", p.max_iterations, "Solver sweep limit")->capture_default_str();
  cmd.add_flag("--rescaled", p.rescaled, "Report (1 + lambda2) beta");
  cmd.add_option("--test-data", p.test_data, "Held-out CSV to predict");
  cmd.add_flag("--classify", p.classify, "Threshold predictions into 0/1 labels");
  cmd.add_option("--threshold", p.threshold, "Classification threshold")->capture_default_str();
}

void add_cv_flags(CLI::App& cmd, Parameters& p) {
  cmd.add_option("--cv-folds", p.cv_folds, "Number of folds")->capture_default_str();
  cmd.add_option("--grid-size", p.grid_size, "Penalty grid length")->capture_default_str();
  cmd.add_flag("--one-se", p.one_se, "One-standard-error rule");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Penalized estimation in partially linear models y = X'beta + f(T) + e"};
  app.footer(kExitCodes);
  app.set_version_flag("--version", PLM_ENET_VERSION);
  app.require_subcommand(1);

  fs::path out;
  Parameters fit_p, cv_p, sim_p, group_p, smooth_p;
  sim_p.lambda2 = 1.0 / 3.0;

  auto* fit = app.add_subcommand("fit", "Fit one penalty on kernel partial residuals");
  add_data_flags(*fit, fit_p);
  add_smoother_flags(*fit, fit_p);
  add_penalty_flags(*fit, fit_p);
  fit->add_option("--seed", fit_p.seed, "Recorded in the manifest")->capture_default_str();
  fit->add_option("--out", out, "Output directory")->required();

  auto* cv = app.add_subcommand("cv", "Choose the penalty by k-fold cross-validation, then refit");
  add_data_flags(*cv, cv_p);
  add_smoother_flags(*cv, cv_p);
  add_penalty_flags(*cv, cv_p);
  add_cv_flags(*cv, cv_p);
  cv->add_flag("--emit-path", cv_p.emit_path, "Write the coefficient path along the grid");
  cv->add_option("--seed", cv_p.seed, "Fold assignment seed")->capture_default_str();
  cv->add_option("--out", out, "Output directory")->required();

  auto* sim = app.add_subcommand("simulate", "Replicated comparison of lasso, adaptive lasso, ridge and elastic net");
  sim->add_option("--n", sim_p.n, "Rows per replicate")->capture_default_str();
  sim->add_option("--reps", sim_p.reps, "Replicates")->capture_default_str();
  sim->add_option("--sigma", sim_p.sigma, "Noise standard deviation")->capture_default_str();
  sim->add_option("--lambda2", sim_p.lambda2, "Elastic net lambda2")->capture_default_str();
  sim->add_option("--bandwidth-c", sim_p.bandwidth_c, "c in h = c n^(-1/5)")->capture_default_str();
  sim->add_option("--tolerance", sim_p.tolerance, "Solver tolerance")->capture_default_str();
  sim->add_option("--max-iterations", sim_p.max_iterations, "Solver sweep limit")->capture_default_str();
  add_cv_flags(*sim, sim_p);
  sim->add_option("--seed", sim_p.seed, "Master seed")->capture_default_str();
  sim->add_option("--out", out, "Output directory")->required();

  auto* group = app.add_subcommand("group-effect", "Group effect D and its bound for coefficient pairs of a fit");
  group->add_option("--fit-dir", group_p.fit_dir, "Output directory of 'fit' or 'cv'")
      ->required();
  group->add_option("--pairs", group_p.pairs, "all | k,l[;k,l...] (1-based columns)")->capture_default_str();
  group->add_flag("!--no-sign-flip", group_p.sign_flip, "Skip the -x_k re-evaluation for opposite signs");
  group->add_option("--out", out, "Output directory")->required();

  auto* smooth = app.add_subcommand("smooth", "Write kernel partial residuals and conditional means");
  add_data_flags(*smooth, smooth_p);
  add_smoother_flags(*smooth, smooth_p);
  smooth->add_option("--out", out, "Output directory")->required();

  fs::path manifest;
  auto* rerun = app.add_subcommand("rerun", "Repeat a run from its manifest.json");
  rerun->add_option("--manifest", manifest, "manifest.json of an earlier run")->required();
  rerun->add_option("--out", out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : plm_enet::cli::exit_usage;
  }

  const auto absolute = [](std::string& path) {
    if (!path.empty()) path = fs::absolute(path).lexically_normal().string();
  };
  for (Parameters* p : {&fit_p, &cv_p, &smooth_p}) {
    absolute(p->data);
    absolute(p->test_data);
  }
  absolute(group_p.fit_dir);

  try {
    if (*fit) return plm_enet::cli::run_fit(fit_p, out);
    if (*cv) return plm_enet::cli::run_cv(cv_p, out);
    if (*sim) return plm_enet::cli::run_simulate(sim_p, out);
    if (*group) return plm_enet::cli::run_group_effect(group_p, out);
    if (*smooth) return plm_enet::cli::run_smooth(smooth_p, out);
    if (*rerun) return plm_enet::cli::run_from_manifest(manifest, out);
  } catch (const plm_enet::Error& e) {
    std::cerr << "plm_enet: " << e.what() << '\n';
    return plm_enet::cli::exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "plm_enet: " << e.what() << '\n';
    return plm_enet::cli::exit_usage;
  }
  return plm_enet::cli::exit_usage;
}
