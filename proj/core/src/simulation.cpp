#include "plm_enet/simulation.hpp"

#include "plm_enet/error.hpp"
#include "plm_enet/kernel_smoothing.hpp"
#include "plm_enet/model_selection.hpp"
#include "plm_enet/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace plm_enet {

namespace {

constexpr Index kSimulationWidth = 8;

std::mt19937_64 stream_for(std::uint64_t seed, std::uint64_t stream, std::uint64_t salt) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    static_cast<std::uint32_t>(salt)};
  return std::mt19937_64(seq);
}

// Salts keep the data stream and the fold-assignment stream apart.
constexpr std::uint64_t kDataSalt = 0x5eed0001;
constexpr std::uint64_t kFoldSalt = 0x5eed0002;

}  // namespace

void validate(const SimulationConfig& config) {
  if (config.n < 10) throw Error(ErrorKind::config, "simulation needs n >= 10");
  if (config.reps < 1) throw Error(ErrorKind::config, "simulation needs reps >= 1");
  if (!(config.sigma > 0.0)) throw Error(ErrorKind::config, "sigma must be positive");
  if (!(config.lambda2 >= 0.0)) throw Error(ErrorKind::config, "lambda2 must be >= 0");
  if (config.cv_folds < 2 || config.cv_folds > config.n) throw Error(ErrorKind::config, "cv_folds out of range");
  if (!(config.bandwidth_constant > 0.0)) throw Error(ErrorKind::config, "bandwidth constant must be positive");
  if (config.grid_size < 2) throw Error(ErrorKind::config, "grid size must be >= 2");
}

CoefficientVector simulation_true_beta() {
  CoefficientVector beta;
  beta.values.resize(kSimulationWidth);
  beta.values << -2.0, 1.0, 1.0, 0.0, 2.0 / 3.0, 0.0, 0.0, 0.0;
  beta.names = default_column_names(kSimulationWidth);
  return beta;
}

SimulatedData generate_dgp(const SimulationConfig& config, int rep_index) {
  validate(config);
  auto rng = stream_for(config.seed, static_cast<std::uint64_t>(rep_index), kDataSalt);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  const Index n = config.n;
  Matrix x(n, kSimulationWidth);
  Vector t(n), y(n);
  const CoefficientVector beta = simulation_true_beta();
  for (Index i = 0; i < n; ++i) {
    const double x1 = normal(rng);
    const double x2 = normal(rng);
    const double x5 = normal(rng);
    const double x6 = normal(rng);
    const double x7 = normal(rng);
    const double x8 = normal(rng);
    const double e = normal(rng);
    const double x3 = x2;
    const double x4 = (2.0 / 3.0) * x1 + (1.0 / 3.0) * x2 + (1.0 / 3.0) * x3 + (2.0 / 3.0) * e;
    x.row(i) << x1, x2, x3, x4, x5, x6, x7, x8;
    t(i) = uniform(rng);
    const double eps = config.sigma * normal(rng);
    y(i) = x.row(i).dot(beta.values) + t(i) * t(i) + eps;
  }
  return {Dataset(std::move(y), std::move(t), std::move(x), beta.names), beta};
}

const MethodSummary& ExperimentReport::summary(Method method) const {
  for (const auto& s : methods) {
    if (s.method == method) return s;
  }
  throw Error(ErrorKind::precondition, "method not part of the experiment");
}

ReplicateResult run_replicate(const SimulationConfig& config, int rep_index) {
  const SimulatedData sim = generate_dgp(config, rep_index);
  const StandardizedData standardized = standardize(sim.data);
  const Dataset& data = standardized.data;
  const SmootherConfig smoother = rule_of_thumb_smoother(data.n(), config.bandwidth_constant, Kernel::box);
  const PartialResiduals pr = partial_out(data, smoother);

  auto fold_rng = stream_for(config.seed, static_cast<std::uint64_t>(rep_index), kFoldSalt);
  CvPlan plan = make_cv_plan(data.n(), config.cv_folds, {}, config.lambda2, fold_rng());
  plan.one_se = config.one_se;

  CvOptions cv_opts;
  cv_opts.solver = config.solver;
  cv_opts.grid_size = config.grid_size;
  cv_opts.ridge.drop_duplicate_columns = true;
  cv_opts.threads = 1;

  ReplicateResult rep;
  rep.rep = rep_index;
  for (Method method : kExperimentMethods) {
    PenaltySpec spec;
    spec.method = method;
    if (method == Method::enet) spec.lambda2 = config.lambda2;
    const CvResult cv = cross_validate(data, plan, smoother, spec, cv_opts);

    FitResult final_fit;
    if (method == Method::ridge) {
      final_fit = fit_ridge_closed_form(pr, cv.best_value, cv_opts.ridge);
    } else if (method == Method::alasso) {
      final_fit = fit_alasso(pr, cv.best_value, cv_opts.alasso, config.solver);
    } else {
      final_fit = fit(pr, spec.with_lambda1(cv.best_value), config.solver);
    }

    MethodFit mf;
    mf.method = method;
    mf.beta = unstandardize_coefficients(final_fit.beta, standardized.info).beta.values;
    mf.mse = mse(mf.beta, sim.beta_true.values);
    mf.converged = final_fit.converged;
    mf.selected_penalty = cv.best_value;
    mf.selected_index = cv.best_index;
    rep.failed = rep.failed || !final_fit.converged;
    if (method == Method::enet && config.lambda2 > 0.0) {
      rep.enet_pair_23 = group_effect(final_fit, data.x(), {1, 2}, config.lambda2, false).report;
    }
    rep.fits.push_back(std::move(mf));
  }
  return rep;
}

ExperimentReport run_experiment(const SimulationConfig& config) {
  validate(config);
  ExperimentReport report;
  report.config = config;
  report.column_names = default_column_names(kSimulationWidth);
  report.replicates.resize(static_cast<std::size_t>(config.reps));
  parallel_for(report.replicates.size(), config.threads, [&](std::size_t r) {
    report.replicates[r] = run_replicate(config, static_cast<int>(r));
  });

  std::vector<const ReplicateResult*> ok;
  for (const auto& rep : report.replicates) {
    if (rep.failed) {
      ++report.failed_replicates;
    } else {
      ok.push_back(&rep);
    }
  }
  report.run_failed = report.failed_replicates * 10 > config.reps;
  const auto count = static_cast<double>(ok.size());

  for (std::size_t m = 0; m < kExperimentMethods.size(); ++m) {
    MethodSummary s;
    s.method = kExperimentMethods[m];
    s.mean_coefficients = Vector::Zero(kSimulationWidth);
    s.mean_abs_coefficients = Vector::Zero(kSimulationWidth);
    s.selection_frequency = Vector::Zero(kSimulationWidth);
    if (!ok.empty()) {
      std::vector<double> mses;
      for (const auto* rep : ok) {
        const MethodFit& mf = rep->fits[m];
        s.mean_coefficients += mf.beta;
        s.mean_abs_coefficients += mf.beta.cwiseAbs();
        s.selection_frequency += (mf.beta.array() != 0.0).cast<double>().matrix();
        s.mean_selected_index += static_cast<double>(mf.selected_index);
        mses.push_back(mf.mse);
      }
      s.mean_coefficients /= count;
      s.mean_abs_coefficients /= count;
      s.selection_frequency /= count;
      s.mean_selected_index /= count;
      s.mse_mean = std::accumulate(mses.begin(), mses.end(), 0.0) / count;
      if (mses.size() > 1) {
        double ss = 0.0;
        for (double v : mses) ss += (v - s.mse_mean) * (v - s.mse_mean);
        s.mse_se = std::sqrt(ss / (count - 1.0)) / std::sqrt(count);
      }
    }
    report.methods.push_back(std::move(s));
  }

  if (config.lambda2 > 0.0 && !ok.empty()) {
    for (const auto* rep : ok) {
      const auto& ge = rep->enet_pair_23;
      report.group_effect.d_mean += ge.d_value;
      report.group_effect.d_max = std::max(report.group_effect.d_max, ge.d_value);
      report.group_effect.m_max = std::max(report.group_effect.m_max, ge.m_value);
      report.group_effect.bound_max = std::max(report.group_effect.bound_max, ge.bound);
      if (!ge.satisfied()) ++report.group_effect.violations;
    }
    report.group_effect.d_mean /= count;
  }
  return report;
}

SimulatedData generate_pggn(const HighDimConfig& config) {
  if (config.n < 2) throw Error(ErrorKind::config, "high-dimensional design needs n >= 2");
  if (config.p <= config.n) throw Error(ErrorKind::config, "high-dimensional design needs p > n");
  Index used = 0;
  for (Index g : config.group_sizes) {
    if (g < 1) throw Error(ErrorKind::config, "group sizes must be positive");
    used += g;
  }
  if (used > config.p) throw Error(ErrorKind::config, "groups need more columns than p");
  if (!(config.within_noise > 0.0) || !(config.response_noise >= 0.0)) {
    throw Error(ErrorKind::config, "noise levels must be positive");
  }

  auto rng = stream_for(config.seed, 0, kDataSalt);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  const Index n = config.n;
  const Index p = config.p;
  Matrix x(n, p);
  Vector t(n);
  for (Index i = 0; i < n; ++i) {
    Index col = 0;
    for (Index g : config.group_sizes) {
      const double latent = normal(rng);
      for (Index m = 0; m < g; ++m) x(i, col++) = latent + config.within_noise * normal(rng);
    }
    for (; col < p; ++col) x(i, col) = normal(rng);
    t(i) = uniform(rng);
  }
  CoefficientVector beta;
  beta.values = Vector::Zero(p);
  beta.names = default_column_names(p);
  Index col = 0;
  for (std::size_t g = 0; g < config.group_sizes.size(); ++g) {
    const double sign = g % 2 == 0 ? 1.0 : -1.0;
    for (Index m = 0; m < config.group_sizes[g]; ++m) beta.values(col++) = sign * config.signal;
  }
  Vector eta = x * beta.values;
  for (Index i = 0; i < n; ++i) eta(i) += config.response_noise * normal(rng);
  std::vector<double> sorted(eta.data(), eta.data() + n);
  std::sort(sorted.begin(), sorted.end());
  const auto half = static_cast<std::size_t>(n / 2);
  const double median = n % 2 == 1 ? sorted[half] : 0.5 * (sorted[half - 1] + sorted[half]);
  Vector y(n);
  for (Index i = 0; i < n; ++i) y(i) = eta(i) > median ? 1.0 : 0.0;
  return {Dataset(std::move(y), std::move(t), std::move(x), beta.names), std::move(beta)};
}

SimulatedData generate_pggn(Index n, Index p, const std::vector<Index>& group_sizes, std::uint64_t seed) {
  HighDimConfig config;
  config.n = n;
  config.p = p;
  config.group_sizes = group_sizes;
  config.seed = seed;
  return generate_pggn(config);
}

}  // namespace plm_enet
