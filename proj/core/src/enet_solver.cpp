#include "plm_enet/enet_solver.hpp"

#include "plm_enet/error.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string_view>
#include <unordered_map>

namespace plm_enet {

std::string_view to_string(Method method) noexcept {
  switch (method) {
    case Method::enet: return "enet";
    case Method::lasso: return "lasso";
    case Method::alasso: return "alasso";
    case Method::ridge: return "ridge";
    case Method::ols: return "ols";
  }
  return "enet";
}

Method parse_method(std::string_view name) {
  if (name == "enet") return Method::enet;
  if (name == "lasso") return Method::lasso;
  if (name == "alasso") return Method::alasso;
  if (name == "ridge") return Method::ridge;
  if (name == "ols") return Method::ols;
  throw Error(ErrorKind::config, "unknown method '" + std::string(name) + "'");
}

PenaltySpec PenaltySpec::enet(double lambda1, double lambda2) {
  return {Method::enet, lambda1, lambda2, std::nullopt, 1.0};
}
PenaltySpec PenaltySpec::lasso(double lambda1) { return {Method::lasso, lambda1, 0.0, std::nullopt, 1.0}; }
PenaltySpec PenaltySpec::alasso(double lambda1, Vector weights, double gamma) {
  return {Method::alasso, lambda1, 0.0, std::move(weights), gamma};
}
PenaltySpec PenaltySpec::ridge(double lambda2) { return {Method::ridge, 0.0, lambda2, std::nullopt, 1.0}; }
PenaltySpec PenaltySpec::ols() { return {Method::ols, 0.0, 0.0, std::nullopt, 1.0}; }

PenaltySpec PenaltySpec::with_lambda1(double value) const {
  PenaltySpec copy = *this;
  copy.lambda1 = value;
  return copy;
}

PenaltySpec PenaltySpec::with_lambda2(double value) const {
  PenaltySpec copy = *this;
  copy.lambda2 = value;
  return copy;
}

void validate(const PenaltySpec& spec, Index p) {
  const auto fail = [&](const std::string& msg) {
    throw Error(ErrorKind::config, std::string(to_string(spec.method)) + ": " + msg);
  };
  if (!(spec.lambda1 >= 0.0) || !std::isfinite(spec.lambda1)) fail("lambda1 must be finite and >= 0");
  if (!(spec.lambda2 >= 0.0) || !std::isfinite(spec.lambda2)) fail("lambda2 must be finite and >= 0");
  switch (spec.method) {
    case Method::enet: break;
    case Method::lasso:
      if (spec.lambda2 != 0.0) fail("lasso requires lambda2 = 0");
      break;
    case Method::ridge:
      if (spec.lambda1 != 0.0) fail("ridge requires lambda1 = 0");
      break;
    case Method::ols:
      if (spec.lambda1 != 0.0 || spec.lambda2 != 0.0) fail("ols requires lambda1 = lambda2 = 0");
      break;
    case Method::alasso:
      if (spec.lambda2 != 0.0) fail("adaptive lasso requires lambda2 = 0");
      if (!spec.adaptive_weights) fail("adaptive weights missing");
      if (!(spec.adaptive_gamma > 0.0)) fail("gamma must be positive");
      break;
  }
  if (spec.adaptive_weights) {
    if (spec.method != Method::alasso) fail("adaptive weights are only meaningful for alasso");
    const auto& w = *spec.adaptive_weights;
    if (w.size() != p) fail("adaptive weight vector has the wrong length");
    if (!w.allFinite() || (w.array() <= 0.0).any()) fail("adaptive weights must be finite and positive");
  }
}

PenaltyPair from_normalized_penalty(double lambda, double alpha, Index n) {
  if (!(lambda >= 0.0) || !(alpha >= 0.0 && alpha <= 1.0) || n < 1) {
    throw Error(ErrorKind::precondition, "need lambda >= 0, alpha in [0,1], n >= 1");
  }
  const double dn = static_cast<double>(n);
  return {2.0 * dn * lambda * alpha, dn * lambda * (1.0 - alpha)};
}

Index FitResult::nonzero_count() const { return (beta.values.array() != 0.0).count(); }

double objective(const Vector& beta, const Matrix& x, const Vector& y, const PenaltySpec& spec) {
  if (x.rows() != y.size() || x.cols() != beta.size()) {
    throw Error(ErrorKind::dimension, "objective: beta, X and y dimensions disagree");
  }
  if (spec.adaptive_weights && spec.adaptive_weights->size() != beta.size()) {
    throw Error(ErrorKind::dimension, "objective: weight vector length mismatch");
  }
  const double rss = (y - x * beta).squaredNorm();
  double l1 = 0.0;
  for (Index j = 0; j < beta.size(); ++j) l1 += spec.l1_weight(j) * std::abs(beta(j));
  return rss + spec.lambda2 * beta.squaredNorm() + spec.lambda1 * l1;
}

double objective(const CoefficientVector& beta, const PartialResiduals& pr, const PenaltySpec& spec) {
  return objective(beta.values, pr.x_tilde, pr.y_tilde, spec);
}

std::vector<std::vector<Index>> duplicate_column_groups(const Matrix& x) {
  const auto rows = static_cast<std::size_t>(x.rows());
  const auto bytes = [&](Index j) {
    return std::string_view(reinterpret_cast<const char*>(x.col(j).data()), rows * sizeof(double));
  };
  std::unordered_map<std::string_view, std::vector<Index>> by_content;
  std::vector<std::string_view> first_seen;
  for (Index j = 0; j < x.cols(); ++j) {
    auto [it, inserted] = by_content.try_emplace(bytes(j));
    if (inserted) first_seen.push_back(it->first);
    it->second.push_back(j);
  }
  std::vector<std::vector<Index>> groups;
  for (const auto& key : first_seen) {
    auto& members = by_content[key];
    if (members.size() > 1) groups.push_back(std::move(members));
  }
  return groups;
}

double lambda1_max(const Matrix& x, const Vector& y, const PenaltySpec& spec) {
  if (x.rows() != y.size()) throw Error(ErrorKind::dimension, "lambda1_max: X and y disagree on n");
  const Vector xty = x.transpose() * y;
  double best = 0.0;
  for (Index j = 0; j < x.cols(); ++j) best = std::max(best, 2.0 * std::abs(xty(j)) / spec.l1_weight(j));
  return best;
}

namespace {

double soft_threshold(double z, double gamma) {
  if (z > gamma) return z - gamma;
  if (z < -gamma) return z + gamma;
  return 0.0;
}

double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

/// Largest violation of the subgradient conditions at (beta, residuals).
double stationarity_violation(const Matrix& x, const Vector& residuals, const Vector& beta,
                              const PenaltySpec& spec) {
  const Vector corr = x.transpose() * residuals;
  double worst = 0.0;
  for (Index k = 0; k < beta.size(); ++k) {
    const double l1 = spec.lambda1 * spec.l1_weight(k);
    double v;
    if (beta(k) != 0.0) {
      v = std::abs(-2.0 * corr(k) + l1 * sign_of(beta(k)) + 2.0 * spec.lambda2 * beta(k));
    } else {
      v = std::max(0.0, std::abs(2.0 * corr(k)) - l1);
    }
    worst = std::max(worst, v);
  }
  return worst;
}

struct ReducedVariable {
  Index representative = 0;
  std::vector<Index> members;
  double multiplicity = 1.0;
  double l1_weight = 1.0;
};

/// Coordinate descent over "reduced" variables: each group of identical
/// columns shares one coefficient when lambda2 > 0, which is where the unique
/// minimizer lives. Singleton groups are ordinary coordinates.
class CoordinateDescent {
 public:
  CoordinateDescent(const Matrix& x, const Vector& y, const PenaltySpec& spec, const SolverOptions& opts)
      : x_(x), y_(y), spec_(spec), opts_(opts) {
    const Index p = x.cols();
    std::vector<bool> grouped(static_cast<std::size_t>(p), false);
    const auto groups = duplicate_column_groups(x);
    const bool tie = opts.symmetrize_duplicates && spec.lambda2 > 0.0;
    const bool collapse = opts.symmetrize_duplicates && spec.lambda2 == 0.0;
    std::vector<bool> excluded(static_cast<std::size_t>(p), false);
    std::vector<std::vector<Index>> tied;
    for (const auto& g : groups) {
      bool same_weights = true;
      for (Index j : g) same_weights = same_weights && spec.l1_weight(j) == spec.l1_weight(g.front());
      if (tie && same_weights) {
        tied.push_back(g);
        for (Index j : g) grouped[static_cast<std::size_t>(j)] = true;
      } else if (collapse) {
        // Only the group total enters the fit, so the cheapest member
        // (lowest index among equals) carries all of it.
        Index carrier = g.front();
        for (Index j : g) {
          if (spec.l1_weight(j) < spec.l1_weight(carrier)) carrier = j;
        }
        std::string msg = "identical columns";
        for (Index j : g) {
          msg += " " + std::to_string(j + 1);
          if (j != carrier) excluded[static_cast<std::size_t>(j)] = true;
        }
        msg += ": minimizer not unique with lambda2 = 0; column " + std::to_string(carrier + 1) + " carries the group";
        notes_.push_back(std::move(msg));
      } else {
        std::string msg = "identical columns";
        for (Index j : g) msg += " " + std::to_string(j + 1);
        msg += spec.lambda2 > 0.0 ? " left untied" : ": minimizer not unique with lambda2 = 0";
        notes_.push_back(std::move(msg));
      }
    }
    // Reduced variables keep ascending order of their lowest member.
    std::size_t next_group = 0;
    for (Index j = 0; j < p; ++j) {
      if (grouped[static_cast<std::size_t>(j)]) {
        if (next_group < tied.size() && tied[next_group].front() == j) {
          const auto& g = tied[next_group++];
          vars_.push_back({j, g, static_cast<double>(g.size()), spec.l1_weight(j)});
        }
        continue;
      }
      if (!excluded[static_cast<std::size_t>(j)]) vars_.push_back({j, {j}, 1.0, spec.l1_weight(j)});
    }
    // tied is sorted by first member since duplicate_column_groups scans in order.
    const Index q = num_vars();
    reps_.resize(x.rows(), q);
    for (Index v = 0; v < q; ++v) reps_.col(v) = x.col(vars_[static_cast<std::size_t>(v)].representative);
    col_sq_ = reps_.colwise().squaredNorm().transpose();
    xty_ = reps_.transpose() * y;
    gram_mode_ = x.rows() > q && q <= 4000;
    if (gram_mode_) gram_ = reps_.transpose() * reps_;
    b_ = Vector::Zero(q);
  }

  [[nodiscard]] Index num_vars() const { return static_cast<Index>(vars_.size()); }

  void warm_start(const Vector& beta) {
    if (beta.size() != x_.cols()) throw Error(ErrorKind::dimension, "warm start has the wrong length");
    for (Index v = 0; v < num_vars(); ++v) {
      const auto& var = vars_[static_cast<std::size_t>(v)];
      double acc = 0.0;
      for (Index j : var.members) acc += beta(j);
      b_(v) = acc / var.multiplicity;
    }
  }

  FitResult solve(double lambda1) {
    lambda1_ = lambda1;
    FitResult result;
    result.spec = spec_.with_lambda1(lambda1);
    result.notes = notes_;
    refresh_correlations();
    std::vector<signed char> signature, previous, last_refined;
    int sweeps_since_refine = 0;
    auto maybe_refine = [&] {
      if (!opts_.active_set_refinement) return;
      active_signature(signature);
      ++sweeps_since_refine;
      if (signature == previous && (signature != last_refined || sweeps_since_refine >= 25)) {
        last_refined = signature;
        sweeps_since_refine = 0;
        if (spec_.lambda2 == 0.0 && reduce_support()) active_signature(signature);
        if (refine(signature) && opts_.record_trace) result.objective_trace.push_back(current_objective());
      }
      previous.swap(signature);
    };
    bool converged = false;
    int it = 0;
    std::vector<Index> active;
    while (it < opts_.max_iterations) {
      ++it;
      const double max_change = sweep(nullptr);
      if (opts_.record_trace) result.objective_trace.push_back(current_objective());
      if (max_change <= opts_.tolerance * (1.0 + b_.cwiseAbs().maxCoeff())) {
        refresh_correlations();
        if (reduced_violation() <= opts_.tolerance) {
          converged = true;
          break;
        }
      }
      maybe_refine();
      // Cycle over the current active set until it settles, then re-sweep all.
      active.clear();
      for (Index v = 0; v < num_vars(); ++v) {
        if (b_(v) != 0.0) active.push_back(v);
      }
      if (active.empty() || static_cast<Index>(active.size()) == num_vars()) continue;
      while (it < opts_.max_iterations) {
        ++it;
        const double change = sweep(&active);
        if (opts_.record_trace) result.objective_trace.push_back(current_objective());
        if (change <= opts_.tolerance * (1.0 + b_.cwiseAbs().maxCoeff())) break;
        maybe_refine();
      }
    }
    if (it == 0) refresh_correlations();

    Vector beta = expanded();
    result.iterations = it;
    result.converged = converged;
    if (!converged) {
      result.notes.push_back("coordinate descent stopped after " + std::to_string(it) +
                             " sweeps without meeting the tolerance");
    }
    const Vector residuals = y_ - x_ * beta;
    result.dual_gap_proxy = stationarity_violation(x_, residuals, beta, result.spec);
    result.rescale_factor = opts_.rescaled ? 1.0 + spec_.lambda2 : 1.0;
    result.beta.values = beta * result.rescale_factor;
    result.residuals = opts_.rescaled ? Vector(y_ - x_ * result.beta.values) : residuals;
    result.objective = objective(result.beta.values, x_, y_, result.spec);
    return result;
  }

  [[nodiscard]] Vector expanded() const {
    Vector beta = Vector::Zero(x_.cols());
    for (Index v = 0; v < num_vars(); ++v) {
      for (Index j : vars_[static_cast<std::size_t>(v)].members) beta(j) = b_(v);
    }
    return beta;
  }

 private:
  // corr_(v) = x_rep_v' r for the current residual r.
  void refresh_correlations() {
    const Vector c = b_.cwiseProduct(multiplicities());
    if (gram_mode_) {
      corr_ = xty_ - gram_ * c;
    } else {
      residual_ = y_ - reps_ * c;
      corr_ = reps_.transpose() * residual_;
    }
  }

  [[nodiscard]] Vector multiplicities() const {
    Vector g(num_vars());
    for (Index v = 0; v < num_vars(); ++v) g(v) = vars_[static_cast<std::size_t>(v)].multiplicity;
    return g;
  }

  /// One cyclic pass over `subset` (all variables when null). Returns the
  /// largest coefficient move.
  double sweep(const std::vector<Index>* subset) {
    double max_change = 0.0;
    const Index count = subset ? static_cast<Index>(subset->size()) : num_vars();
    for (Index pos = 0; pos < count; ++pos) {
      const Index v = subset ? (*subset)[static_cast<std::size_t>(pos)] : pos;
      const auto& var = vars_[static_cast<std::size_t>(v)];
      const double g = var.multiplicity;
      const double a = col_sq_(v);
      const double denom = 2.0 * g * a + 2.0 * spec_.lambda2;
      const double old = b_(v);
      if (!gram_mode_) corr_(v) = reps_.col(v).dot(residual_);
      double updated = 0.0;
      if (denom > 0.0) {
        const double z = 2.0 * (corr_(v) + g * a * old);
        updated = soft_threshold(z, lambda1_ * var.l1_weight) / denom;
      }
      const double delta = updated - old;
      if (delta == 0.0) continue;
      b_(v) = updated;
      if (gram_mode_) {
        corr_.noalias() -= (g * delta) * gram_.col(v);
      } else {
        residual_.noalias() -= (g * delta) * reps_.col(v);
      }
      max_change = std::max(max_change, std::abs(delta));
    }
    return max_change;
  }

  // Stationarity violation per member coordinate; corr_ must be fresh.
  [[nodiscard]] double reduced_violation() const {
    double worst = 0.0;
    for (Index v = 0; v < num_vars(); ++v) {
      const double l1 = lambda1_ * vars_[static_cast<std::size_t>(v)].l1_weight;
      const double b = b_(v);
      const double viol = b != 0.0
                              ? std::abs(-2.0 * corr_(v) + l1 * sign_of(b) + 2.0 * spec_.lambda2 * b)
                              : std::max(0.0, std::abs(2.0 * corr_(v)) - l1);
      worst = std::max(worst, viol);
    }
    return worst;
  }

  [[nodiscard]] double reduced_objective(const Vector& b) const {
    const Vector g = multiplicities();
    const Vector r = y_ - reps_ * b.cwiseProduct(g);
    double penalty = 0.0;
    for (Index v = 0; v < num_vars(); ++v) {
      const auto& var = vars_[static_cast<std::size_t>(v)];
      penalty += var.multiplicity *
                 (spec_.lambda2 * b(v) * b(v) + lambda1_ * var.l1_weight * std::abs(b(v)));
    }
    return r.squaredNorm() + penalty;
  }

  double current_objective() const { return reduced_objective(b_); }

  void active_signature(std::vector<signed char>& out) const {
    out.resize(static_cast<std::size_t>(num_vars()));
    for (Index v = 0; v < num_vars(); ++v) out[static_cast<std::size_t>(v)] = static_cast<signed char>(sign_of(b_(v)));
  }

  // Without a ridge term the active columns can be linearly dependent. Moving
  // along a null direction of X_A leaves the fit unchanged and, oriented
  // downhill for the l1 term, drives some coefficient to zero first.
  bool reduce_support() {
    bool changed = false;
    for (;;) {
      std::vector<Index> active;
      for (Index v = 0; v < num_vars(); ++v) {
        if (b_(v) != 0.0) active.push_back(v);
      }
      const auto m = static_cast<Index>(active.size());
      if (m < 2) break;
      Matrix xa(x_.rows(), m);
      for (Index a = 0; a < m; ++a) xa.col(a) = reps_.col(active[static_cast<std::size_t>(a)]);
      Eigen::FullPivLU<Matrix> lu(xa);
      lu.setThreshold(1e-10);
      if (lu.rank() == m) break;
      Vector d = lu.kernel().col(0);
      double slope = 0.0;
      for (Index a = 0; a < m; ++a) {
        const Index v = active[static_cast<std::size_t>(a)];
        slope += vars_[static_cast<std::size_t>(v)].l1_weight * sign_of(b_(v)) * d(a);
      }
      if (std::abs(slope) <= 1e-12 * d.cwiseAbs().sum()) {
        // Flat direction: release the highest-index coordinate first.
        Index last = m - 1;
        while (last > 0 && std::abs(d(last)) <= 1e-12) --last;
        if (b_(active[static_cast<std::size_t>(last)]) * d(last) > 0.0) d = -d;
      } else if (slope > 0.0) {
        d = -d;
      }
      Index hit = -1;
      double step = std::numeric_limits<double>::infinity();
      for (Index a = 0; a < m; ++a) {
        const double bv = b_(active[static_cast<std::size_t>(a)]);
        if (bv * d(a) < 0.0 && -bv / d(a) < step) {
          step = -bv / d(a);
          hit = a;
        }
      }
      if (hit < 0) break;
      Vector candidate = b_;
      for (Index a = 0; a < m; ++a) candidate(active[static_cast<std::size_t>(a)]) += step * d(a);
      candidate(active[static_cast<std::size_t>(hit)]) = 0.0;
      const double before = current_objective();
      const double after = reduced_objective(candidate);
      if (!(after <= before + 1e-12 * std::max(1.0, std::abs(before)))) break;
      b_ = candidate;
      refresh_correlations();
      changed = true;
    }
    return changed;
  }

  /// Solves the stationarity equations with the active set and signs held
  /// fixed, then steps toward that solution as far as the signs allow.
  /// Rejected if the objective would rise.
  bool refine(const std::vector<signed char>& signs) {
    std::vector<Index> active;
    for (Index v = 0; v < num_vars(); ++v) {
      if (signs[static_cast<std::size_t>(v)] != 0) active.push_back(v);
    }
    const auto m = static_cast<Index>(active.size());
    if (m == 0) return false;
    if (spec_.lambda2 == 0.0 && m > x_.rows()) return false;

    Matrix system(m, m);
    Vector rhs(m);
    Vector g(m);
    for (Index a = 0; a < m; ++a) g(a) = vars_[static_cast<std::size_t>(active[static_cast<std::size_t>(a)])].multiplicity;
    if (gram_mode_) {
      for (Index a = 0; a < m; ++a) {
        for (Index c = 0; c < m; ++c) system(a, c) = gram_(active[static_cast<std::size_t>(a)], active[static_cast<std::size_t>(c)]);
      }
    } else {
      Matrix xa(x_.rows(), m);
      for (Index a = 0; a < m; ++a) xa.col(a) = reps_.col(active[static_cast<std::size_t>(a)]);
      system.noalias() = xa.transpose() * xa;
    }
    for (Index a = 0; a < m; ++a) {
      const Index v = active[static_cast<std::size_t>(a)];
      const auto& var = vars_[static_cast<std::size_t>(v)];
      rhs(a) = g(a) * (xty_(v) - 0.5 * lambda1_ * var.l1_weight * signs[static_cast<std::size_t>(v)]);
    }
    system = g.asDiagonal() * system * g.asDiagonal();
    system.diagonal() += spec_.lambda2 * g;

    const Eigen::LDLT<Matrix> ldlt(system);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return false;
    const Vector d = ldlt.vectorD();
    if (d.minCoeff() <= 1e-13 * std::max(1.0, d.maxCoeff())) return false;
    const Vector solution = ldlt.solve(rhs);
    if (!solution.allFinite()) return false;

    // Walk toward the solution of the sign-restricted problem, stopping
    // where the first coefficient would change sign.
    double step = 1.0;
    Index blocking = -1;
    for (Index a = 0; a < m; ++a) {
      const Index v = active[static_cast<std::size_t>(a)];
      const double sgn = signs[static_cast<std::size_t>(v)];
      const double from = sgn * b_(v);
      const double to = sgn * solution(a);
      if (to <= 0.0 && from > 0.0) {
        const double t = from / (from - to);
        if (t < step) {
          step = t;
          blocking = v;
        }
      }
    }
    Vector candidate = Vector::Zero(num_vars());
    for (Index a = 0; a < m; ++a) {
      const Index v = active[static_cast<std::size_t>(a)];
      candidate(v) = b_(v) + step * (solution(a) - b_(v));
      if (sign_of(candidate(v)) != signs[static_cast<std::size_t>(v)]) candidate(v) = 0.0;
    }
    if (blocking >= 0) candidate(blocking) = 0.0;
    const double before = current_objective();
    const double after = reduced_objective(candidate);
    if (!(after <= before + 1e-13 * std::max(1.0, std::abs(before)))) return false;
    b_ = candidate;
    refresh_correlations();
    return true;
  }

  const Matrix& x_;
  const Vector& y_;
  PenaltySpec spec_;
  SolverOptions opts_;
  std::vector<ReducedVariable> vars_;
  std::vector<std::string> notes_;
  Matrix reps_;
  Vector col_sq_;
  Vector xty_;
  bool gram_mode_ = false;
  Matrix gram_;
  Vector b_;
  Vector corr_;
  Vector residual_;
  double lambda1_ = 0.0;
};

void check_inputs(const Matrix& x, const Vector& y, const SolverOptions& opts) {
  if (x.rows() != y.size()) throw Error(ErrorKind::dimension, "fit: X and y disagree on n");
  if (x.cols() < 1) throw Error(ErrorKind::dimension, "fit: design has no columns");
  if (!(opts.tolerance > 0.0)) throw Error(ErrorKind::precondition, "fit: tolerance must be positive");
  if (opts.max_iterations < 1) throw Error(ErrorKind::precondition, "fit: max_iterations must be >= 1");
}

}  // namespace

FitResult fit(const Matrix& x, const Vector& y, const PenaltySpec& spec, const SolverOptions& opts,
              const Vector* warm_start) {
  check_inputs(x, y, opts);
  validate(spec, x.cols());
  CoordinateDescent solver(x, y, spec, opts);
  if (warm_start) solver.warm_start(*warm_start);
  FitResult result = solver.solve(spec.lambda1);
  result.beta.names = default_column_names(x.cols());
  return result;
}

FitResult fit(const PartialResiduals& pr, const PenaltySpec& spec, const SolverOptions& opts,
              const Vector* warm_start) {
  FitResult result = fit(pr.x_tilde, pr.y_tilde, spec, opts, warm_start);
  if (static_cast<Index>(pr.column_names.size()) == pr.p()) result.beta.names = pr.column_names;
  return result;
}

std::vector<FitResult> fit_path(const Matrix& x, const Vector& y, const PenaltySpec& spec,
                                const std::vector<double>& lambda1_grid, const SolverOptions& opts) {
  check_inputs(x, y, opts);
  for (std::size_t i = 1; i < lambda1_grid.size(); ++i) {
    if (!(lambda1_grid[i] < lambda1_grid[i - 1])) {
      throw Error(ErrorKind::config, "lambda1 grid must be strictly descending");
    }
  }
  std::vector<FitResult> path;
  if (lambda1_grid.empty()) return path;
  validate(spec.with_lambda1(lambda1_grid.front()), x.cols());
  validate(spec.with_lambda1(lambda1_grid.back()), x.cols());
  CoordinateDescent solver(x, y, spec, opts);
  const auto names = default_column_names(x.cols());
  path.reserve(lambda1_grid.size());
  for (double lambda1 : lambda1_grid) {
    path.push_back(solver.solve(lambda1));
    path.back().beta.names = names;
  }
  return path;
}

AugmentedProblem augment_to_lasso(const Matrix& x, const Vector& y, double lambda2, double lambda1) {
  if (!(lambda2 >= 0.0) || !(lambda1 >= 0.0)) {
    throw Error(ErrorKind::precondition, "augment_to_lasso: penalties must be >= 0");
  }
  if (x.rows() != y.size()) throw Error(ErrorKind::dimension, "augment_to_lasso: X and y disagree on n");
  const Index n = x.rows();
  const Index p = x.cols();
  AugmentedProblem aug;
  aug.scale = 1.0 / std::sqrt(1.0 + lambda2);
  aug.lambda_star = lambda1 * aug.scale;
  aug.x_star.resize(n + p, p);
  aug.x_star.topRows(n) = aug.scale * x;
  aug.x_star.bottomRows(p) = Matrix::Identity(p, p) * (aug.scale * std::sqrt(lambda2));
  aug.y_star = Vector::Zero(n + p);
  aug.y_star.head(n) = y;
  return aug;
}

AugmentedProblem augment_to_lasso(const PartialResiduals& pr, double lambda2, double lambda1) {
  return augment_to_lasso(pr.x_tilde, pr.y_tilde, lambda2, lambda1);
}

FitResult fit_via_augmentation(const Matrix& x, const Vector& y, double lambda1, double lambda2,
                               const SolverOptions& opts) {
  const AugmentedProblem aug = augment_to_lasso(x, y, lambda2, lambda1);
  SolverOptions inner = opts;
  inner.rescaled = false;
  inner.record_trace = false;
  // Stationarity in the augmented coordinates is scaled by `scale`.
  inner.tolerance = opts.tolerance * aug.scale;
  FitResult lasso = fit(aug.x_star, aug.y_star, PenaltySpec::lasso(aug.lambda_star), inner);

  const PenaltySpec spec = PenaltySpec::enet(lambda1, lambda2);
  FitResult result;
  result.spec = spec;
  result.iterations = lasso.iterations;
  result.converged = lasso.converged;
  result.notes = lasso.notes;
  const Vector naive = aug.scale * lasso.beta.values;
  const Vector residuals = y - x * naive;
  result.dual_gap_proxy = stationarity_violation(x, residuals, naive, spec);
  result.rescale_factor = opts.rescaled ? 1.0 + lambda2 : 1.0;
  result.beta.values = naive * result.rescale_factor;
  result.beta.names = default_column_names(x.cols());
  result.residuals = y - x * result.beta.values;
  result.objective = objective(result.beta.values, x, y, spec);
  return result;
}

FitResult fit_ridge_closed_form(const Matrix& x, const Vector& y, double lambda2, const RidgeOptions& opts) {
  if (!(lambda2 > 0.0) || !std::isfinite(lambda2)) {
    throw Error(ErrorKind::precondition, "closed-form ridge needs lambda2 > 0");
  }
  if (x.rows() != y.size()) throw Error(ErrorKind::dimension, "ridge: X and y disagree on n");
  const Index p = x.cols();
  std::vector<Index> kept;
  std::vector<std::string> notes;
  if (opts.drop_duplicate_columns) {
    std::vector<bool> dropped(static_cast<std::size_t>(p), false);
    for (const auto& group : duplicate_column_groups(x)) {
      std::string msg = "aliased columns dropped:";
      for (std::size_t k = 1; k < group.size(); ++k) {
        dropped[static_cast<std::size_t>(group[k])] = true;
        msg += " " + std::to_string(group[k] + 1);
      }
      notes.push_back(std::move(msg));
    }
    for (Index j = 0; j < p; ++j) {
      if (!dropped[static_cast<std::size_t>(j)]) kept.push_back(j);
    }
  } else {
    for (Index j = 0; j < p; ++j) kept.push_back(j);
  }
  const auto m = static_cast<Index>(kept.size());
  Matrix xk(x.rows(), m);
  for (Index c = 0; c < m; ++c) xk.col(c) = x.col(kept[static_cast<std::size_t>(c)]);

  Matrix system = xk.transpose() * xk;
  system.diagonal().array() += lambda2;
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(system, Eigen::EigenvaluesOnly);
  const double condition = eig.eigenvalues().maxCoeff() / eig.eigenvalues().minCoeff();
  if (!(condition <= opts.condition_warning)) {
    notes.push_back("ill-conditioned ridge system (condition " + format_double(condition) + ")");
  }
  const Eigen::LLT<Matrix> llt(system);
  const Vector solved = llt.solve(xk.transpose() * y);

  FitResult result;
  result.spec = PenaltySpec::ridge(lambda2);
  result.beta.values = Vector::Zero(p);
  for (Index c = 0; c < m; ++c) result.beta.values(kept[static_cast<std::size_t>(c)]) = solved(c);
  result.beta.names = default_column_names(p);
  result.residuals = y - x * result.beta.values;
  result.objective = objective(result.beta.values, x, y, result.spec);
  result.dual_gap_proxy = stationarity_violation(x, result.residuals, result.beta.values, result.spec);
  result.converged = llt.info() == Eigen::Success && result.beta.values.allFinite();
  result.iterations = 1;
  result.notes = std::move(notes);
  return result;
}

FitResult fit_ridge_closed_form(const PartialResiduals& pr, double lambda2, const RidgeOptions& opts) {
  FitResult result = fit_ridge_closed_form(pr.x_tilde, pr.y_tilde, lambda2, opts);
  if (static_cast<Index>(pr.column_names.size()) == pr.p()) result.beta.names = pr.column_names;
  return result;
}

Vector adaptive_weights(const Matrix& x, const Vector& y, const AdaptiveLassoOptions& opts) {
  if (!(opts.gamma > 0.0)) throw Error(ErrorKind::config, "adaptive lasso gamma must be positive");
  if (!(opts.weight_guard > 0.0)) throw Error(ErrorKind::config, "adaptive lasso guard must be positive");
  const double init_lambda2 =
      opts.initial_lambda2 > 0.0 ? opts.initial_lambda2 : 1e-3 * static_cast<double>(x.rows());
  Vector init = fit_ridge_closed_form(x, y, init_lambda2).beta.values;
  // The ridge minimizer is symmetric in identical columns; remove rounding noise.
  for (const auto& group : duplicate_column_groups(x)) {
    double mean = 0.0;
    for (Index j : group) mean += init(j);
    mean /= static_cast<double>(group.size());
    for (Index j : group) init(j) = mean;
  }
  return (init.array().abs() + opts.weight_guard).pow(-opts.gamma).matrix();
}

FitResult fit_alasso(const Matrix& x, const Vector& y, double lambda1, const AdaptiveLassoOptions& alasso,
                     const SolverOptions& opts) {
  Vector weights = adaptive_weights(x, y, alasso);
  return fit(x, y, PenaltySpec::alasso(lambda1, std::move(weights), alasso.gamma), opts);
}

FitResult fit_alasso(const PartialResiduals& pr, double lambda1, const AdaptiveLassoOptions& alasso,
                     const SolverOptions& opts) {
  FitResult result = fit_alasso(pr.x_tilde, pr.y_tilde, lambda1, alasso, opts);
  if (static_cast<Index>(pr.column_names.size()) == pr.p()) result.beta.names = pr.column_names;
  return result;
}

}  // namespace plm_enet
