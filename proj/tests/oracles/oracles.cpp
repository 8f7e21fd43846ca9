#include "oracles.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace oracle {

double kernel(Kernel k, double u) {
  switch (k) {
    case Kernel::box:
      return std::abs(u) <= 1.0 ? 0.5 : 0.0;
    case Kernel::epanechnikov:
      return std::abs(u) <= 1.0 ? 0.75 * (1.0 - u * u) : 0.0;
    case Kernel::gaussian:
      return std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
  }
  return 0.0;
}

Vector naive_nw(const Vector& values, const Vector& t, double h, Kernel k) {
  return naive_nw_at(values, t, t, h, k);
}

Vector naive_nw_at(const Vector& values, const Vector& t, const Vector& eval_t, double h, Kernel k) {
  Vector out(eval_t.size());
  for (Eigen::Index j = 0; j < eval_t.size(); ++j) {
    double num = 0.0;
    double den = 0.0;
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      const double w = kernel(k, (t(i) - eval_t(j)) / h);
      num += w * values(i);
      den += w;
    }
    out(j) = den > 0.0 ? num / den : values.mean();
  }
  return out;
}

double enet_objective(const Matrix& x, const Vector& y, const Vector& b, double lambda1, double lambda2,
                      const Vector& w) {
  return (y - x * b).squaredNorm() + lambda2 * b.squaredNorm() + lambda1 * w.cwiseProduct(b.cwiseAbs()).sum();
}

Vector sign_enumeration(const Matrix& x, const Vector& y, double lambda1, double lambda2) {
  return sign_enumeration(x, y, lambda1, lambda2, Vector::Ones(x.cols()));
}

Vector sign_enumeration(const Matrix& x, const Vector& y, double lambda1, double lambda2, const Vector& w) {
  const auto p = static_cast<int>(x.cols());
  Vector best = Vector::Zero(p);
  double best_value = enet_objective(x, y, best, lambda1, lambda2, w);
  // Each coordinate is 0, + or -: walk all 3^p patterns.
  int total = 1;
  for (int j = 0; j < p; ++j) total *= 3;
  for (int code = 1; code < total; ++code) {
    std::vector<int> active;
    std::vector<double> sign;
    int c = code;
    for (int j = 0; j < p; ++j) {
      const int digit = c % 3;
      c /= 3;
      if (digit != 0) {
        active.push_back(j);
        sign.push_back(digit == 1 ? 1.0 : -1.0);
      }
    }
    const auto m = static_cast<Eigen::Index>(active.size());
    Matrix xa(x.rows(), m);
    Vector rhs(m);
    for (Eigen::Index a = 0; a < m; ++a) xa.col(a) = x.col(active[a]);
    Matrix lhs = xa.transpose() * xa;
    lhs.diagonal().array() += lambda2;
    for (Eigen::Index a = 0; a < m; ++a) rhs(a) = xa.col(a).dot(y) - 0.5 * lambda1 * w(active[a]) * sign[a];
    Eigen::FullPivLU<Matrix> lu(lhs);
    if (lu.rank() < m) continue;
    const Vector ba = lu.solve(rhs);
    bool ok = true;
    for (Eigen::Index a = 0; a < m && ok; ++a) ok = ba(a) * sign[a] > 0.0;
    if (!ok) continue;
    Vector b = Vector::Zero(p);
    for (Eigen::Index a = 0; a < m; ++a) b(active[a]) = ba(a);
    const double value = enet_objective(x, y, b, lambda1, lambda2, w);
    if (value < best_value) {
      best_value = value;
      best = b;
    }
  }
  return best;
}

namespace {

double golden_section(const std::function<double(double)>& f, double lo, double hi, double tol) {
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - ratio * (b - a), d = a + ratio * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

Vector grid_search(const Matrix& x, const Vector& y, double lambda1, double lambda2, double lo, double hi,
                   double step, const Vector* l1_scale, const Vector* l2_scale) {
  const auto p = static_cast<int>(x.cols());
  const Vector w1 = l1_scale ? *l1_scale : Vector::Ones(p);
  const Vector w2 = l2_scale ? *l2_scale : Vector::Ones(p);
  const auto points = static_cast<long>(std::floor((hi - lo) / step)) + 1;
  Vector best = Vector::Zero(p);
  double best_value = std::numeric_limits<double>::infinity();
  // Objective pieces precomputed so each grid point is O(p^2).
  const Matrix gram = x.transpose() * x;
  const Vector xty = x.transpose() * y;
  const double yty = y.squaredNorm();
  const auto value_at = [&](const Vector& b) {
    return yty - 2.0 * xty.dot(b) + b.dot(gram * b) + lambda2 * w2.dot(b.cwiseAbs2()) +
           lambda1 * w1.dot(b.cwiseAbs());
  };
  std::vector<long> idx(static_cast<std::size_t>(p), 0);
  Vector b(p);
  for (;;) {
    for (int j = 0; j < p; ++j) b(j) = lo + step * static_cast<double>(idx[static_cast<std::size_t>(j)]);
    const double v = value_at(b);
    if (v < best_value) {
      best_value = v;
      best = b;
    }
    int j = 0;
    while (j < p && ++idx[static_cast<std::size_t>(j)] == points) idx[static_cast<std::size_t>(j++)] = 0;
    if (j == p) break;
  }
  // Cyclic golden-section refinement inside one grid cell around the best point.
  for (int sweep = 0; sweep < 200; ++sweep) {
    const Vector before = best;
    for (int j = 0; j < p; ++j) {
      Vector probe = best;
      const auto f = [&](double v) {
        probe(j) = v;
        return value_at(probe);
      };
      best(j) = golden_section(f, best(j) - 2.0 * step, best(j) + 2.0 * step, 1e-12);
    }
    if ((best - before).cwiseAbs().maxCoeff() < 1e-12) break;
  }
  return best;
}

Vector least_squares(const Matrix& x, const Vector& y) { return x.householderQr().solve(y); }

Vector ridge_qr(const Matrix& x, const Vector& y, double lambda2) {
  const auto n = x.rows();
  const auto p = x.cols();
  Matrix stacked(n + p, p);
  stacked << x, std::sqrt(lambda2) * Matrix::Identity(p, p);
  Vector rhs = Vector::Zero(n + p);
  rhs.head(n) = y;
  return stacked.colPivHouseholderQr().solve(rhs);
}

Matrix correlated_design(std::mt19937_64& rng, Eigen::Index n, Eigen::Index p, double rho) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix x(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double latent = normal(rng);
    for (Eigen::Index j = 0; j < p; ++j) x(i, j) = rho * latent + std::sqrt(1.0 - rho * rho) * normal(rng);
  }
  return x;
}

}  // namespace oracle
