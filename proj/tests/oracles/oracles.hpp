#pragma once

// Reference implementations used only by the tests. None of them calls into
// the library's smoother or solver; they trade speed for obviousness.

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Kernel { box, epanechnikov, gaussian };

double kernel(Kernel k, double u);

/// Double loop over all pairs: m(t_j) = sum_i K((t_i - t_j)/h) v_i / sum_i K(...).
Vector naive_nw(const Vector& values, const Vector& t, double h, Kernel k = Kernel::box);

/// Same, evaluated at `eval_t` from reference points (t, values). Points with
/// zero total weight get the mean of `values`.
Vector naive_nw_at(const Vector& values, const Vector& t, const Vector& eval_t, double h, Kernel k = Kernel::box);

/// ||y - X b||^2 + lambda2 ||b||^2 + lambda1 sum w_j |b_j|.
double enet_objective(const Matrix& x, const Vector& y, const Vector& b, double lambda1, double lambda2,
                      const Vector& w);

/// Exact minimizer by enumerating every active set and sign pattern and
/// solving the stationarity equations; the valid candidate with the lowest
/// objective wins. Exponential in p, meant for p <= 8.
Vector sign_enumeration(const Matrix& x, const Vector& y, double lambda1, double lambda2, const Vector& w);
Vector sign_enumeration(const Matrix& x, const Vector& y, double lambda1, double lambda2);

/// Grid search over [lo, hi]^p with spacing `step`, then cyclic
/// golden-section refinement per coordinate. p <= 3. Optional per-coordinate
/// multipliers scale the l1 and squared-l2 terms.
Vector grid_search(const Matrix& x, const Vector& y, double lambda1, double lambda2, double lo, double hi,
                   double step, const Vector* l1_scale = nullptr, const Vector* l2_scale = nullptr);

/// Least squares via Householder QR.
Vector least_squares(const Matrix& x, const Vector& y);

/// (X'X + lambda2 I)^(-1) X'y through QR of the stacked system [X; sqrt(lambda2) I].
Vector ridge_qr(const Matrix& x, const Vector& y, double lambda2);

/// Correlated design: columns share a latent factor with loading `rho`.
Matrix correlated_design(std::mt19937_64& rng, Eigen::Index n, Eigen::Index p, double rho);

}  // namespace oracle
