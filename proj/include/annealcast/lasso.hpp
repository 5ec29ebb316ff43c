#pragma once

#include <cstddef>
#include <optional>

#include "annealcast/feature_matrix.hpp"
#include "annealcast/linear_model.hpp"

namespace annealcast {

// L1-penalized least squares,
//   min_beta  1/2 sum_i (y_i - beta0 - x_i . beta)^2 + lambda * sum_j |beta_j|
// with an unpenalized intercept, solved by cyclic coordinate descent with
// soft-thresholding. Exactly one of lambda / target_support must be set;
// target_support bisects for the largest lambda whose support size reaches
// the target.
struct LassoConfig {
    std::optional<double> lambda;
    std::optional<std::size_t> target_support;
    double tol = 1e-10;          // max original-scale coefficient change per sweep
    std::size_t max_sweeps = 10000;
};

// sign(z) * max(|z| - gamma, 0)
double soft_threshold(double z, double gamma);

// Columns are standardized internally for the solve and the weights are
// mapped back, so the objective minimized is exactly the one above in the
// original coordinates. train_loss_trace holds the objective per sweep at
// the final lambda. When lambda_out is given it receives the penalty the
// model was solved at (the bisection result in target_support mode).
// Throws DivergenceError when a solve does not converge within max_sweeps.
LinearModel lasso_fit(const FeatureMatrix& X, const TargetVector& y, const LassoConfig& cfg,
                      double* lambda_out = nullptr);

// Smallest penalty at which every coefficient is zero:
// max_j |x_j . (y - mean(y))|.
double lasso_lambda_max(const FeatureMatrix& X, const TargetVector& y);

// Largest violation of the stationarity conditions at `model`:
// |x_j . r| <= lambda must hold for zero coordinates and x_j . r must equal
// lambda * sign(beta_j) for nonzero ones (r = residual). Used as the
// optimality certificate in tests.
double lasso_kkt_residual(const FeatureMatrix& X, const TargetVector& y,
                          const LinearModel& model, double lambda);

} // namespace annealcast
