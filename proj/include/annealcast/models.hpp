#pragma once

#include <cstddef>

#include "annealcast/feature_matrix.hpp"
#include "annealcast/linear_model.hpp"

namespace annealcast {

// Baseline that always predicts the training-set mean target. For
// classification the stored mean is the train frequency of class 1, and the
// label prediction is the train-majority class (ties go to 1).
struct NullModel {
    double mean = 0.0;
};

NullModel null_fit(const Eigen::VectorXd& y_train);
Eigen::VectorXd null_predict(const NullModel& model, Eigen::Index n);

std::string serialize_null_model(const NullModel& model);
NullModel parse_null_model(const std::string& text);

// Ordinary least squares on named columns; minimum-norm solution via SVD
// when the system is underdetermined.
LinearModel least_squares_fit(const FeatureMatrix& X, const TargetVector& y);

struct LogRegConfig {
    double c = 1.0;         // inverse regularization strength
    bool l2_penalty = true; // false = no penalty term
    double tol = 1e-4;      // stop when the gradient infinity norm drops below
    std::size_t max_iter = 20000;
};

// Minimizes mean negative log-likelihood + ||beta||^2 / (2*c*n) (intercept
// unpenalized) by deterministic full-batch gradient descent with Armijo
// backtracking. Every sum over rows is exactly rounded, so permuting the
// training rows leaves the fit bit-identical.
// Throws DataError when y has a single class, DivergenceError when the
// gradient norm does not reach tol within max_iter steps.
LinearModel logreg_fit(const FeatureMatrix& X, const TargetVector& y, const LogRegConfig& cfg);

// sigmoid of the linear score
Eigen::VectorXd logreg_predict_proba(const LinearModel& model, const FeatureMatrix& X);

// probability >= threshold maps to 1 (ties inclusive), else 0
Eigen::VectorXd predict_label(const Eigen::VectorXd& proba, double threshold = 0.5);

// Objective and gradient of the logistic fit at (beta, intercept), exposed
// for the finite-difference checks.
double logreg_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y01,
                        const LogRegConfig& cfg, const Eigen::VectorXd& beta, double intercept,
                        Eigen::VectorXd* grad_beta = nullptr, double* grad_intercept = nullptr);

} // namespace annealcast
