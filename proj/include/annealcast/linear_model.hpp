#pragma once

#include <string>
#include <vector>

#include "annealcast/feature_matrix.hpp"

namespace annealcast {

enum class LossKind { squared, logistic };

std::string to_string(LossKind loss);
LossKind loss_kind_from_string(const std::string& s);

// Sparse linear model shared by the FSA and Lasso selectors and the logistic
// forecaster: weights over named columns plus an unpenalized intercept.
struct LinearModel {
    LossKind loss = LossKind::squared;
    std::vector<std::string> feature_names; // every column the model was fit on
    Eigen::VectorXd beta;                   // aligned with feature_names
    double intercept = 0.0;
    std::vector<double> train_loss_trace;

    // names of the nonzero coefficients
    std::vector<std::string> support() const;
    std::size_t support_size() const;

    // intercept + sum_j beta_j * x_j, matching columns by name; only support
    // columns need to be present. Throws SchemaError on a missing column.
    Eigen::VectorXd decision(const FeatureMatrix& X) const;

    // squared loss: the decision value; logistic: sigmoid(decision)
    Eigen::VectorXd predict(const FeatureMatrix& X) const;
};

// Structured text round trip at full precision; predictions from a reloaded
// model are bit-identical.
std::string serialize_linear_model(const LinearModel& model);
LinearModel parse_linear_model(const std::string& text);
void save_linear_model(const LinearModel& model, const std::string& path);
LinearModel load_linear_model(const std::string& path);

} // namespace annealcast
