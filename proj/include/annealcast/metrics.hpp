#pragma once

#include <cstddef>

#include <Eigen/Dense>

namespace annealcast {

struct ConfusionMatrix {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;

    std::size_t total() const { return tp + fp + tn + fn; }
};

// mean of (y_i - p_i)^2; throws DataError on length mismatch or empty input
double mse(const Eigen::VectorXd& y, const Eigen::VectorXd& p);

// mean binary cross-entropy with probabilities clipped to
// [1e-12, 1 - 1e-12] before the logs
double bce(const Eigen::VectorXd& y01, const Eigen::VectorXd& p);

// labels must be {0,1}
ConfusionMatrix confusion(const Eigen::VectorXd& y_true, const Eigen::VectorXd& y_pred);
double accuracy(const ConfusionMatrix& cm);
// tp + fn == 0 maps to 0
double recall(const ConfusionMatrix& cm);

// Mann-Whitney form of the area under the ROC curve:
// (concordant + 0.5 * tied) / (n_pos * n_neg), computed via midranks.
// Throws DataError when only one class is present.
double roc_auc(const Eigen::VectorXd& y01, const Eigen::VectorXd& scores);

} // namespace annealcast
