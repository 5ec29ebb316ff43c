#include "annealcast/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "annealcast/error.hpp"

namespace annealcast {

namespace {

void check_lengths(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const char* what) {
    if (a.size() != b.size()) {
        throw DataError(std::string(what) + ": length mismatch, " + std::to_string(a.size()) +
                        " vs " + std::to_string(b.size()));
    }
    if (a.size() == 0) throw DataError(std::string(what) + ": empty input");
}

void check_binary(const Eigen::VectorXd& y, const char* what) {
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (y[i] != 0.0 && y[i] != 1.0) {
            throw DataError(std::string(what) + ": labels must be {0,1}");
        }
    }
}

} // namespace

double mse(const Eigen::VectorXd& y, const Eigen::VectorXd& p) {
    check_lengths(y, p, "mse");
    return (y - p).squaredNorm() / static_cast<double>(y.size());
}

double bce(const Eigen::VectorXd& y01, const Eigen::VectorXd& p) {
    check_lengths(y01, p, "bce");
    check_binary(y01, "bce");
    constexpr double eps = 1e-12;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < y01.size(); ++i) {
        const double q = std::clamp(p[i], eps, 1.0 - eps);
        acc += y01[i] * std::log(q) + (1.0 - y01[i]) * std::log(1.0 - q);
    }
    return -acc / static_cast<double>(y01.size());
}

ConfusionMatrix confusion(const Eigen::VectorXd& y_true, const Eigen::VectorXd& y_pred) {
    check_lengths(y_true, y_pred, "confusion");
    check_binary(y_true, "confusion");
    check_binary(y_pred, "confusion");
    ConfusionMatrix cm;
    for (Eigen::Index i = 0; i < y_true.size(); ++i) {
        if (y_true[i] == 1.0) {
            y_pred[i] == 1.0 ? ++cm.tp : ++cm.fn;
        } else {
            y_pred[i] == 1.0 ? ++cm.fp : ++cm.tn;
        }
    }
    return cm;
}

double accuracy(const ConfusionMatrix& cm) {
    const std::size_t total = cm.total();
    if (total == 0) throw DataError("accuracy of an empty confusion matrix");
    return static_cast<double>(cm.tp + cm.tn) / static_cast<double>(total);
}

double recall(const ConfusionMatrix& cm) {
    const std::size_t denom = cm.tp + cm.fn;
    if (denom == 0) return 0.0;
    return static_cast<double>(cm.tp) / static_cast<double>(denom);
}

double roc_auc(const Eigen::VectorXd& y01, const Eigen::VectorXd& scores) {
    check_lengths(y01, scores, "roc_auc");
    check_binary(y01, "roc_auc");
    const Eigen::Index n = y01.size();
    std::size_t n_pos = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (y01[i] == 1.0) ++n_pos;
    }
    const std::size_t n_neg = static_cast<std::size_t>(n) - n_pos;
    if (n_pos == 0 || n_neg == 0) {
        throw DataError("roc_auc undefined: only one class present");
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index a, Eigen::Index b) { return scores[a] < scores[b]; });

    // midranks over tied score groups; positive rank sum gives the
    // Mann-Whitney statistic
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    const std::size_t un = static_cast<std::size_t>(n);
    while (i < un) {
        std::size_t j = i;
        while (j + 1 < un && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double midrank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
        for (std::size_t k = i; k <= j; ++k) {
            if (y01[order[k]] == 1.0) rank_sum_pos += midrank;
        }
        i = j + 1;
    }
    const double u = rank_sum_pos - 0.5 * static_cast<double>(n_pos) *
                                        (static_cast<double>(n_pos) + 1.0);
    return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

} // namespace annealcast
