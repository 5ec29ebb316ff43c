#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "annealcast/stats.hpp"

namespace annealcast {

enum class Direction { minimize, maximize };

// Flags for the "top-performing group" convention: the best model (extremal
// mean, ties to the lowest index) is starred, and every model whose paired
// t-test against the best yields p > alpha joins the group. The best model
// is always a member.
struct TopGroupFlags {
    std::size_t best_index = 0;
    std::vector<bool> top_group;
    std::vector<TTestResult> vs_best; // best vs itself reports t=0, p=1
};

TopGroupFlags top_group(const std::vector<Eigen::VectorXd>& per_model_losses, double alpha,
                        Direction direction);

// One model's evaluation on one dataset.
struct EvalCell {
    double value = 0.0;
    double t_vs_best = 0.0;
    double p_vs_best = 1.0;
    bool best = false;
    bool top_group = false;
    bool has_test = true; // false when no per-sample decomposition exists (AUC)
    bool present = true;  // false renders as an empty cell
};

// Rows are model variants, columns are datasets; mirrors the layout of the
// source tables (star suffix on the best cell per column, '!' on the other
// top-group members). Decimal separator is always '.'.
struct ComparisonTable {
    std::string title;       // e.g. "mse", "accuracy", "auc"
    std::vector<std::string> model_names;
    std::vector<std::string> dataset_names;
    std::vector<std::vector<EvalCell>> cells; // [model][dataset]
};

std::string render_table_text(const ComparisonTable& table);
std::string render_table_csv(const ComparisonTable& table);

} // namespace annealcast
