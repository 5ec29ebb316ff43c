#include "annealcast/report.hpp"

#include <cstdio>

#include "annealcast/error.hpp"

namespace annealcast {

TopGroupFlags top_group(const std::vector<Eigen::VectorXd>& per_model_losses, double alpha,
                        Direction direction) {
    if (per_model_losses.size() < 2) {
        throw DataError("top_group needs at least 2 models");
    }
    const std::size_t m = per_model_losses.size();
    std::vector<double> means(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (per_model_losses[i].size() == 0) throw DataError("empty per-sample loss vector");
        if (per_model_losses[i].size() != per_model_losses[0].size()) {
            throw DataError("per-sample loss vectors must share the test rows");
        }
        means[i] = per_model_losses[i].mean();
    }
    TopGroupFlags flags;
    flags.best_index = 0;
    for (std::size_t i = 1; i < m; ++i) {
        const bool improves = direction == Direction::minimize ? means[i] < means[flags.best_index]
                                                               : means[i] > means[flags.best_index];
        if (improves) flags.best_index = i;
    }
    flags.top_group.resize(m, false);
    flags.vs_best.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (i == flags.best_index) {
            flags.vs_best[i] = TTestResult{0.0, 1.0};
            flags.top_group[i] = true;
            continue;
        }
        flags.vs_best[i] =
            paired_t_test(per_model_losses[i], per_model_losses[flags.best_index]);
        flags.top_group[i] = flags.vs_best[i].p > alpha;
    }
    return flags;
}

namespace {

std::string format_metric(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return std::string(buf);
}

std::string cell_text(const EvalCell& cell) {
    if (!cell.present) return "-";
    std::string s = format_metric(cell.value);
    if (cell.best) s += '*';
    else if (cell.top_group) s += '!';
    return s;
}

std::string cell_flag(const EvalCell& cell) {
    if (!cell.present) return "";
    if (cell.best) return "*";
    if (cell.top_group) return "!";
    return "";
}

} // namespace

std::string render_table_text(const ComparisonTable& table) {
    const std::size_t rows = table.model_names.size();
    const std::size_t cols = table.dataset_names.size();

    std::size_t name_width = std::string("model").size();
    for (const std::string& name : table.model_names) name_width = std::max(name_width, name.size());

    std::vector<std::size_t> col_width(cols);
    for (std::size_t c = 0; c < cols; ++c) {
        col_width[c] = table.dataset_names[c].size();
        for (std::size_t r = 0; r < rows; ++r) {
            col_width[c] = std::max(col_width[c], cell_text(table.cells[r][c]).size());
        }
    }

    std::string out;
    if (!table.title.empty()) out += "# " + table.title + "\n";
    out += "model";
    out.append(name_width - 5, ' ');
    for (std::size_t c = 0; c < cols; ++c) {
        out += "  ";
        out.append(col_width[c] - table.dataset_names[c].size(), ' ');
        out += table.dataset_names[c];
    }
    out += '\n';
    for (std::size_t r = 0; r < rows; ++r) {
        out += table.model_names[r];
        out.append(name_width - table.model_names[r].size(), ' ');
        for (std::size_t c = 0; c < cols; ++c) {
            const std::string cell = cell_text(table.cells[r][c]);
            out += "  ";
            out.append(col_width[c] - cell.size(), ' ');
            out += cell;
        }
        out += '\n';
    }
    return out;
}

std::string render_table_csv(const ComparisonTable& table) {
    std::string out = "model";
    for (const std::string& ds : table.dataset_names) {
        out += "," + ds + "," + ds + "_flag";
    }
    out += '\n';
    for (std::size_t r = 0; r < table.model_names.size(); ++r) {
        out += table.model_names[r];
        for (std::size_t c = 0; c < table.dataset_names.size(); ++c) {
            const EvalCell& cell = table.cells[r][c];
            out += ',';
            if (cell.present) out += format_metric(cell.value);
            out += ',' + cell_flag(cell);
        }
        out += '\n';
    }
    return out;
}

} // namespace annealcast
