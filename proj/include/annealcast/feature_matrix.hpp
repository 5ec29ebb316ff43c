#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace annealcast {

struct DroppedColumn {
    std::string name;
    std::string reason;
};

// Named n x p numeric matrix. `first_bar` records which series row the first
// matrix row corresponds to, so rows stay addressable in bar coordinates
// after warm-up rows have been trimmed.
struct FeatureMatrix {
    std::vector<std::string> column_names;
    Eigen::MatrixXd data;
    std::vector<DroppedColumn> dropped_columns;
    std::int64_t first_bar = 0;

    Eigen::Index rows() const { return data.rows(); }
    Eigen::Index cols() const { return data.cols(); }

    // index of a named column, -1 when absent
    Eigen::Index column_index(const std::string& name) const {
        for (std::size_t i = 0; i < column_names.size(); ++i) {
            if (column_names[i] == name) return static_cast<Eigen::Index>(i);
        }
        return -1;
    }

    FeatureMatrix select_rows(const std::vector<std::size_t>& rows) const {
        FeatureMatrix out;
        out.column_names = column_names;
        out.dropped_columns = dropped_columns;
        out.first_bar = first_bar;
        out.data.resize(static_cast<Eigen::Index>(rows.size()), data.cols());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            out.data.row(static_cast<Eigen::Index>(i)) = data.row(static_cast<Eigen::Index>(rows[i]));
        }
        return out;
    }

    // subset by name, preserving the given order
    FeatureMatrix select_columns(const std::vector<std::string>& names) const;
};

enum class TargetKind { log_return, trend };
enum class LabelEncoding { pm1, zero_one };

// Regression targets (log returns) or classification labels. Trend labels
// are stored in {-1,+1} canonically; `encoding` tracks the current alphabet.
struct TargetVector {
    TargetKind kind = TargetKind::log_return;
    Eigen::VectorXd values;
    int horizon = 3;
    LabelEncoding encoding = LabelEncoding::pm1;
    std::int64_t first_bar = 0;

    Eigen::Index size() const { return values.size(); }

    Eigen::VectorXd select(const std::vector<std::size_t>& rows) const {
        Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
        for (std::size_t i = 0; i < rows.size(); ++i) {
            out[static_cast<Eigen::Index>(i)] = values[static_cast<Eigen::Index>(rows[i])];
        }
        return out;
    }
};

} // namespace annealcast
