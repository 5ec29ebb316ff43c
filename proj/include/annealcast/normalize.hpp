#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "annealcast/feature_matrix.hpp"

namespace annealcast {

// Per-column min/max, always fitted on training rows only so test data can
// never shape the transform.
struct NormalizationParams {
    std::vector<std::string> column_names;
    std::vector<double> min;
    std::vector<double> max;
};

// NaN entries are skipped while fitting. Throws DataError, naming the
// column, when a column has fewer than two finite training values.
NormalizationParams fit_minmax(const FeatureMatrix& X, const std::vector<std::size_t>& train_rows);

// value -> (value - min) / (max - min). A column whose training range is
// degenerate (max == min) maps to 0.5 everywhere. Values outside the
// training range are not clipped, so test rows may land outside [0, 1].
FeatureMatrix apply_minmax(const FeatureMatrix& X, const NormalizationParams& params);

} // namespace annealcast
