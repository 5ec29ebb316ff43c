#include "annealcast/normalize.hpp"

#include <cmath>
#include <limits>

#include "annealcast/error.hpp"

namespace annealcast {

NormalizationParams fit_minmax(const FeatureMatrix& X, const std::vector<std::size_t>& train_rows) {
    NormalizationParams params;
    params.column_names = X.column_names;
    params.min.resize(static_cast<std::size_t>(X.cols()));
    params.max.resize(static_cast<std::size_t>(X.cols()));
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        std::size_t finite = 0;
        for (std::size_t r : train_rows) {
            const double v = X.data(static_cast<Eigen::Index>(r), j);
            if (!std::isfinite(v)) continue;
            ++finite;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (finite < 2) {
            throw DataError("column '" + X.column_names[static_cast<std::size_t>(j)] +
                            "' has fewer than 2 finite training values");
        }
        params.min[static_cast<std::size_t>(j)] = lo;
        params.max[static_cast<std::size_t>(j)] = hi;
    }
    return params;
}

FeatureMatrix apply_minmax(const FeatureMatrix& X, const NormalizationParams& params) {
    if (params.column_names != X.column_names) {
        throw SchemaError("normalization params were fitted on different columns");
    }
    FeatureMatrix out = X;
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        const double lo = params.min[static_cast<std::size_t>(j)];
        const double hi = params.max[static_cast<std::size_t>(j)];
        if (hi == lo) {
            out.data.col(j).setConstant(0.5);
        } else {
            out.data.col(j) = (X.data.col(j).array() - lo) / (hi - lo);
        }
    }
    return out;
}

} // namespace annealcast
