#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "annealcast/feature_matrix.hpp"
#include "annealcast/ohlcv.hpp"

namespace annealcast {

// r_i = ln(close[i+1] / close[i]); output index i is the return of bar i+1.
// Throws DataError on nonpositive prices or fewer than 2 closes.
std::vector<double> log_returns(const std::vector<double>& close);

// Trend of consecutive returns: +1 when return[i+1] > return[i], else -1
// (ties land on -1, the strict inequality decides). Output index i is the
// label of returns index i+1.
TargetVector trend_labels(const std::vector<double>& returns);

// Bijective {-1,+1} <-> {0,1} remap; idempotent per encoding. Throws
// DataError when a value is outside the current alphabet.
TargetVector relabel(const TargetVector& labels, LabelEncoding encoding);

// Expands the indicator catalog over `periods`, appends a lagged copy of
// every base column for every lag in `lags` (lag L at row t carries the base
// value from t-L), drops columns whose NaN fraction exceeds nan_drop_frac
// (recorded in dropped_columns), then trims the leading rows that still
// contain NaN so the result is fully finite. first_bar records the trim.
// Throws DataError when fewer than 50 finite rows remain.
FeatureMatrix build_pool(const OhlcvSeries& series, const std::vector<std::size_t>& periods,
                         const std::vector<std::size_t>& lags, double nan_drop_frac = 0.10);

// Pairs features at time t-h with the target at time t. X and y must be on
// the same time axis (equal length); the output keeps X rows [0, n-h) and
// y entries [h, n), so no output row sees a feature dated at or after its
// target. Throws DataError when h >= n.
std::pair<FeatureMatrix, TargetVector> align_horizon(const FeatureMatrix& X,
                                                     const TargetVector& y, int h = 3);

// CSV cache format: header row of column names, then one row per sample at
// full precision, so that a write/read round trip reproduces the matrix
// bit-identically.
void write_feature_matrix_csv(const FeatureMatrix& X, std::ostream& out);
std::string feature_matrix_to_csv(const FeatureMatrix& X);
FeatureMatrix read_feature_matrix_csv(std::istream& in);
FeatureMatrix feature_matrix_from_csv(const std::string& text);

} // namespace annealcast
