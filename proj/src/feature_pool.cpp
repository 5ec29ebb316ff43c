#include "annealcast/feature_pool.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "annealcast/error.hpp"
#include "annealcast/indicators.hpp"
#include "annealcast/numeric.hpp"

namespace annealcast {

FeatureMatrix FeatureMatrix::select_columns(const std::vector<std::string>& names) const {
    FeatureMatrix out;
    out.column_names = names;
    out.first_bar = first_bar;
    out.data.resize(rows(), static_cast<Eigen::Index>(names.size()));
    for (std::size_t j = 0; j < names.size(); ++j) {
        const Eigen::Index src = column_index(names[j]);
        if (src < 0) throw SchemaError("column '" + names[j] + "' missing from matrix");
        out.data.col(static_cast<Eigen::Index>(j)) = data.col(src);
    }
    return out;
}

std::vector<double> log_returns(const std::vector<double>& close) {
    if (close.size() < 2) throw DataError("need at least 2 closes for log returns");
    std::vector<double> out(close.size() - 1);
    for (std::size_t i = 0; i + 1 < close.size(); ++i) {
        if (!(close[i] > 0.0) || !(close[i + 1] > 0.0)) {
            throw DataError("nonpositive price at row " + std::to_string(i));
        }
        out[i] = std::log(close[i + 1] / close[i]);
    }
    return out;
}

TargetVector trend_labels(const std::vector<double>& returns) {
    if (returns.size() < 2) throw DataError("need at least 2 returns for trend labels");
    TargetVector out;
    out.kind = TargetKind::trend;
    out.encoding = LabelEncoding::pm1;
    out.values.resize(static_cast<Eigen::Index>(returns.size() - 1));
    for (std::size_t i = 0; i + 1 < returns.size(); ++i) {
        out.values[static_cast<Eigen::Index>(i)] = returns[i + 1] > returns[i] ? 1.0 : -1.0;
    }
    return out;
}

TargetVector relabel(const TargetVector& labels, LabelEncoding encoding) {
    if (labels.kind != TargetKind::trend) {
        throw DataError("relabel applies to trend labels only");
    }
    TargetVector out = labels;
    if (labels.encoding == encoding) {
        // idempotent, but still validate the alphabet
        for (Eigen::Index i = 0; i < labels.values.size(); ++i) {
            const double v = labels.values[i];
            const bool ok = encoding == LabelEncoding::pm1 ? (v == -1.0 || v == 1.0)
                                                           : (v == 0.0 || v == 1.0);
            if (!ok) {
                throw DataError("label " + format_double(v) + " outside encoding alphabet");
            }
        }
        return out;
    }
    for (Eigen::Index i = 0; i < labels.values.size(); ++i) {
        const double v = labels.values[i];
        if (encoding == LabelEncoding::zero_one) {
            if (v == -1.0) out.values[i] = 0.0;
            else if (v == 1.0) out.values[i] = 1.0;
            else throw DataError("label " + format_double(v) + " outside {-1,+1}");
        } else {
            if (v == 0.0) out.values[i] = -1.0;
            else if (v == 1.0) out.values[i] = 1.0;
            else throw DataError("label " + format_double(v) + " outside {0,1}");
        }
    }
    out.encoding = encoding;
    return out;
}

FeatureMatrix build_pool(const OhlcvSeries& series, const std::vector<std::size_t>& periods,
                         const std::vector<std::size_t>& lags, double nan_drop_frac) {
    if (periods.empty()) throw ConfigError("periods must be nonempty");
    if (!std::is_sorted(periods.begin(), periods.end()) ||
        std::adjacent_find(periods.begin(), periods.end()) != periods.end()) {
        throw ConfigError("periods must be strictly ascending");
    }
    for (std::size_t lag : lags) {
        if (lag < 1 || lag > 10) {
            throw ConfigError("lags must lie in 1..10, got " + std::to_string(lag));
        }
    }
    series.validate(70);
    const std::size_t n = series.size();

    // base columns in catalog order, periods ascending, then per-column lags
    std::vector<IndicatorColumn> cols;
    for (const IndicatorSpec& spec : catalog()) {
        if (spec.takes_period) {
            for (std::size_t p : periods) {
                for (IndicatorColumn& c : compute(series, spec, p)) cols.push_back(std::move(c));
            }
        } else {
            for (IndicatorColumn& c : compute(series, spec, 0)) cols.push_back(std::move(c));
        }
    }

    std::vector<IndicatorColumn> expanded;
    expanded.reserve(cols.size() * (1 + lags.size()));
    for (const IndicatorColumn& base : cols) {
        expanded.push_back(base);
        for (std::size_t lag : lags) {
            IndicatorColumn shifted;
            shifted.name = base.name + "_lag" + std::to_string(lag);
            shifted.warmup = std::min(base.warmup + lag, n);
            shifted.values.assign(n, std::numeric_limits<double>::quiet_NaN());
            for (std::size_t t = lag; t < n; ++t) shifted.values[t] = base.values[t - lag];
            expanded.push_back(std::move(shifted));
        }
    }

    FeatureMatrix out;
    std::vector<const IndicatorColumn*> kept;
    for (const IndicatorColumn& col : expanded) {
        std::size_t nan_count = 0;
        for (double v : col.values) {
            if (std::isnan(v)) ++nan_count;
        }
        const double frac = static_cast<double>(nan_count) / static_cast<double>(n);
        if (frac > nan_drop_frac) {
            out.dropped_columns.push_back(
                {col.name, "nan fraction " + std::to_string(frac) + " exceeds " +
                               std::to_string(nan_drop_frac)});
        } else {
            kept.push_back(&col);
        }
    }
    if (kept.empty()) throw DataError("every pool column exceeded the NaN threshold");

    std::size_t trim = 0;
    for (const IndicatorColumn* col : kept) trim = std::max(trim, col->warmup);
    if (n - trim < 50) {
        throw DataError("pool has only " + std::to_string(n - trim) +
                        " finite rows after warm-up, need at least 50");
    }

    out.first_bar = static_cast<std::int64_t>(trim);
    out.column_names.reserve(kept.size());
    out.data.resize(static_cast<Eigen::Index>(n - trim), static_cast<Eigen::Index>(kept.size()));
    for (std::size_t j = 0; j < kept.size(); ++j) {
        out.column_names.push_back(kept[j]->name);
        for (std::size_t t = trim; t < n; ++t) {
            out.data(static_cast<Eigen::Index>(t - trim), static_cast<Eigen::Index>(j)) =
                kept[j]->values[t];
        }
    }
    if (!out.data.allFinite()) {
        throw DataError("pool still contains non-finite values after warm-up trim");
    }
    return out;
}

std::pair<FeatureMatrix, TargetVector> align_horizon(const FeatureMatrix& X,
                                                     const TargetVector& y, int h) {
    if (h < 1) throw ConfigError("horizon must be >= 1, got " + std::to_string(h));
    if (X.rows() != y.size()) {
        throw SchemaError("align_horizon needs matching lengths, got " +
                          std::to_string(X.rows()) + " features and " + std::to_string(y.size()) +
                          " targets");
    }
    const Eigen::Index n = X.rows();
    if (static_cast<Eigen::Index>(h) >= n) {
        throw DataError("horizon " + std::to_string(h) + " >= row count " + std::to_string(n));
    }
    FeatureMatrix Xa;
    Xa.column_names = X.column_names;
    Xa.dropped_columns = X.dropped_columns;
    Xa.first_bar = X.first_bar;
    Xa.data = X.data.topRows(n - h);

    TargetVector ya = y;
    ya.values = y.values.tail(n - h);
    ya.horizon = h;
    ya.first_bar = y.first_bar + h;
    return {std::move(Xa), std::move(ya)};
}

void write_feature_matrix_csv(const FeatureMatrix& X, std::ostream& out) {
    for (std::size_t j = 0; j < X.column_names.size(); ++j) {
        if (j > 0) out << ',';
        out << X.column_names[j];
    }
    out << '\n';
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        for (Eigen::Index j = 0; j < X.cols(); ++j) {
            if (j > 0) out << ',';
            out << format_double(X.data(i, j));
        }
        out << '\n';
    }
}

std::string feature_matrix_to_csv(const FeatureMatrix& X) {
    std::ostringstream out;
    write_feature_matrix_csv(X, out);
    return out.str();
}

FeatureMatrix read_feature_matrix_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("feature CSV is empty");
    FeatureMatrix X;
    {
        std::string cur;
        for (char c : line) {
            if (c == ',') {
                X.column_names.push_back(cur);
                cur.clear();
            } else if (c != '\r') {
                cur += c;
            }
        }
        X.column_names.push_back(cur);
    }
    const std::size_t p = X.column_names.size();
    std::vector<double> values;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        std::size_t start = 0;
        std::size_t col = 0;
        for (std::size_t i = 0; i <= line.size(); ++i) {
            if (i == line.size() || line[i] == ',') {
                std::size_t end = i;
                if (end > start && line[end - 1] == '\r') --end;
                double v = 0.0;
                const char* first = line.data() + start;
                const char* last = line.data() + end;
                auto [ptr, ec] = std::from_chars(first, last, v);
                if (ec != std::errc() || ptr != last) {
                    throw SchemaError("bad numeric cell in feature CSV at row " +
                                      std::to_string(rows) + ", column " + std::to_string(col));
                }
                values.push_back(v);
                ++col;
                start = i + 1;
            }
        }
        if (col != p) {
            throw SchemaError("feature CSV row " + std::to_string(rows) + " has " +
                              std::to_string(col) + " cells, header has " + std::to_string(p));
        }
        ++rows;
    }
    X.data.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(p));
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
            X.data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[i * p + j];
        }
    }
    return X;
}

FeatureMatrix feature_matrix_from_csv(const std::string& text) {
    std::istringstream in(text);
    return read_feature_matrix_csv(in);
}

} // namespace annealcast
