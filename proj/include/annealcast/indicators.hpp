#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "annealcast/ohlcv.hpp"

namespace annealcast {

enum class IndicatorClass { trend, momentum, volatility, volume };

std::string to_string(IndicatorClass cls);

struct IndicatorSpec {
    std::string name;
    IndicatorClass cls = IndicatorClass::trend;
    // period-free entries (obv, raw price/volume channels, log_return)
    // ignore the period argument of compute()
    bool takes_period = true;
    std::vector<std::string> sub_outputs;
};

// One output column aligned to the series rows. values[i] is NaN exactly for
// i < warmup; from warmup on, the recurrence is fully defined and finite for
// any series with positive prices.
struct IndicatorColumn {
    std::string name;
    std::vector<double> values;
    std::size_t warmup = 0;
};

// The default catalog: trend {sma, ema, wma, macd, adx, cci, aroon, trix},
// momentum {rsi, roc, stoch_k, stoch_d, williams_r, momentum}, volatility
// {atr, bollinger, rolling_std}, volume {obv, mfi, volume_roc, cmf,
// force_index, emv}, plus the period-free raw channels {close, open, high,
// low, volume, log_return}. Exact recurrences are documented in
// docs/indicators.md.
const std::vector<IndicatorSpec>& catalog();

// Computes every sub-output column of `spec` at `period`. Column names are
// "<name>_p<period>" for single-output indicators, "<name>_<sub>_p<period>"
// for multi-output ones, and plain "<name>" for period-free entries.
// Throws ConfigError when a periodic indicator is given period < 2,
// DataError when period >= series length.
std::vector<IndicatorColumn> compute(const OhlcvSeries& series, const IndicatorSpec& spec,
                                     std::size_t period);

// Structured text listing of the catalog (one entry per line: name, class,
// periodic flag, sub-outputs), for documentation and config validation.
std::string catalog_listing();

} // namespace annealcast
