#include "annealcast/indicators.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "annealcast/error.hpp"
#include "annealcast/numeric.hpp"

namespace annealcast {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
using Vec = std::vector<double>;

Vec nan_vec(std::size_t n) { return Vec(n, kNaN); }

// All kernels take a source vector that is NaN before index `w` and produce
// a vector that is NaN before the stated warmup.

// rolling mean over the last p entries, defined from w + p - 1
Vec rolling_mean(const Vec& x, std::size_t p, std::size_t w) {
    Vec out = nan_vec(x.size());
    if (w + p > x.size()) return out;
    double sum = 0.0;
    for (std::size_t t = w; t < x.size(); ++t) {
        sum += x[t];
        if (t >= w + p) sum -= x[t - p];
        if (t >= w + p - 1) out[t] = sum / static_cast<double>(p);
    }
    return out;
}

Vec rolling_sum(const Vec& x, std::size_t p, std::size_t w) {
    Vec out = nan_vec(x.size());
    if (w + p > x.size()) return out;
    double sum = 0.0;
    for (std::size_t t = w; t < x.size(); ++t) {
        sum += x[t];
        if (t >= w + p) sum -= x[t - p];
        if (t >= w + p - 1) out[t] = sum;
    }
    return out;
}

// population standard deviation over the last p entries, two-pass per window
Vec rolling_std_pop(const Vec& x, std::size_t p, std::size_t w) {
    Vec out = nan_vec(x.size());
    for (std::size_t t = w + p - 1; t < x.size(); ++t) {
        double mean = 0.0;
        for (std::size_t i = t + 1 - p; i <= t; ++i) mean += x[i];
        mean /= static_cast<double>(p);
        double ss = 0.0;
        for (std::size_t i = t + 1 - p; i <= t; ++i) ss += (x[i] - mean) * (x[i] - mean);
        out[t] = std::sqrt(ss / static_cast<double>(p));
    }
    return out;
}

template <typename Cmp>
Vec rolling_extreme(const Vec& x, std::size_t p, std::size_t w, Cmp better) {
    Vec out = nan_vec(x.size());
    std::deque<std::size_t> dq; // indices, values monotone under `better`
    for (std::size_t t = w; t < x.size(); ++t) {
        while (!dq.empty() && dq.front() + p <= t) dq.pop_front();
        while (!dq.empty() && better(x[t], x[dq.back()])) dq.pop_back();
        dq.push_back(t);
        if (t >= w + p - 1) out[t] = x[dq.front()];
    }
    return out;
}

Vec rolling_max(const Vec& x, std::size_t p, std::size_t w) {
    return rolling_extreme(x, p, w, [](double a, double b) { return a >= b; });
}

Vec rolling_min(const Vec& x, std::size_t p, std::size_t w) {
    return rolling_extreme(x, p, w, [](double a, double b) { return a <= b; });
}

// exponential moving average, smoothing 2/(p+1), seeded with x[w]
Vec ema_vec(const Vec& x, std::size_t p, std::size_t w) {
    Vec out = nan_vec(x.size());
    if (w >= x.size()) return out;
    const double alpha = 2.0 / (static_cast<double>(p) + 1.0);
    out[w] = x[w];
    for (std::size_t t = w + 1; t < x.size(); ++t) {
        out[t] = alpha * x[t] + (1.0 - alpha) * out[t - 1];
    }
    return out;
}

// Wilder smoothing: first value is the plain mean of x[w .. w+p-1], then
// s_t = (s_{t-1} * (p - 1) + x_t) / p. Defined from w + p - 1.
Vec wilder_vec(const Vec& x, std::size_t p, std::size_t w) {
    Vec out = nan_vec(x.size());
    if (w + p > x.size()) return out;
    double acc = 0.0;
    for (std::size_t i = w; i < w + p; ++i) acc += x[i];
    out[w + p - 1] = acc / static_cast<double>(p);
    for (std::size_t t = w + p; t < x.size(); ++t) {
        out[t] = (out[t - 1] * (static_cast<double>(p) - 1.0) + x[t]) / static_cast<double>(p);
    }
    return out;
}

struct Channels {
    Vec open, high, low, close, volume;
    std::size_t n = 0;
};

Channels channels_of(const OhlcvSeries& s) {
    Channels ch;
    ch.n = s.size();
    ch.open.resize(ch.n);
    ch.high.resize(ch.n);
    ch.low.resize(ch.n);
    ch.close.resize(ch.n);
    ch.volume.resize(ch.n);
    for (std::size_t i = 0; i < ch.n; ++i) {
        ch.open[i] = s.bars[i].open;
        ch.high[i] = s.bars[i].high;
        ch.low[i] = s.bars[i].low;
        ch.close[i] = s.bars[i].close;
        ch.volume[i] = s.bars[i].volume;
    }
    return ch;
}

Vec typical_price(const Channels& ch) {
    Vec tp(ch.n);
    for (std::size_t t = 0; t < ch.n; ++t) tp[t] = (ch.high[t] + ch.low[t] + ch.close[t]) / 3.0;
    return tp;
}

// true range, defined from t = 1
Vec true_range(const Channels& ch) {
    Vec tr = nan_vec(ch.n);
    for (std::size_t t = 1; t < ch.n; ++t) {
        tr[t] = std::max({ch.high[t] - ch.low[t], std::fabs(ch.high[t] - ch.close[t - 1]),
                          std::fabs(ch.low[t] - ch.close[t - 1])});
    }
    return tr;
}

std::size_t clamp_warmup(std::size_t w, std::size_t n) { return std::min(w, n); }

IndicatorColumn make_col(std::string name, Vec values, std::size_t warmup) {
    IndicatorColumn col;
    col.name = std::move(name);
    col.warmup = clamp_warmup(warmup, values.size());
    // canonicalize: NaN exactly below warmup
    for (std::size_t i = 0; i < col.warmup; ++i) values[i] = kNaN;
    col.values = std::move(values);
    return col;
}

std::string column_name(const IndicatorSpec& spec, const std::string& sub, std::size_t period) {
    std::string name = spec.name;
    if (spec.sub_outputs.size() > 1) name += "_" + sub;
    if (spec.takes_period) name += "_p" + std::to_string(period);
    return name;
}

// ---- per-indicator kernels ------------------------------------------------

std::vector<IndicatorColumn> compute_macd(const Channels& ch, const IndicatorSpec& spec,
                                          std::size_t p) {
    const std::size_t slow = 2 * p;
    const std::size_t signal_p =
        std::max<std::size_t>(2, static_cast<std::size_t>(round_half_up(0.75 * static_cast<double>(p))));
    const Vec fast = ema_vec(ch.close, p, 0);
    const Vec slow_ema = ema_vec(ch.close, slow, 0);
    Vec line(ch.n);
    for (std::size_t t = 0; t < ch.n; ++t) line[t] = fast[t] - slow_ema[t];
    const Vec signal = ema_vec(line, signal_p, 0);
    Vec hist(ch.n);
    for (std::size_t t = 0; t < ch.n; ++t) hist[t] = line[t] - signal[t];
    return {make_col(column_name(spec, "line", p), line, 0),
            make_col(column_name(spec, "signal", p), signal, 0),
            make_col(column_name(spec, "hist", p), hist, 0)};
}

std::vector<IndicatorColumn> compute_adx(const Channels& ch, const IndicatorSpec& spec,
                                         std::size_t p) {
    const Vec tr = true_range(ch);
    Vec plus_dm = nan_vec(ch.n), minus_dm = nan_vec(ch.n);
    for (std::size_t t = 1; t < ch.n; ++t) {
        const double up = ch.high[t] - ch.high[t - 1];
        const double down = ch.low[t - 1] - ch.low[t];
        plus_dm[t] = (up > down && up > 0.0) ? up : 0.0;
        minus_dm[t] = (down > up && down > 0.0) ? down : 0.0;
    }
    const Vec str = wilder_vec(tr, p, 1);
    const Vec spdm = wilder_vec(plus_dm, p, 1);
    const Vec smdm = wilder_vec(minus_dm, p, 1);
    Vec pdi = nan_vec(ch.n), mdi = nan_vec(ch.n), dx = nan_vec(ch.n);
    for (std::size_t t = p; t < ch.n; ++t) {
        pdi[t] = str[t] > 0.0 ? 100.0 * spdm[t] / str[t] : 0.0;
        mdi[t] = str[t] > 0.0 ? 100.0 * smdm[t] / str[t] : 0.0;
        const double denom = pdi[t] + mdi[t];
        dx[t] = denom > 0.0 ? 100.0 * std::fabs(pdi[t] - mdi[t]) / denom : 0.0;
    }
    const Vec adx = wilder_vec(dx, p, p);
    return {make_col(column_name(spec, "adx", p), adx, 2 * p - 1),
            make_col(column_name(spec, "plus_di", p), pdi, p),
            make_col(column_name(spec, "minus_di", p), mdi, p)};
}

IndicatorColumn compute_cci(const Channels& ch, const IndicatorSpec& spec, std::size_t p) {
    const Vec tp = typical_price(ch);
    const Vec sma_tp = rolling_mean(tp, p, 0);
    Vec out = nan_vec(ch.n);
    for (std::size_t t = p - 1; t < ch.n; ++t) {
        double md = 0.0;
        for (std::size_t i = t + 1 - p; i <= t; ++i) md += std::fabs(tp[i] - sma_tp[t]);
        md /= static_cast<double>(p);
        out[t] = md > 0.0 ? (tp[t] - sma_tp[t]) / (0.015 * md) : 0.0;
    }
    return make_col(column_name(spec, "cci", p), out, p - 1);
}

std::vector<IndicatorColumn> compute_aroon(const Channels& ch, const IndicatorSpec& spec,
                                           std::size_t p) {
    Vec up = nan_vec(ch.n), down = nan_vec(ch.n);
    for (std::size_t t = p; t < ch.n; ++t) {
        // distance back to the extreme over the last p+1 bars, most recent
        // occurrence wins ties
        std::size_t hi_d = 0, lo_d = 0;
        double hi = ch.high[t], lo = ch.low[t];
        for (std::size_t d = 1; d <= p; ++d) {
            if (ch.high[t - d] > hi) {
                hi = ch.high[t - d];
                hi_d = d;
            }
            if (ch.low[t - d] < lo) {
                lo = ch.low[t - d];
                lo_d = d;
            }
        }
        up[t] = 100.0 * static_cast<double>(p - hi_d) / static_cast<double>(p);
        down[t] = 100.0 * static_cast<double>(p - lo_d) / static_cast<double>(p);
    }
    return {make_col(column_name(spec, "up", p), up, p),
            make_col(column_name(spec, "down", p), down, p)};
}

IndicatorColumn compute_trix(const Channels& ch, const IndicatorSpec& spec, std::size_t p) {
    const Vec e3 = ema_vec(ema_vec(ema_vec(ch.close, p, 0), p, 0), p, 0);
    Vec out = nan_vec(ch.n);
    for (std::size_t t = 1; t < ch.n; ++t) out[t] = 100.0 * (e3[t] / e3[t - 1] - 1.0);
    return make_col(column_name(spec, "trix", p), out, 1);
}

IndicatorColumn compute_rsi(const Channels& ch, const IndicatorSpec& spec, std::size_t p) {
    Vec gain = nan_vec(ch.n), loss = nan_vec(ch.n);
    for (std::size_t t = 1; t < ch.n; ++t) {
        const double d = ch.close[t] - ch.close[t - 1];
        gain[t] = d > 0.0 ? d : 0.0;
        loss[t] = d < 0.0 ? -d : 0.0;
    }
    const Vec ag = wilder_vec(gain, p, 1);
    const Vec al = wilder_vec(loss, p, 1);
    Vec out = nan_vec(ch.n);
    for (std::size_t t = p; t < ch.n; ++t) {
        // zero average loss (flat or rising window) maps to 100
        out[t] = al[t] > 0.0 ? 100.0 - 100.0 / (1.0 + ag[t] / al[t]) : 100.0;
    }
    return make_col(column_name(spec, "rsi", p), out, p);
}

IndicatorColumn compute_stoch_k(const Channels& ch, const IndicatorSpec& spec, std::size_t p) {
    const Vec hh = rolling_max(ch.high, p, 0);
    const Vec ll = rolling_min(ch.low, p, 0);
    Vec out = nan_vec(ch.n);
    for (std::size_t t = p - 1; t < ch.n; ++t) {
        const double range = hh[t] - ll[t];
        out[t] = range > 0.0 ? 100.0 * (ch.close[t] - ll[t]) / range : 50.0;
    }
    return make_col(column_name(spec, "stoch_k", p), out, p - 1);
}

IndicatorColumn compute_williams_r(const Channels& ch, const IndicatorSpec& spec, std::size_t p) {
    const Vec hh = rolling_max(ch.high, p, 0);
    const Vec ll = rolling_min(ch.low, p, 0);
    Vec out = nan_vec(ch.n);
    for (std::size_t t = p - 1; t < ch.n; ++t) {
        const double range = hh[t] - ll[t];
        out[t] = range > 0.0 ? -100.0 * (hh[t] - ch.close[t]) / range : -50.0;
    }
    return make_col(column_name(spec, "williams_r", p), out, p - 1);
}

IndicatorColumn compute_mfi(const Channels& ch, const IndicatorSpec& spec, std::size_t p) {
    const Vec tp = typical_price(ch);
    Vec pos = nan_vec(ch.n), neg = nan_vec(ch.n);
    for (std::size_t t = 1; t < ch.n; ++t) {
        const double mf = tp[t] * ch.volume[t];
        pos[t] = tp[t] > tp[t - 1] ? mf : 0.0;
        neg[t] = tp[t] < tp[t - 1] ? mf : 0.0;
    }
    const Vec sp = rolling_sum(pos, p, 1);
    const Vec sn = rolling_sum(neg, p, 1);
    Vec out = nan_vec(ch.n);
    for (std::size_t t = p; t < ch.n; ++t) {
        const double denom = sp[t] + sn[t];
        out[t] = denom > 0.0 ? 100.0 * sp[t] / denom : 50.0;
    }
    return make_col(column_name(spec, "mfi", p), out, p);
}

IndicatorColumn compute_cmf(const Channels& ch, const IndicatorSpec& spec, std::size_t p) {
    Vec mfv(ch.n);
    for (std::size_t t = 0; t < ch.n; ++t) {
        const double range = ch.high[t] - ch.low[t];
        const double mult =
            range > 0.0 ? ((ch.close[t] - ch.low[t]) - (ch.high[t] - ch.close[t])) / range : 0.0;
        mfv[t] = mult * ch.volume[t];
    }
    const Vec smfv = rolling_sum(mfv, p, 0);
    const Vec svol = rolling_sum(ch.volume, p, 0);
    Vec out = nan_vec(ch.n);
    for (std::size_t t = p - 1; t < ch.n; ++t) {
        out[t] = svol[t] > 0.0 ? smfv[t] / svol[t] : 0.0;
    }
    return make_col(column_name(spec, "cmf", p), out, p - 1);
}

IndicatorColumn compute_force_index(const Channels& ch, const IndicatorSpec& spec, std::size_t p) {
    Vec fi1 = nan_vec(ch.n);
    for (std::size_t t = 1; t < ch.n; ++t) fi1[t] = (ch.close[t] - ch.close[t - 1]) * ch.volume[t];
    return make_col(column_name(spec, "force_index", p), ema_vec(fi1, p, 1), 1);
}

IndicatorColumn compute_emv(const Channels& ch, const IndicatorSpec& spec, std::size_t p) {
    Vec emv1 = nan_vec(ch.n);
    for (std::size_t t = 1; t < ch.n; ++t) {
        const double dist =
            (ch.high[t] + ch.low[t]) / 2.0 - (ch.high[t - 1] + ch.low[t - 1]) / 2.0;
        const double range = ch.high[t] - ch.low[t];
        const double box = range > 0.0 ? (ch.volume[t] / 1.0e8) / range : 0.0;
        emv1[t] = box > 0.0 ? dist / box : 0.0;
    }
    return make_col(column_name(spec, "emv", p), rolling_mean(emv1, p, 1), p);
}

IndicatorColumn compute_obv(const Channels& ch, const IndicatorSpec& spec) {
    Vec out(ch.n);
    out[0] = 0.0;
    for (std::size_t t = 1; t < ch.n; ++t) {
        double step = 0.0;
        if (ch.close[t] > ch.close[t - 1]) step = ch.volume[t];
        else if (ch.close[t] < ch.close[t - 1]) step = -ch.volume[t];
        out[t] = out[t - 1] + step;
    }
    return make_col(column_name(spec, "obv", 0), out, 0);
}

IndicatorColumn compute_log_return(const Channels& ch, const IndicatorSpec& spec) {
    Vec out = nan_vec(ch.n);
    for (std::size_t t = 1; t < ch.n; ++t) out[t] = std::log(ch.close[t] / ch.close[t - 1]);
    return make_col(column_name(spec, "log_return", 0), out, 1);
}

} // namespace

std::string to_string(IndicatorClass cls) {
    switch (cls) {
    case IndicatorClass::trend: return "trend";
    case IndicatorClass::momentum: return "momentum";
    case IndicatorClass::volatility: return "volatility";
    case IndicatorClass::volume: return "volume";
    }
    return "?";
}

const std::vector<IndicatorSpec>& catalog() {
    static const std::vector<IndicatorSpec> entries = {
        {"sma", IndicatorClass::trend, true, {"sma"}},
        {"ema", IndicatorClass::trend, true, {"ema"}},
        {"wma", IndicatorClass::trend, true, {"wma"}},
        {"macd", IndicatorClass::trend, true, {"line", "signal", "hist"}},
        {"adx", IndicatorClass::trend, true, {"adx", "plus_di", "minus_di"}},
        {"cci", IndicatorClass::trend, true, {"cci"}},
        {"aroon", IndicatorClass::trend, true, {"up", "down"}},
        {"trix", IndicatorClass::trend, true, {"trix"}},
        {"rsi", IndicatorClass::momentum, true, {"rsi"}},
        {"roc", IndicatorClass::momentum, true, {"roc"}},
        {"stoch_k", IndicatorClass::momentum, true, {"stoch_k"}},
        {"stoch_d", IndicatorClass::momentum, true, {"stoch_d"}},
        {"williams_r", IndicatorClass::momentum, true, {"williams_r"}},
        {"momentum", IndicatorClass::momentum, true, {"momentum"}},
        {"atr", IndicatorClass::volatility, true, {"atr"}},
        {"bollinger", IndicatorClass::volatility, true, {"upper", "middle", "lower"}},
        {"rolling_std", IndicatorClass::volatility, true, {"rolling_std"}},
        {"obv", IndicatorClass::volume, false, {"obv"}},
        {"mfi", IndicatorClass::volume, true, {"mfi"}},
        {"volume_roc", IndicatorClass::volume, true, {"volume_roc"}},
        {"cmf", IndicatorClass::volume, true, {"cmf"}},
        {"force_index", IndicatorClass::volume, true, {"force_index"}},
        {"emv", IndicatorClass::volume, true, {"emv"}},
        {"close", IndicatorClass::trend, false, {"close"}},
        {"open", IndicatorClass::trend, false, {"open"}},
        {"high", IndicatorClass::trend, false, {"high"}},
        {"low", IndicatorClass::trend, false, {"low"}},
        {"volume", IndicatorClass::volume, false, {"volume"}},
        {"log_return", IndicatorClass::momentum, false, {"log_return"}},
    };
    return entries;
}

std::vector<IndicatorColumn> compute(const OhlcvSeries& series, const IndicatorSpec& spec,
                                     std::size_t period) {
    const std::size_t n = series.size();
    if (spec.takes_period) {
        if (period < 2) {
            throw ConfigError("indicator '" + spec.name + "' needs period >= 2, got " +
                              std::to_string(period));
        }
        if (period >= n) {
            throw DataError("indicator '" + spec.name + "' period " + std::to_string(period) +
                            " >= series length " + std::to_string(n));
        }
    }
    if (n == 0) throw DataError("empty series");
    const Channels ch = channels_of(series);
    const std::size_t p = period;

    if (spec.name == "sma") {
        return {make_col(column_name(spec, "sma", p), rolling_mean(ch.close, p, 0), p - 1)};
    }
    if (spec.name == "ema") {
        return {make_col(column_name(spec, "ema", p), ema_vec(ch.close, p, 0), 0)};
    }
    if (spec.name == "wma") {
        Vec out = nan_vec(n);
        const double denom = static_cast<double>(p) * (static_cast<double>(p) + 1.0) / 2.0;
        for (std::size_t t = p - 1; t < n; ++t) {
            double acc = 0.0;
            for (std::size_t i = 0; i < p; ++i) {
                acc += static_cast<double>(p - i) * ch.close[t - i];
            }
            out[t] = acc / denom;
        }
        return {make_col(column_name(spec, "wma", p), out, p - 1)};
    }
    if (spec.name == "macd") return compute_macd(ch, spec, p);
    if (spec.name == "adx") return compute_adx(ch, spec, p);
    if (spec.name == "cci") return {compute_cci(ch, spec, p)};
    if (spec.name == "aroon") return compute_aroon(ch, spec, p);
    if (spec.name == "trix") return {compute_trix(ch, spec, p)};
    if (spec.name == "rsi") return {compute_rsi(ch, spec, p)};
    if (spec.name == "roc") {
        Vec out = nan_vec(n);
        for (std::size_t t = p; t < n; ++t) out[t] = 100.0 * (ch.close[t] / ch.close[t - p] - 1.0);
        return {make_col(column_name(spec, "roc", p), out, p)};
    }
    if (spec.name == "stoch_k") return {compute_stoch_k(ch, spec, p)};
    if (spec.name == "stoch_d") {
        IndicatorColumn k = compute_stoch_k(ch, {"stoch_k", spec.cls, true, {"stoch_k"}}, p);
        return {make_col(column_name(spec, "stoch_d", p), rolling_mean(k.values, 3, k.warmup),
                         k.warmup + 2)};
    }
    if (spec.name == "williams_r") return {compute_williams_r(ch, spec, p)};
    if (spec.name == "momentum") {
        Vec out = nan_vec(n);
        for (std::size_t t = p; t < n; ++t) out[t] = ch.close[t] - ch.close[t - p];
        return {make_col(column_name(spec, "momentum", p), out, p)};
    }
    if (spec.name == "atr") {
        return {make_col(column_name(spec, "atr", p), wilder_vec(true_range(ch), p, 1), p)};
    }
    if (spec.name == "bollinger") {
        const Vec mid = rolling_mean(ch.close, p, 0);
        const Vec sd = rolling_std_pop(ch.close, p, 0);
        Vec upper = nan_vec(n), lower = nan_vec(n);
        for (std::size_t t = p - 1; t < n; ++t) {
            upper[t] = mid[t] + 2.0 * sd[t];
            lower[t] = mid[t] - 2.0 * sd[t];
        }
        return {make_col(column_name(spec, "upper", p), upper, p - 1),
                make_col(column_name(spec, "middle", p), mid, p - 1),
                make_col(column_name(spec, "lower", p), lower, p - 1)};
    }
    if (spec.name == "rolling_std") {
        return {make_col(column_name(spec, "rolling_std", p), rolling_std_pop(ch.close, p, 0),
                         p - 1)};
    }
    if (spec.name == "obv") return {compute_obv(ch, spec)};
    if (spec.name == "mfi") return {compute_mfi(ch, spec, p)};
    if (spec.name == "volume_roc") {
        Vec out = nan_vec(n);
        for (std::size_t t = p; t < n; ++t) {
            out[t] = ch.volume[t - p] > 0.0 ? 100.0 * (ch.volume[t] / ch.volume[t - p] - 1.0) : 0.0;
        }
        return {make_col(column_name(spec, "volume_roc", p), out, p)};
    }
    if (spec.name == "cmf") return {compute_cmf(ch, spec, p)};
    if (spec.name == "force_index") return {compute_force_index(ch, spec, p)};
    if (spec.name == "emv") return {compute_emv(ch, spec, p)};
    if (spec.name == "close") return {make_col("close", ch.close, 0)};
    if (spec.name == "open") return {make_col("open", ch.open, 0)};
    if (spec.name == "high") return {make_col("high", ch.high, 0)};
    if (spec.name == "low") return {make_col("low", ch.low, 0)};
    if (spec.name == "volume") return {make_col("volume", ch.volume, 0)};
    if (spec.name == "log_return") return {compute_log_return(ch, spec)};

    throw ConfigError("unknown indicator '" + spec.name + "'");
}

std::string catalog_listing() {
    std::string out;
    for (const IndicatorSpec& spec : catalog()) {
        out += spec.name;
        out += '\t';
        out += to_string(spec.cls);
        out += '\t';
        out += spec.takes_period ? "periodic" : "period-free";
        out += '\t';
        for (std::size_t i = 0; i < spec.sub_outputs.size(); ++i) {
            if (i > 0) out += ',';
            out += spec.sub_outputs[i];
        }
        out += '\n';
    }
    return out;
}

} // namespace annealcast
