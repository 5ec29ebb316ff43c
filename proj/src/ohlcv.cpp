#include "annealcast/ohlcv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <sstream>

#include "annealcast/error.hpp"
#include "annealcast/numeric.hpp"

#define CPPHTTPLIB_THREAD_POOL_COUNT 4
#include <httplib.h>

namespace annealcast {

namespace {

std::string to_lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::optional<double> parse_number(const std::string& raw) {
    const std::string s = trim(raw);
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) return std::nullopt;
    return v;
}

bool parse_int_field(const std::string& s, int& out) {
    if (s.empty()) return false;
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) return false;
    out = v;
    return true;
}

bool plausible_date(const Date& d) {
    return d.year >= 1000 && d.year <= 9999 && d.month >= 1 && d.month <= 12 &&
           d.day >= 1 && d.day <= 31;
}

} // namespace

std::string Date::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
    return std::string(buf);
}

std::optional<Date> Date::parse(const std::string& text) {
    const std::string s = trim(text);
    Date d;
    const auto dash1 = s.find('-');
    const auto slash1 = s.find('/');
    if (dash1 != std::string::npos) {
        // ISO-8601: YYYY-MM-DD
        const auto dash2 = s.find('-', dash1 + 1);
        if (dash2 == std::string::npos) return std::nullopt;
        if (!parse_int_field(s.substr(0, dash1), d.year)) return std::nullopt;
        if (!parse_int_field(s.substr(dash1 + 1, dash2 - dash1 - 1), d.month)) return std::nullopt;
        if (!parse_int_field(s.substr(dash2 + 1), d.day)) return std::nullopt;
    } else if (slash1 != std::string::npos) {
        // M/D/YYYY
        const auto slash2 = s.find('/', slash1 + 1);
        if (slash2 == std::string::npos) return std::nullopt;
        if (!parse_int_field(s.substr(0, slash1), d.month)) return std::nullopt;
        if (!parse_int_field(s.substr(slash1 + 1, slash2 - slash1 - 1), d.day)) return std::nullopt;
        if (!parse_int_field(s.substr(slash2 + 1), d.year)) return std::nullopt;
    } else {
        return std::nullopt;
    }
    if (!plausible_date(d)) return std::nullopt;
    return d;
}

void OhlcvSeries::validate(std::size_t min_rows) const {
    if (bars.size() < min_rows) {
        throw DataError("series '" + symbol + "' has " + std::to_string(bars.size()) +
                        " rows, need at least " + std::to_string(min_rows));
    }
    for (std::size_t i = 0; i < bars.size(); ++i) {
        const OhlcvBar& b = bars[i];
        if (i > 0 && !(bars[i - 1].date < b.date)) {
            throw DataError("dates not strictly increasing at row " + std::to_string(i) +
                            " (" + b.date.to_string() + ")");
        }
        if (!(b.open > 0.0 && b.high > 0.0 && b.low > 0.0 && b.close > 0.0 && b.adj_close > 0.0)) {
            throw DataError("nonpositive price at " + b.date.to_string());
        }
        if (b.high < std::max(b.open, b.close) || b.low > std::min(b.open, b.close)) {
            throw DataError("high/low do not bracket open/close at " + b.date.to_string());
        }
        if (b.volume < 0.0) {
            throw DataError("negative volume at " + b.date.to_string());
        }
    }
}

std::vector<double> OhlcvSeries::closes() const {
    std::vector<double> out(bars.size());
    for (std::size_t i = 0; i < bars.size(); ++i) out[i] = bars[i].close;
    return out;
}

OhlcvSeries parse_ohlcv_csv(const std::string& text, const std::string& symbol) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("empty input, no header line");

    const std::vector<std::string> header = split_csv_line(line);
    int col_date = -1, col_open = -1, col_high = -1, col_low = -1;
    int col_close = -1, col_adj = -1, col_volume = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        const std::string name = to_lower(trim(header[i]));
        const int idx = static_cast<int>(i);
        if (name == "date") col_date = idx;
        else if (name == "open") col_open = idx;
        else if (name == "high") col_high = idx;
        else if (name == "low") col_low = idx;
        else if (name == "close") col_close = idx;
        else if (name == "adj close" || name == "adj_close" || name == "adjclose") col_adj = idx;
        else if (name == "volume") col_volume = idx;
    }
    const auto require = [&](int col, const char* name) {
        if (col < 0) throw SchemaError(std::string("missing required column '") + name + "'");
    };
    require(col_date, "Date");
    require(col_open, "Open");
    require(col_high, "High");
    require(col_low, "Low");
    require(col_close, "Close");
    require(col_adj, "Adj Close");
    require(col_volume, "Volume");
    const std::size_t max_col = static_cast<std::size_t>(
        std::max({col_date, col_open, col_high, col_low, col_close, col_adj, col_volume}));

    OhlcvSeries series;
    series.symbol = symbol;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() <= max_col) {
            ++series.dropped_rows;
            continue;
        }
        const auto date = Date::parse(fields[static_cast<std::size_t>(col_date)]);
        const auto open = parse_number(fields[static_cast<std::size_t>(col_open)]);
        const auto high = parse_number(fields[static_cast<std::size_t>(col_high)]);
        const auto low = parse_number(fields[static_cast<std::size_t>(col_low)]);
        const auto close = parse_number(fields[static_cast<std::size_t>(col_close)]);
        const auto adj = parse_number(fields[static_cast<std::size_t>(col_adj)]);
        const auto volume = parse_number(fields[static_cast<std::size_t>(col_volume)]);
        if (!date || !open || !high || !low || !close || !adj || !volume) {
            ++series.dropped_rows;
            continue;
        }
        series.bars.push_back(OhlcvBar{*date, *open, *high, *low, *close, *adj, *volume});
    }
    if (series.bars.empty()) throw DataError("no usable rows in input");

    std::stable_sort(series.bars.begin(), series.bars.end(),
                     [](const OhlcvBar& a, const OhlcvBar& b) { return a.date < b.date; });
    for (std::size_t i = 1; i < series.bars.size(); ++i) {
        if (series.bars[i - 1].date == series.bars[i].date) {
            throw DataError("duplicate date " + series.bars[i].date.to_string());
        }
    }
    return series;
}

std::string serialize_ohlcv_csv(const OhlcvSeries& series) {
    std::string out = "Date,Open,High,Low,Close,Adj Close,Volume\n";
    for (const OhlcvBar& b : series.bars) {
        out += b.date.to_string();
        out += ',';
        out += format_double(b.open);
        out += ',';
        out += format_double(b.high);
        out += ',';
        out += format_double(b.low);
        out += ',';
        out += format_double(b.close);
        out += ',';
        out += format_double(b.adj_close);
        out += ',';
        out += format_double(b.volume);
        out += '\n';
    }
    return out;
}

OhlcvSeries filter_date_range(const OhlcvSeries& series, const Date& start, const Date& end) {
    OhlcvSeries out;
    out.symbol = series.symbol;
    out.dropped_rows = series.dropped_rows;
    for (const OhlcvBar& b : series.bars) {
        if (start <= b.date && b.date <= end) out.bars.push_back(b);
    }
    return out;
}

OhlcvSeries fetch_ohlcv(const std::string& symbol, const Date& start, const Date& end,
                        const std::string& endpoint) {
    if (end < start) {
        throw ConfigError("fetch range is empty: start " + start.to_string() +
                          " is after end " + end.to_string());
    }
    const std::string prefix = "http://";
    if (endpoint.rfind(prefix, 0) != 0) {
        throw ConfigError("endpoint must be an http:// URL: " + endpoint);
    }
    const std::string rest = endpoint.substr(prefix.size());
    const auto slash = rest.find('/');
    const std::string host = slash == std::string::npos ? rest : rest.substr(0, slash);
    std::string path = slash == std::string::npos ? "/" : rest.substr(slash);
    path += (path.find('?') == std::string::npos ? '?' : '&');
    path += "symbol=" + symbol + "&start=" + start.to_string() + "&end=" + end.to_string();

    httplib::Client client(prefix + host);
    client.set_connection_timeout(10);
    client.set_read_timeout(30);
    auto res = client.Get(path);
    if (!res) {
        throw TransportError(0, "connection to " + endpoint + " failed");
    }
    if (res->status < 200 || res->status >= 300) {
        throw TransportError(res->status, "fetch from " + endpoint + " returned status " +
                                              std::to_string(res->status));
    }
    OhlcvSeries series = parse_ohlcv_csv(res->body, symbol);
    return filter_date_range(series, start, end);
}

} // namespace annealcast
