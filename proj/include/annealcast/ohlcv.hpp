#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace annealcast {

// Calendar day. Only ordering and formatting are needed, so no day
// arithmetic is provided.
struct Date {
    int year = 0;
    int month = 0;
    int day = 0;

    auto operator<=>(const Date&) const = default;

    std::string to_string() const; // ISO-8601, YYYY-MM-DD

    // Accepts ISO-8601 (2021-03-09) and M/D/YYYY (3/9/2021).
    static std::optional<Date> parse(const std::string& text);
};

struct OhlcvBar {
    Date date;
    double open = 0.0;
    double high = 0.0;
    double low = 0.0;
    double close = 0.0;
    double adj_close = 0.0;
    double volume = 0.0;

    bool operator==(const OhlcvBar&) const = default;
};

struct OhlcvSeries {
    std::string symbol;
    std::vector<OhlcvBar> bars;
    // rows discarded during parsing (non-numeric fields, bad dates)
    std::size_t dropped_rows = 0;

    std::size_t size() const { return bars.size(); }

    // Enforces the series invariants: strictly increasing dates, positive
    // prices, high/low bracketing open and close, and a minimum length.
    // Throws DataError on the first violation.
    void validate(std::size_t min_rows = 70) const;

    std::vector<double> closes() const;
};

// Parses the Yahoo-Finance CSV export layout. The header names the six
// required columns (Date, Open, High, Low, Close, Adj Close, Volume) in any
// order, matched case-insensitively; extra columns are ignored. Rows with a
// non-numeric price/volume field or an unparseable date are dropped and
// counted. Output rows are sorted ascending by date.
//
// Throws SchemaError if a required column is missing, DataError if no usable
// rows remain or if two rows share a date.
OhlcvSeries parse_ohlcv_csv(const std::string& text, const std::string& symbol = "");

// Inverse of parse_ohlcv_csv: emits the same header followed by one row per
// bar, dates in ISO form and numbers at full precision, so that
// parse(serialize(s)) == s exactly.
std::string serialize_ohlcv_csv(const OhlcvSeries& series);

// Keeps only bars with start <= date <= end.
OhlcvSeries filter_date_range(const OhlcvSeries& series, const Date& start, const Date& end);

// GET `endpoint`, parse the body as the CSV layout above and filter to
// [start, end]. Only plain http:// endpoints are supported; network use is
// optional and never exercised outside loopback fixtures in the tests.
// Throws ConfigError if start > end or the endpoint is not an http URL,
// TransportError on connection failure or a non-2xx status.
OhlcvSeries fetch_ohlcv(const std::string& symbol, const Date& start, const Date& end,
                        const std::string& endpoint);

} // namespace annealcast
