#pragma once

#include "liqrec/date.hpp"
#include "liqrec/panel.hpp"

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace liqrec {

enum class SeriesFormat { fred_csv, plain_csv };

struct RawSeries {
    std::string name;
    std::vector<Date> dates;        // strictly increasing
    std::vector<double> values;     // NaN = missing
    std::string source;
};

// Header row mandatory; first column is the date, second the value. The
// series takes its name from the value header unless `name` is given.
RawSeries parse_series(const std::string& path, SeriesFormat format, const std::string& name = {});
RawSeries parse_series_text(std::string_view text, SeriesFormat format, const std::string& name = {},
                            const std::string& source = "<memory>");

// Places every series on the calendar restricted to the span where all of
// them have data. A calendar day without an observation takes the latest
// earlier value; more than max_gap consecutive filled days is an error.
MarketPanel align_and_fill(std::span<const RawSeries> series, const Calendar& calendar, int max_gap = 5);

// Percentile of sorted data by linear interpolation between order statistics
// (position p/100*(n-1)).
double percentile(std::span<const double> sorted, double pct);
std::pair<double, double> winsorize_bounds(std::span<const double> values, double lower_pct, double upper_pct);
std::vector<double> clip(std::span<const double> values, double lo, double hi);
std::vector<double> winsorize(std::span<const double> values, double lower_pct, double upper_pct);

// Adds (rate - tbill) * 100 as a bps column.
void add_spread_column(MarketPanel& panel, const std::string& rate, const std::string& tbill,
                       const std::string& out);

// Columns: date, protocol, chain, loss_usd, tvl_usd, gas_gwei, session,
// disclosure_date (optional). Dates are moved onto the trading calendar:
// after_hours to the next trading day, weekend and non-trading days to the
// first trading day on or after; a disclosure date replaces the occurrence.
EventCatalog parse_events(const std::string& path, const Calendar& calendar);
EventCatalog parse_events_text(std::string_view text, const Calendar& calendar);

void write_panel_csv(const MarketPanel& panel, const std::string& path);
std::string panel_to_csv(const MarketPanel& panel);
MarketPanel read_panel_csv(const std::string& path);
MarketPanel panel_from_csv(std::string_view text);

void write_events_csv(const EventCatalog& events, const std::string& path);
std::string events_to_csv(const EventCatalog& events);

// Shortest text that parses back to exactly the same double; NaN as "".
std::string format_double(double v);
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

// Splits one CSV record (double-quoted fields allowed, no embedded newlines).
std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace liqrec
