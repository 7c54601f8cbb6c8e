#include "liqrec/ingest.hpp"

#include "liqrec/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace liqrec {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::optional<double> parse_number(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

// Iterates non-empty lines with 1-based line numbers.
template <class F>
void for_each_line(std::string_view text, F&& f) {
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (line_no == 1 && line.size() >= 3 && line.substr(0, 3) == "\xEF\xBB\xBF") line.remove_prefix(3);
        if (trim(line).empty()) continue;
        f(line_no, trim(line));
    }
}

std::string where(const std::string& source, std::size_t line) {
    return source + ":" + std::to_string(line) + ": ";
}

Date next_trading_day(Date d, const Calendar& cal, bool strictly_after) {
    if (cal.empty()) {
        Date x = strictly_after ? d.plus_days(1) : d;
        while (x.is_weekend()) x = x.plus_days(1);
        return x;
    }
    const auto idx = strictly_after ? cal.after(d) : cal.on_or_after(d);
    if (!idx) throw DataError("event date " + d.iso() + " falls after the end of the trading calendar");
    return cal[*idx];
}

}  // namespace

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::string(trim(cur)));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (quoted) throw DataError("unterminated quote in CSV record");
    out.push_back(std::string(trim(cur)));
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path);
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw DataError("write failed for " + path);
}

std::string format_double(double v) {
    if (std::isnan(v)) return "";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw DataError("cannot format number");
    return std::string(buf, ptr);
}

RawSeries parse_series_text(std::string_view text, SeriesFormat format, const std::string& name,
                            const std::string& source) {
    RawSeries s;
    s.source = source;
    bool header = true;
    for_each_line(text, [&](std::size_t ln, std::string_view line) {
        const auto f = split_csv_line(line);
        if (header) {
            header = false;
            if (f.size() < 2) throw DataError(where(source, ln) + "header needs a date and a value column");
            s.name = name.empty() ? f[1] : name;
            return;
        }
        if (f.size() < 2) throw DataError(where(source, ln) + "expected date,value");
        const auto d = Date::parse(f[0]);
        if (!d) throw DataError(where(source, ln) + "unparseable date '" + f[0] + "'");
        double v = kNaN;
        if (format == SeriesFormat::fred_csv && f[1] == ".") {
            v = kNaN;
        } else if (f[1].empty()) {
            v = kNaN;
        } else if (auto x = parse_number(f[1])) {
            v = *x;
        } else {
            throw DataError(where(source, ln) + "unparseable value '" + f[1] + "'");
        }
        if (!s.dates.empty() && *d <= s.dates.back()) {
            if (std::find(s.dates.begin(), s.dates.end(), *d) != s.dates.end())
                throw DataError(where(source, ln) + "duplicate date " + d->iso());
            throw DataError(where(source, ln) + "dates out of order at " + d->iso());
        }
        s.dates.push_back(*d);
        s.values.push_back(v);
    });
    if (header) throw DataError(source + ": missing header row");
    return s;
}

RawSeries parse_series(const std::string& path, SeriesFormat format, const std::string& name) {
    return parse_series_text(read_file(path), format, name, path);
}

MarketPanel align_and_fill(std::span<const RawSeries> series, const Calendar& calendar, int max_gap) {
    if (series.empty()) throw DataError("align_and_fill: no series");
    if (max_gap < 0) throw DomainError("align_and_fill: max_gap must be >= 0");
    Date lo = Date::parse_or_throw("0001-01-01"), hi = Date::parse_or_throw("9999-12-31");
    for (const auto& s : series) {
        std::optional<Date> first, last;
        for (std::size_t i = 0; i < s.dates.size(); ++i)
            if (!std::isnan(s.values[i])) {
                if (!first) first = s.dates[i];
                last = s.dates[i];
            }
        if (!first) throw DataError("align_and_fill: series '" + s.name + "' has no values");
        lo = std::max(lo, *first);
        hi = std::min(hi, *last);
    }
    std::vector<Date> days;
    for (const auto& d : calendar)
        if (d >= lo && d <= hi) days.push_back(d);
    if (days.empty()) throw DataError("align_and_fill: series do not overlap on the calendar");

    MarketPanel panel(days);
    for (const auto& s : series) {
        std::vector<double> col(days.size(), kNaN);
        std::size_t j = 0;
        double carry = kNaN;
        int run = 0;
        for (std::size_t t = 0; t < days.size(); ++t) {
            bool observed = false;
            while (j < s.dates.size() && s.dates[j] <= days[t]) {
                if (!std::isnan(s.values[j])) {
                    carry = s.values[j];
                    observed = s.dates[j] == days[t];
                } else if (s.dates[j] == days[t]) {
                    observed = false;
                }
                ++j;
            }
            if (observed) {
                run = 0;
            } else if (++run > max_gap) {
                throw DataError("align_and_fill: series '" + s.name + "' has a gap longer than " +
                                std::to_string(max_gap) + " trading days ending " + days[t].iso());
            }
            col[t] = carry;
        }
        panel.set_column(s.name, std::move(col));
    }
    return panel;
}

double percentile(std::span<const double> sorted, double pct) {
    if (sorted.empty()) throw DomainError("percentile of empty data");
    const double pos = pct / 100.0 * static_cast<double>(sorted.size() - 1);
    const auto i = static_cast<std::size_t>(std::floor(pos));
    if (i + 1 >= sorted.size()) return sorted.back();
    const double frac = pos - static_cast<double>(i);
    return sorted[i] + frac * (sorted[i + 1] - sorted[i]);
}

std::pair<double, double> winsorize_bounds(std::span<const double> values, double lower_pct, double upper_pct) {
    if (values.empty()) throw DomainError("winsorize: empty input");
    if (!(lower_pct >= 0.0 && lower_pct < upper_pct && upper_pct <= 100.0))
        throw DomainError("winsorize: need 0 <= lower < upper <= 100");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    return {percentile(sorted, lower_pct), percentile(sorted, upper_pct)};
}

std::vector<double> clip(std::span<const double> values, double lo, double hi) {
    std::vector<double> out(values.begin(), values.end());
    for (double& v : out) v = std::clamp(v, lo, hi);
    return out;
}

std::vector<double> winsorize(std::span<const double> values, double lower_pct, double upper_pct) {
    const auto [lo, hi] = winsorize_bounds(values, lower_pct, upper_pct);
    return clip(values, lo, hi);
}

void add_spread_column(MarketPanel& panel, const std::string& rate, const std::string& tbill,
                       const std::string& out) {
    const auto& r = panel.column(rate);
    const auto& b = panel.column(tbill);
    std::vector<double> s(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) s[i] = (r[i] - b[i]) * 100.0;
    panel.set_column(out, std::move(s));
}

EventCatalog parse_events_text(std::string_view text, const Calendar& calendar) {
    EventCatalog cat;
    std::vector<std::string> head;
    auto col = [&](const std::string& name) -> int {
        auto it = std::find(head.begin(), head.end(), name);
        return it == head.end() ? -1 : static_cast<int>(it - head.begin());
    };
    int c_date = -1, c_prot = -1, c_chain = -1, c_loss = -1, c_tvl = -1, c_gas = -1, c_sess = -1, c_disc = -1;
    for_each_line(text, [&](std::size_t ln, std::string_view line) {
        const auto f = split_csv_line(line);
        const std::string src = "events";
        if (head.empty()) {
            head = f;
            c_date = col("date");
            c_prot = col("protocol");
            c_chain = col("chain");
            c_loss = col("loss_usd");
            c_tvl = col("tvl_usd");
            c_gas = col("gas_gwei");
            c_sess = col("session");
            c_disc = col("disclosure_date");
            for (auto [c, n] : {std::pair{c_date, "date"}, {c_prot, "protocol"}, {c_loss, "loss_usd"},
                                {c_tvl, "tvl_usd"}, {c_gas, "gas_gwei"}})
                if (c < 0) throw DataError(where(src, ln) + "missing column '" + n + "'");
            return;
        }
        if (f.size() != head.size())
            throw DataError(where(src, ln) + "expected " + std::to_string(head.size()) + " fields, got " +
                            std::to_string(f.size()));
        auto num = [&](int c, const char* what) {
            const auto v = parse_number(f[static_cast<std::size_t>(c)]);
            if (!v) throw DataError(where(src, ln) + "malformed " + what + " '" + f[static_cast<std::size_t>(c)] + "'");
            return *v;
        };
        ExploitEvent e;
        const auto d = Date::parse(f[static_cast<std::size_t>(c_date)]);
        if (!d) throw DataError(where(src, ln) + "malformed date '" + f[static_cast<std::size_t>(c_date)] + "'");
        e.occurred = *d;
        e.protocol = f[static_cast<std::size_t>(c_prot)];
        e.chain = c_chain >= 0 ? f[static_cast<std::size_t>(c_chain)] : std::string{};
        e.loss_usd = num(c_loss, "loss_usd");
        e.tvl_usd = num(c_tvl, "tvl_usd");
        e.gas_gwei = num(c_gas, "gas_gwei");
        if (c_sess >= 0) {
            const auto s = parse_session(f[static_cast<std::size_t>(c_sess)]);
            if (!s) throw DataError(where(src, ln) + "unknown session '" + f[static_cast<std::size_t>(c_sess)] + "'");
            e.session = *s;
        }
        if (c_disc >= 0 && !f[static_cast<std::size_t>(c_disc)].empty()) {
            const auto dd = Date::parse(f[static_cast<std::size_t>(c_disc)]);
            if (!dd) throw DataError(where(src, ln) + "malformed disclosure_date");
            e.disclosure_date = *dd;
        }
        if (e.loss_usd <= 0.0) throw DataError(where(src, ln) + "loss_usd must be positive");
        if (e.tvl_usd <= 0.0) throw DataError(where(src, ln) + "tvl_usd must be positive");
        if (e.loss_usd > e.tvl_usd) throw DataError(where(src, ln) + "loss_usd exceeds tvl_usd for " + e.protocol);
        if (e.disclosure_date) e.date = next_trading_day(*e.disclosure_date, calendar, false);
        else e.date = next_trading_day(e.occurred, calendar, e.session == Session::after_hours);
        cat.events.push_back(std::move(e));
    });
    if (head.empty()) throw DataError("events: missing header row");
    std::stable_sort(cat.events.begin(), cat.events.end(),
                     [](const ExploitEvent& a, const ExploitEvent& b) { return a.date < b.date; });
    cat.validate();
    return cat;
}

EventCatalog parse_events(const std::string& path, const Calendar& calendar) {
    try {
        return parse_events_text(read_file(path), calendar);
    } catch (const DataError& e) {
        throw DataError(path + ": " + e.what());
    }
}

namespace {

std::string quote(const std::string& s) {
    if (s.find_first_of(",\"") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

}  // namespace

std::string panel_to_csv(const MarketPanel& panel) {
    std::string out = "date";
    for (const auto& n : panel.column_names()) out += "," + quote(n);
    out += "\n";
    for (std::size_t i = 0; i < panel.rows(); ++i) {
        out += panel.dates()[i].iso();
        for (const auto& n : panel.column_names()) out += "," + format_double(panel.column(n)[i]);
        out += "\n";
    }
    return out;
}

void write_panel_csv(const MarketPanel& panel, const std::string& path) { write_file(path, panel_to_csv(panel)); }

MarketPanel panel_from_csv(std::string_view text) {
    std::vector<std::string> head;
    std::vector<Date> dates;
    std::vector<std::vector<double>> cols;
    for_each_line(text, [&](std::size_t ln, std::string_view line) {
        auto f = split_csv_line(line);
        if (head.empty()) {
            if (f.empty() || f[0] != "date") throw DataError(where("panel", ln) + "first column must be 'date'");
            head = std::move(f);
            cols.resize(head.size() - 1);
            return;
        }
        if (f.size() != head.size()) throw DataError(where("panel", ln) + "wrong field count");
        const auto d = Date::parse(f[0]);
        if (!d) throw DataError(where("panel", ln) + "unparseable date '" + f[0] + "'");
        if (!dates.empty() && *d <= dates.back()) throw DataError(where("panel", ln) + "dates not increasing at " + d->iso());
        dates.push_back(*d);
        for (std::size_t c = 1; c < f.size(); ++c) {
            if (f[c].empty()) {
                cols[c - 1].push_back(kNaN);
                continue;
            }
            const auto v = parse_number(f[c]);
            if (!v) throw DataError(where("panel", ln) + "unparseable value '" + f[c] + "'");
            cols[c - 1].push_back(*v);
        }
    });
    if (head.empty()) throw DataError("panel: missing header row");
    MarketPanel p(std::move(dates));
    for (std::size_t c = 1; c < head.size(); ++c) p.set_column(head[c], std::move(cols[c - 1]));
    return p;
}

MarketPanel read_panel_csv(const std::string& path) {
    try {
        return panel_from_csv(read_file(path));
    } catch (const DataError& e) {
        throw DataError(path + ": " + e.what());
    }
}

std::string events_to_csv(const EventCatalog& events) {
    std::string out = "date,protocol,chain,loss_usd,tvl_usd,gas_gwei,session,disclosure_date\n";
    for (const auto& e : events.events) {
        out += e.occurred.iso() + "," + quote(e.protocol) + "," + quote(e.chain) + "," + format_double(e.loss_usd) +
               "," + format_double(e.tvl_usd) + "," + format_double(e.gas_gwei) + "," + to_string(e.session) + "," +
               (e.disclosure_date ? e.disclosure_date->iso() : std::string{}) + "\n";
    }
    return out;
}

void write_events_csv(const EventCatalog& events, const std::string& path) {
    write_file(path, events_to_csv(events));
}

}  // namespace liqrec
