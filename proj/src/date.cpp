#include "liqrec/date.hpp"

#include "liqrec/error.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>

namespace liqrec {

namespace {

bool parse_uint(std::string_view s, unsigned& out) {
    if (s.empty()) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && p == s.data() + s.size();
}

}  // namespace

std::optional<Date> Date::parse(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    unsigned y = 0, m = 0, d = 0;
    if (!parse_uint(text.substr(0, 4), y) || !parse_uint(text.substr(5, 2), m) ||
        !parse_uint(text.substr(8, 2), d))
        return std::nullopt;
    std::chrono::year_month_day ymd{std::chrono::year{static_cast<int>(y)}, std::chrono::month{m},
                                    std::chrono::day{d}};
    if (!ymd.ok()) return std::nullopt;
    return Date{std::chrono::sys_days{ymd}};
}

Date Date::parse_or_throw(std::string_view text) {
    auto d = parse(text);
    if (!d) throw DataError("invalid ISO-8601 date '" + std::string(text) + "'");
    return *d;
}

std::string Date::iso() const {
    std::chrono::year_month_day ymd{days_};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

int Date::year() const { return static_cast<int>(std::chrono::year_month_day{days_}.year()); }

unsigned Date::month() const {
    return static_cast<unsigned>(std::chrono::year_month_day{days_}.month());
}

bool Date::is_weekend() const {
    std::chrono::weekday wd{days_};
    return wd == std::chrono::Saturday || wd == std::chrono::Sunday;
}

Calendar::Calendar(std::vector<Date> days) : days_(std::move(days)) {
    for (std::size_t i = 1; i < days_.size(); ++i)
        if (!(days_[i - 1] < days_[i]))
            throw DataError("calendar dates must be strictly increasing (at " + days_[i].iso() + ")");
}

Calendar Calendar::weekdays(Date first, Date last, std::span<const Date> holidays) {
    std::vector<Date> hol(holidays.begin(), holidays.end());
    std::sort(hol.begin(), hol.end());
    std::vector<Date> out;
    for (Date d = first; d <= last; d = d.plus_days(1)) {
        if (d.is_weekend()) continue;
        if (std::binary_search(hol.begin(), hol.end(), d)) continue;
        out.push_back(d);
    }
    return Calendar{std::move(out)};
}

std::optional<std::size_t> Calendar::index_of(Date d) const {
    auto it = std::lower_bound(days_.begin(), days_.end(), d);
    if (it == days_.end() || *it != d) return std::nullopt;
    return static_cast<std::size_t>(it - days_.begin());
}

std::optional<std::size_t> Calendar::on_or_after(Date d) const {
    auto it = std::lower_bound(days_.begin(), days_.end(), d);
    if (it == days_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - days_.begin());
}

std::optional<std::size_t> Calendar::after(Date d) const {
    auto it = std::upper_bound(days_.begin(), days_.end(), d);
    if (it == days_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - days_.begin());
}

std::vector<Date> read_date_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open date list '" + path + "'");
    std::vector<Date> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        auto last = line.find_last_not_of(" \t");
        auto d = Date::parse(std::string_view(line).substr(first, last - first + 1));
        if (!d) throw DataError(path + ":" + std::to_string(lineno) + ": invalid date '" + line + "'");
        out.push_back(*d);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace liqrec
