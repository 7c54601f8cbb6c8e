#pragma once

#include <chrono>
#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace liqrec {

// Calendar day. Thin wrapper over sys_days so it can be stored, hashed and
// ordered cheaply.
class Date {
public:
    constexpr Date() = default;
    constexpr explicit Date(std::chrono::sys_days d) : days_(d) {}
    constexpr Date(int y, unsigned m, unsigned d)
        : days_(std::chrono::year_month_day{std::chrono::year{y}, std::chrono::month{m},
                                            std::chrono::day{d}}) {}

    // Strict YYYY-MM-DD; returns nullopt on anything else.
    static std::optional<Date> parse(std::string_view text);
    // Throws DataError naming the offending text.
    static Date parse_or_throw(std::string_view text);

    std::string iso() const;
    constexpr std::chrono::sys_days sys() const { return days_; }
    constexpr long serial() const { return days_.time_since_epoch().count(); }

    int year() const;
    unsigned month() const;
    // Month key as year*12 + (month-1); consecutive months differ by one.
    int month_index() const { return year() * 12 + static_cast<int>(month()) - 1; }
    bool is_weekend() const;

    constexpr Date plus_days(long n) const { return Date{days_ + std::chrono::days{n}}; }

    friend constexpr auto operator<=>(const Date&, const Date&) = default;

private:
    std::chrono::sys_days days_{};
};

// Sorted, duplicate-free list of trading days.
class Calendar {
public:
    Calendar() = default;
    // Throws DataError when the dates are not strictly increasing.
    explicit Calendar(std::vector<Date> days);

    // Weekdays in [first, last] minus the given holidays.
    static Calendar weekdays(Date first, Date last, std::span<const Date> holidays = {});

    std::size_t size() const { return days_.size(); }
    bool empty() const { return days_.empty(); }
    const Date& operator[](std::size_t i) const { return days_[i]; }
    const std::vector<Date>& days() const { return days_; }
    auto begin() const { return days_.begin(); }
    auto end() const { return days_.end(); }

    std::optional<std::size_t> index_of(Date d) const;
    // First trading day on or after d; nullopt past the end.
    std::optional<std::size_t> on_or_after(Date d) const;
    // First trading day strictly after d.
    std::optional<std::size_t> after(Date d) const;

private:
    std::vector<Date> days_;
};

// Reads one ISO date per line (blank lines and '#' comments ignored).
std::vector<Date> read_date_list(const std::string& path);

}  // namespace liqrec
