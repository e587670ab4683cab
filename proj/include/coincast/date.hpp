#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <utility>

namespace coincast {

/// Calendar day stored as a serial day count (days since 1970-01-01).
/// Text form is day-month-year with dashes, e.g. "15-08-2023".
class Date {
public:
    Date() : serial_(0) {}

    static Date parse(const std::string& dmy);
    static Date from_ymd(int year, int month, int day);
    static Date from_serial(std::int64_t serial) { return Date(serial); }

    std::string to_string() const;

    int year() const;
    int month() const;
    int day() const;
    std::int64_t serial() const { return serial_; }

    Date plus_days(std::int64_t n) const { return Date(serial_ + n); }

    /// ISO weekday, Monday = 1 .. Sunday = 7.
    int weekday_iso() const;

    /// ISO-8601 (week-year, week number) pair.
    std::pair<int, int> iso_week() const;

    auto operator<=>(const Date&) const = default;

private:
    explicit Date(std::int64_t serial) : serial_(serial) {}
    std::int64_t serial_;
};

} // namespace coincast
