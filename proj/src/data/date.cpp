#include "coincast/date.hpp"

#include <array>
#include <charconv>
#include <cstdio>

#include "coincast/error.hpp"

namespace coincast {
namespace {

// Civil-calendar conversions (proleptic Gregorian), era-based algorithms.
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                         static_cast<unsigned>(d) - 1u;
    const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

struct Ymd {
    int y;
    int m;
    int d;
};

Ymd civil_from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp < 10 ? mp + 3 : mp - 9;
    return {static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(d)};
}

bool is_leap(int y) { return y % 4 == 0 && (y % 100 != 0 || y % 400 == 0); }

int days_in_month(int y, int m) {
    static constexpr std::array<int, 12> lengths = {31, 28, 31, 30, 31, 30,
                                                    31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap(y)) return 29;
    return lengths[static_cast<std::size_t>(m - 1)];
}

int iso_weeks_in_year(int y) {
    const auto p = [](int yy) { return (yy + yy / 4 - yy / 100 + yy / 400) % 7; };
    return 52 + ((p(y) == 4 || p(y - 1) == 3) ? 1 : 0);
}

int parse_int_field(const std::string& text, std::size_t begin, std::size_t end) {
    int value = 0;
    const auto [ptr, ec] =
        std::from_chars(text.data() + begin, text.data() + end, value);
    if (ec != std::errc() || ptr != text.data() + end) return -1;
    return value;
}

} // namespace

Date Date::parse(const std::string& dmy) {
    const auto fail = [&]() -> Date {
        throw Error("invalid date '" + dmy + "', expected day-month-year (e.g. 15-08-2023)");
    };
    const std::size_t d1 = dmy.find('-');
    if (d1 == std::string::npos) return fail();
    const std::size_t d2 = dmy.find('-', d1 + 1);
    if (d2 == std::string::npos || dmy.find('-', d2 + 1) != std::string::npos) return fail();
    const std::size_t day_len = d1;
    const std::size_t mon_len = d2 - d1 - 1;
    const std::size_t year_len = dmy.size() - d2 - 1;
    if (day_len < 1 || day_len > 2 || mon_len < 1 || mon_len > 2 || year_len != 4) {
        return fail();
    }
    const int d = parse_int_field(dmy, 0, d1);
    const int m = parse_int_field(dmy, d1 + 1, d2);
    const int y = parse_int_field(dmy, d2 + 1, dmy.size());
    if (d < 0 || m < 0 || y < 0) return fail();
    if (m < 1 || m > 12 || d < 1 || d > days_in_month(y, m)) return fail();
    return from_ymd(y, m, d);
}

Date Date::from_ymd(int year, int month, int day) {
    if (month < 1 || month > 12 || day < 1 || day > days_in_month(year, month)) {
        throw Error("invalid calendar day " + std::to_string(day) + "-" +
                    std::to_string(month) + "-" + std::to_string(year));
    }
    return Date(days_from_civil(year, month, day));
}

std::string Date::to_string() const {
    const Ymd ymd = civil_from_days(serial_);
    char buf[16];
    std::snprintf(buf, sizeof buf, "%02d-%02d-%04d", ymd.d, ymd.m, ymd.y);
    return buf;
}

int Date::year() const { return civil_from_days(serial_).y; }
int Date::month() const { return civil_from_days(serial_).m; }
int Date::day() const { return civil_from_days(serial_).d; }

int Date::weekday_iso() const {
    // 1970-01-01 was a Thursday (ISO 4).
    const std::int64_t w = (serial_ + 3) % 7;
    return static_cast<int>(w < 0 ? w + 7 : w) + 1;
}

std::pair<int, int> Date::iso_week() const {
    const Ymd ymd = civil_from_days(serial_);
    const int doy =
        static_cast<int>(serial_ - days_from_civil(ymd.y, 1, 1)) + 1;
    int week = (doy - weekday_iso() + 10) / 7;
    int year = ymd.y;
    if (week < 1) {
        year -= 1;
        week = iso_weeks_in_year(year);
    } else if (week > iso_weeks_in_year(year)) {
        week = 1;
        year += 1;
    }
    return {year, week};
}

} // namespace coincast
