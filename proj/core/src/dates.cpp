#include "merton/dates.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>

#include "merton/errors.hpp"

namespace merton {

std::optional<Date> parse_iso_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    auto field = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
        int value = 0;
        const char* first = text.data() + pos;
        const char* last = first + len;
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc{} || ptr != last) return std::nullopt;
        return value;
    };
    const auto y = field(0, 4);
    const auto m = field(5, 2);
    const auto d = field(8, 2);
    if (!y || !m || !d) return std::nullopt;
    const std::chrono::year_month_day ymd{std::chrono::year{*y}, std::chrono::month{static_cast<unsigned>(*m)},
                                          std::chrono::day{static_cast<unsigned>(*d)}};
    if (!ymd.ok()) return std::nullopt;
    return Date{ymd};
}

std::string format_iso_date(Date date) {
    const std::chrono::year_month_day ymd{date};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

int days_between(Date from, Date to) noexcept {
    return static_cast<int>((to - from).count());
}

TradingCalendar::TradingCalendar(std::vector<Date> days) : days_(std::move(days)) {
    std::sort(days_.begin(), days_.end());
    days_.erase(std::unique(days_.begin(), days_.end()), days_.end());
}

Date TradingCalendar::nearest(Date date) const {
    if (days_.empty()) throw InvalidArgument("empty trading calendar");
    const auto it = std::lower_bound(days_.begin(), days_.end(), date);
    if (it == days_.end()) return days_.back();
    if (*it == date || it == days_.begin()) return *it;
    const Date after = *it;
    const Date before = *std::prev(it);
    return (date - before) <= (after - date) ? before : after;
}

}  // namespace merton
