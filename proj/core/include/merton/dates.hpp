#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace merton {

using Date = std::chrono::sys_days;

/// Parses YYYY-MM-DD. Returns nullopt on any malformed or impossible date.
std::optional<Date> parse_iso_date(std::string_view text);
std::string format_iso_date(Date date);

int days_between(Date from, Date to) noexcept;

/// Sorted trading days. Empty calendar means "no snapping".
class TradingCalendar {
public:
    TradingCalendar() = default;
    explicit TradingCalendar(std::vector<Date> days);

    bool empty() const noexcept { return days_.empty(); }
    const std::vector<Date>& days() const noexcept { return days_; }

    /// Nearest trading day; equidistant candidates resolve to the earlier one.
    Date nearest(Date date) const;

private:
    std::vector<Date> days_;
};

}  // namespace merton
