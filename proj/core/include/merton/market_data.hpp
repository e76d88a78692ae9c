#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "merton/dates.hpp"

// Ingestion and cleaning of option chains, adjusted-close histories and
// risk-free yields. All inputs are comma-separated text with a header row:
//
//   option chain:  quote_date,expiry_date,strike,bid,ask,mid,vendor_iv
//   closes:        date,adjusted_close
//   rates:         date,annual_yield
//   calendar:      one ISO date per line
//
// Dates are ISO-8601; numbers use a decimal point and no thousands separators.
// mid and vendor_iv cells may be empty (mid then defaults to (bid+ask)/2).

namespace merton {

struct OptionQuote {
    Date quote_date;
    Date expiry_date;
    double strike = 0.0;
    double bid = 0.0;
    double ask = 0.0;
    double mid = 0.0;
    std::optional<double> vendor_iv;

    int maturity_days() const noexcept { return days_between(quote_date, expiry_date); }
    friend bool operator==(const OptionQuote&, const OptionQuote&) = default;
};

/// One row refused during ingestion. `row` is the 1-based line number in the file.
struct RejectedRow {
    std::size_t row;
    std::string rule;
    std::string value;
};

struct ChainLoadResult {
    std::vector<OptionQuote> quotes;
    std::vector<RejectedRow> rejects;
    std::vector<std::string> warnings;
};

ChainLoadResult read_option_chain(std::istream& in);
ChainLoadResult load_option_chain(const std::filesystem::path& path);

struct CleaningRules {
    double min_bid = 0.05;           // bids strictly below are dropped
    int max_maturity_days = 350;     // longer maturities are dropped
    double min_strike_ratio = 0.10;  // closed band [min, max] * spot
    double max_strike_ratio = 1.50;
    double winsor_percentile = 0.99;  // nearest-rank cap on vendor implied vols
};

struct CleaningReport {
    std::vector<OptionQuote> kept;
    std::size_t input_count = 0;
    std::size_t dropped_low_bid = 0;
    std::size_t dropped_long_maturity = 0;
    std::size_t dropped_strike_band = 0;
    std::size_t winsorized = 0;  // vols replaced by the cap, not dropped
    std::size_t snapped = 0;     // expiries moved onto the calendar
    std::optional<double> winsor_cap;

    std::size_t dropped() const noexcept {
        return dropped_low_bid + dropped_long_maturity + dropped_strike_band;
    }
};

/// Nearest-rank percentile: the ceil(pct * n)-th smallest value (1-based).
double nearest_rank_percentile(std::vector<double> values, double pct);

/// True when the quote survives the bid, maturity and strike-band rules.
bool passes_filters(const OptionQuote& quote, double spot, const CleaningRules& rules = {});

/// Snaps expiries to the calendar, applies the drop rules in order (bid,
/// maturity, strike band; each quote is counted under the first rule it
/// fails) and winsorizes vendor vols of the survivors. Idempotent.
CleaningReport clean_quotes(std::span<const OptionQuote> quotes, double spot,
                            const TradingCalendar& calendar = {}, const CleaningRules& rules = {});

struct RateImputation {
    Date filled;
    Date source;
    double value;
};

/// Annual simple yields keyed by date, plus the log of every imputed entry.
struct RateSeries {
    std::map<Date, double> values;
    std::vector<RateImputation> imputations;
};

RateSeries read_rate_series(std::istream& in);
RateSeries load_rate_series(const std::filesystem::path& path);

/// Restricts the series to exactly `required` and fills gaps from the
/// nearest dated observation (ties take the earlier date). Throws
/// InsufficientDataError on an empty series.
RateSeries impute_rates(const RateSeries& rates, std::span<const Date> required);

enum class RateConvention { ToDailyContinuous };

/// ln(1 + y) / 365 for an annual simple yield y > -1.
double convert_rate(double annual_yield, RateConvention convention = RateConvention::ToDailyContinuous);
/// Annualized continuously-compounded rate used by every pricing formula: ln(1 + y).
double continuous_annual_rate(double annual_yield);

struct ClosePoint {
    Date date;
    double adjusted_close;
};

struct CloseHistory {
    std::vector<ClosePoint> closes;  // sorted by date
    std::vector<Date> excluded;      // dates whose close was blank
    std::vector<RejectedRow> rejects;
};

CloseHistory read_close_history(std::istream& in);
CloseHistory load_close_history(const std::filesystem::path& path);

TradingCalendar read_trading_calendar(std::istream& in);
TradingCalendar load_trading_calendar(const std::filesystem::path& path);

struct SnapshotSources {
    std::filesystem::path chain;  // optional
    std::filesystem::path closes;
    std::filesystem::path rates;
    std::filesystem::path calendar;  // optional
};

struct SnapshotConfig {
    int window_length = 0;          // L
    double asset_value = 1e12;      // V_0
    std::optional<Date> as_of;      // defaults to the last available close
    CleaningRules rules;
};

struct MarketSnapshot {
    Date as_of;
    double equity_close = 0.0;            // S_0: adjusted close on as_of
    std::vector<ClosePoint> close_history;  // window of length L ending at as_of
    std::vector<OptionQuote> quotes;        // cleaned
    RateSeries rates;                       // aligned with close_history
    double asset_value = 1e12;

    std::vector<Date> excluded_close_dates;
    std::vector<RejectedRow> chain_rejects;
    std::vector<std::string> warnings;
    CleaningReport cleaning;

    /// Continuously-compounded annual rate on a window date.
    double rate_on(Date date) const;
    double as_of_rate() const { return rate_on(as_of); }
};

/// Composes ingestion, cleaning, windowing and rate alignment. Throws
/// InsufficientDataError when fewer than L closes are available.
MarketSnapshot build_snapshot(const SnapshotSources& sources, const SnapshotConfig& config);

/// Window and rate alignment from in-memory series (used by build_snapshot).
MarketSnapshot assemble_snapshot(const CloseHistory& closes, const RateSeries& rates,
                                 std::span<const OptionQuote> raw_quotes, const TradingCalendar& calendar,
                                 const SnapshotConfig& config);

}  // namespace merton
