#include "merton/market_data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include "csv.hpp"
#include "merton/errors.hpp"

namespace merton {

namespace {

std::ifstream open_input(const std::filesystem::path& path, const char* what) {
    std::ifstream in(path);
    if (!in) throw IoError(std::string("cannot open ") + what + " file '" + path.string() + "'");
    return in;
}

}  // namespace

ChainLoadResult read_option_chain(std::istream& in) {
    ChainLoadResult result;
    std::string line;
    std::size_t line_no = 0;
    if (!csv::next_record(in, line, line_no)) {
        result.warnings.emplace_back("option chain is empty");
        return result;
    }

    const csv::Header header(csv::split(line));
    const char* kind = "option chain";
    const std::size_t c_quote = header.require("quote_date", kind);
    const std::size_t c_expiry = header.require("expiry_date", kind);
    const std::size_t c_strike = header.require("strike", kind);
    const std::size_t c_bid = header.require("bid", kind);
    const std::size_t c_ask = header.require("ask", kind);
    const std::size_t c_mid = header.require("mid", kind);
    const auto c_iv = header.find("vendor_iv");

    while (csv::next_record(in, line, line_no)) {
        const auto fields = csv::split(line);
        auto reject = [&](const char* rule, const std::string& value) {
            result.rejects.push_back({line_no, rule, value});
        };
        if (fields.size() < header.width()) {
            reject("FIELD_COUNT", std::to_string(fields.size()));
            continue;
        }
        const auto quote_date = parse_iso_date(fields[c_quote]);
        if (!quote_date) {
            reject("BAD_DATE", fields[c_quote]);
            continue;
        }
        const auto expiry = parse_iso_date(fields[c_expiry]);
        if (!expiry) {
            reject("BAD_DATE", fields[c_expiry]);
            continue;
        }
        const auto strike = csv::parse_double(fields[c_strike]);
        const auto bid = csv::parse_double(fields[c_bid]);
        const auto ask = csv::parse_double(fields[c_ask]);
        if (!strike || !bid || !ask) {
            reject("BAD_NUMBER", !strike ? fields[c_strike] : !bid ? fields[c_bid] : fields[c_ask]);
            continue;
        }
        if (*strike < 0.0 || *bid < 0.0 || *ask < 0.0) {
            reject("NEGATIVE_VALUE", *strike < 0.0 ? fields[c_strike] : *bid < 0.0 ? fields[c_bid] : fields[c_ask]);
            continue;
        }
        if (*expiry < *quote_date) {
            reject("EXPIRY_BEFORE_QUOTE", fields[c_expiry]);
            continue;
        }
        if (*ask < *bid) {
            reject("ASK_BELOW_BID", fields[c_ask]);
            continue;
        }

        OptionQuote quote{*quote_date, *expiry, *strike, *bid, *ask, 0.5 * (*bid + *ask), std::nullopt};
        if (!fields[c_mid].empty()) {
            const auto mid = csv::parse_double(fields[c_mid]);
            if (!mid || *mid < 0.0) {
                reject("BAD_NUMBER", fields[c_mid]);
                continue;
            }
            quote.mid = *mid;
        }
        if (c_iv && !fields[*c_iv].empty()) {
            const auto iv = csv::parse_double(fields[*c_iv]);
            if (!iv || *iv < 0.0) {
                reject("BAD_NUMBER", fields[*c_iv]);
                continue;
            }
            quote.vendor_iv = *iv;
        }
        result.quotes.push_back(quote);
    }
    if (result.quotes.empty() && result.rejects.empty()) result.warnings.emplace_back("option chain has no rows");
    return result;
}

ChainLoadResult load_option_chain(const std::filesystem::path& path) {
    auto in = open_input(path, "option chain");
    return read_option_chain(in);
}

double nearest_rank_percentile(std::vector<double> values, double pct) {
    if (values.empty()) throw InvalidArgument("percentile of an empty set");
    if (!(pct > 0.0 && pct <= 1.0)) throw InvalidArgument("percentile must lie in (0, 1]");
    std::sort(values.begin(), values.end());
    const auto rank = static_cast<std::size_t>(std::ceil(pct * static_cast<double>(values.size())));
    return values[std::clamp<std::size_t>(rank, 1, values.size()) - 1];
}

namespace {

enum class DropRule { None, LowBid, LongMaturity, StrikeBand };

DropRule first_failed_rule(const OptionQuote& q, double spot, const CleaningRules& rules) {
    if (q.bid < rules.min_bid) return DropRule::LowBid;
    if (q.maturity_days() > rules.max_maturity_days) return DropRule::LongMaturity;
    if (q.strike < rules.min_strike_ratio * spot || q.strike > rules.max_strike_ratio * spot)
        return DropRule::StrikeBand;
    return DropRule::None;
}

}  // namespace

bool passes_filters(const OptionQuote& quote, double spot, const CleaningRules& rules) {
    return first_failed_rule(quote, spot, rules) == DropRule::None;
}

CleaningReport clean_quotes(std::span<const OptionQuote> quotes, double spot, const TradingCalendar& calendar,
                            const CleaningRules& rules) {
    if (!(spot > 0.0)) throw InvalidArgument("cleaning needs a positive spot");
    CleaningReport report;
    report.input_count = quotes.size();

    for (OptionQuote q : quotes) {
        if (!calendar.empty()) {
            const Date snapped = calendar.nearest(q.expiry_date);
            if (snapped != q.expiry_date) {
                q.expiry_date = snapped;
                ++report.snapped;
            }
        }
        switch (first_failed_rule(q, spot, rules)) {
            case DropRule::LowBid: ++report.dropped_low_bid; break;
            case DropRule::LongMaturity: ++report.dropped_long_maturity; break;
            case DropRule::StrikeBand: ++report.dropped_strike_band; break;
            case DropRule::None: report.kept.push_back(q); break;
        }
    }

    std::vector<double> vols;
    for (const auto& q : report.kept)
        if (q.vendor_iv) vols.push_back(*q.vendor_iv);
    if (!vols.empty()) {
        const double cap = nearest_rank_percentile(std::move(vols), rules.winsor_percentile);
        report.winsor_cap = cap;
        for (auto& q : report.kept) {
            if (q.vendor_iv && *q.vendor_iv > cap) {
                q.vendor_iv = cap;
                ++report.winsorized;
            }
        }
    }
    return report;
}

RateSeries read_rate_series(std::istream& in) {
    RateSeries series;
    std::string line;
    std::size_t line_no = 0;
    if (!csv::next_record(in, line, line_no)) return series;
    const csv::Header header(csv::split(line));
    const std::size_t c_date = header.require("date", "rate file");
    const std::size_t c_yield = header.require("annual_yield", "rate file");

    while (csv::next_record(in, line, line_no)) {
        const auto fields = csv::split(line);
        const std::string where = "rate file line " + std::to_string(line_no);
        if (fields.size() < header.width()) throw DataError(where + ": too few fields");
        const auto date = parse_iso_date(fields[c_date]);
        if (!date) throw DataError(where + ": bad date '" + fields[c_date] + "'");
        if (fields[c_yield].empty()) continue;  // missing observation
        const auto yield = csv::parse_double(fields[c_yield]);
        if (!yield || *yield <= -1.0) throw DataError(where + ": bad yield '" + fields[c_yield] + "'");
        if (!series.values.emplace(*date, *yield).second)
            throw DataError(where + ": duplicate date " + fields[c_date]);
    }
    return series;
}

RateSeries load_rate_series(const std::filesystem::path& path) {
    auto in = open_input(path, "rate");
    return read_rate_series(in);
}

RateSeries impute_rates(const RateSeries& rates, std::span<const Date> required) {
    if (rates.values.empty()) throw InsufficientDataError("cannot impute from an empty rate series");
    RateSeries out;
    for (const Date date : required) {
        if (const auto it = rates.values.find(date); it != rates.values.end()) {
            out.values.emplace(date, it->second);
            continue;
        }
        const auto after = rates.values.lower_bound(date);
        auto source = after;
        if (after == rates.values.end()) {
            source = std::prev(after);
        } else if (after != rates.values.begin()) {
            const auto before = std::prev(after);
            if ((date - before->first) <= (after->first - date)) source = before;
        }
        out.values.emplace(date, source->second);
        out.imputations.push_back({date, source->first, source->second});
    }
    std::vector<RateImputation> log;
    for (const auto& entry : rates.imputations)
        if (out.values.contains(entry.filled)) log.push_back(entry);
    log.insert(log.end(), out.imputations.begin(), out.imputations.end());
    out.imputations = std::move(log);
    return out;
}

double convert_rate(double annual_yield, RateConvention convention) {
    if (!(annual_yield > -1.0)) throw InvalidArgument("annual yield must exceed -1");
    switch (convention) {
        case RateConvention::ToDailyContinuous: return std::log1p(annual_yield) / 365.0;
    }
    throw InvalidArgument("unknown rate convention");
}

double continuous_annual_rate(double annual_yield) {
    return 365.0 * convert_rate(annual_yield);
}

CloseHistory read_close_history(std::istream& in) {
    CloseHistory history;
    std::string line;
    std::size_t line_no = 0;
    if (!csv::next_record(in, line, line_no)) return history;
    const csv::Header header(csv::split(line));
    const std::size_t c_date = header.require("date", "close history");
    const std::size_t c_close = header.require("adjusted_close", "close history");

    std::map<Date, double> by_date;
    while (csv::next_record(in, line, line_no)) {
        const auto fields = csv::split(line);
        if (fields.size() < header.width()) {
            history.rejects.push_back({line_no, "FIELD_COUNT", std::to_string(fields.size())});
            continue;
        }
        const auto date = parse_iso_date(fields[c_date]);
        if (!date) {
            history.rejects.push_back({line_no, "BAD_DATE", fields[c_date]});
            continue;
        }
        if (fields[c_close].empty()) {
            history.excluded.push_back(*date);
            continue;
        }
        const auto close = csv::parse_double(fields[c_close]);
        if (!close) {
            history.rejects.push_back({line_no, "BAD_NUMBER", fields[c_close]});
            continue;
        }
        if (!(*close > 0.0)) {
            history.rejects.push_back({line_no, "NON_POSITIVE_CLOSE", fields[c_close]});
            continue;
        }
        if (!by_date.emplace(*date, *close).second) {
            history.rejects.push_back({line_no, "DUPLICATE_DATE", fields[c_date]});
        }
    }
    for (const auto& [date, close] : by_date) history.closes.push_back({date, close});
    std::sort(history.excluded.begin(), history.excluded.end());
    return history;
}

CloseHistory load_close_history(const std::filesystem::path& path) {
    auto in = open_input(path, "close history");
    return read_close_history(in);
}

TradingCalendar read_trading_calendar(std::istream& in) {
    std::vector<Date> days;
    std::string line;
    std::size_t line_no = 0;
    while (csv::next_record(in, line, line_no)) {
        const auto date = parse_iso_date(csv::trim(line));
        if (!date) {
            if (line_no == 1 && csv::trim(line) == "date") continue;
            throw DataError("calendar line " + std::to_string(line_no) + ": bad date '" + line + "'");
        }
        days.push_back(*date);
    }
    return TradingCalendar(std::move(days));
}

TradingCalendar load_trading_calendar(const std::filesystem::path& path) {
    auto in = open_input(path, "calendar");
    return read_trading_calendar(in);
}

double MarketSnapshot::rate_on(Date date) const {
    const auto it = rates.values.find(date);
    if (it == rates.values.end()) throw DataError("no risk-free rate for " + format_iso_date(date));
    return continuous_annual_rate(it->second);
}

MarketSnapshot assemble_snapshot(const CloseHistory& closes, const RateSeries& rates,
                                 std::span<const OptionQuote> raw_quotes, const TradingCalendar& calendar,
                                 const SnapshotConfig& config) {
    if (config.window_length < 1) throw ConfigError("window length L must be at least 1");
    if (!(config.asset_value > 0.0)) throw ConfigError("asset value V_0 must be positive");

    std::vector<ClosePoint> available;
    for (const auto& point : closes.closes)
        if (!config.as_of || point.date <= *config.as_of) available.push_back(point);
    if (available.empty()) throw InsufficientDataError("no adjusted closes on or before the as-of date");
    if (config.as_of && available.back().date != *config.as_of)
        throw InsufficientDataError("no adjusted close on as-of date " + format_iso_date(*config.as_of));

    const auto window_length = static_cast<std::size_t>(config.window_length);
    if (available.size() < window_length)
        throw InsufficientDataError("window needs " + std::to_string(window_length) + " closes, only " +
                                    std::to_string(available.size()) + " available");

    MarketSnapshot snap;
    snap.close_history.assign(available.end() - static_cast<std::ptrdiff_t>(window_length), available.end());
    snap.as_of = snap.close_history.back().date;
    snap.equity_close = snap.close_history.back().adjusted_close;
    snap.asset_value = config.asset_value;

    std::vector<Date> window_dates;
    window_dates.reserve(window_length);
    for (const auto& point : snap.close_history) window_dates.push_back(point.date);
    snap.rates = impute_rates(rates, window_dates);

    for (const Date d : closes.excluded)
        if (d >= window_dates.front() && d <= snap.as_of) snap.excluded_close_dates.push_back(d);

    snap.cleaning = clean_quotes(raw_quotes, snap.equity_close, calendar, config.rules);
    snap.quotes = snap.cleaning.kept;
    return snap;
}

MarketSnapshot build_snapshot(const SnapshotSources& sources, const SnapshotConfig& config) {
    const CloseHistory closes = load_close_history(sources.closes);
    const RateSeries rates = load_rate_series(sources.rates);
    const TradingCalendar calendar =
        sources.calendar.empty() ? TradingCalendar{} : load_trading_calendar(sources.calendar);

    ChainLoadResult chain;
    if (!sources.chain.empty()) chain = load_option_chain(sources.chain);

    MarketSnapshot snap = assemble_snapshot(closes, rates, chain.quotes, calendar, config);
    snap.chain_rejects = std::move(chain.rejects);
    snap.warnings = std::move(chain.warnings);
    for (const auto& r : closes.rejects)
        snap.warnings.push_back("close history line " + std::to_string(r.row) + " rejected: " + r.rule);
    return snap;
}

}  // namespace merton
