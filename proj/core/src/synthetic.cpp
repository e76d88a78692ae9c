#include "merton/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <sstream>

#include "merton/binomial.hpp"
#include "merton/errors.hpp"
#include "merton/market_data.hpp"
#include "merton/pricing.hpp"
#include "merton/surface_io.hpp"

namespace merton {

namespace {

using std::chrono::days;

constexpr Date kAsOf = std::chrono::sys_days{std::chrono::year{2025} / 2 / 13};

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", x);
    return buf;
}

// Value exactly as a consumer of the fixture will read it back.
double as_written(double x) { return std::stod(fmt(x)); }

bool is_weekday(Date d) {
    const std::chrono::weekday wd{d};
    return wd != std::chrono::Saturday && wd != std::chrono::Sunday;
}

std::vector<Date> weekdays_ending(Date last, int count) {
    std::vector<Date> out;
    for (Date d = last; static_cast<int>(out.size()) < count; d -= days{1})
        if (is_weekday(d)) out.push_back(d);
    return {out.rbegin(), out.rend()};
}

std::string closes_text(const std::vector<Date>& dates, const std::map<Date, double>& closes) {
    std::ostringstream os;
    os << "date,adjusted_close\n";
    for (const Date d : dates) {
        os << format_iso_date(d) << ',';
        if (const auto it = closes.find(d); it != closes.end()) os << fmt(it->second);
        os << '\n';
    }
    return os.str();
}

}  // namespace

std::vector<std::pair<Date, double>> table1_closes() {
    using std::chrono::sys_days;
    using std::chrono::year;
    return {
        {sys_days{year{2025} / 2 / 7}, 6025.99},  {sys_days{year{2025} / 2 / 10}, 6066.44},
        {sys_days{year{2025} / 2 / 11}, 6068.50}, {sys_days{year{2025} / 2 / 12}, 6051.97},
        {sys_days{year{2025} / 2 / 13}, 6115.07},
    };
}

std::vector<int> synthetic_maturities() { return {7, 14, 28, 63, 91, 182, 273, 350}; }

std::vector<std::pair<std::string, std::string>> synthesize_fixture(const SynthesisOptions& o) {
    if (o.history_days < 10 || o.window_length < 5 || o.window_length > o.history_days)
        throw InvalidArgument("synthetic history must cover the window");
    std::mt19937_64 rng(o.seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    // One weekday more than requested: its close is left blank.
    const std::vector<Date> all_dates = weekdays_ending(kAsOf, o.history_days + 1);
    const std::size_t blank_index = all_dates.size() / 3;

    const auto sample = table1_closes();
    std::map<Date, double> closes(sample.begin(), sample.end());
    {
        const double dt = 1.0 / 252.0;
        double level = sample.front().second;
        for (std::size_t i = all_dates.size() - sample.size(); i-- > 0;) {
            const double step = (0.08 - 0.5 * 0.04) * dt + 0.2 * std::sqrt(dt) * normal(rng);
            level = as_written(level * std::exp(-step));
            if (i != blank_index) closes.emplace(all_dates[i], level);
        }
    }
    std::vector<Date> valid_dates;
    for (const Date d : all_dates)
        if (closes.contains(d)) valid_dates.push_back(d);

    std::ostringstream rates_os;
    rates_os << "date,annual_yield\n";
    for (std::size_t i = 0; i < all_dates.size(); ++i) {
        const double y = 0.043 + 0.002 * std::sin(static_cast<double>(i) / 40.0) + 0.0002 * normal(rng);
        const bool last = i + 1 == all_dates.size();
        if (!last && i % 9 == 4) continue;  // gap
        rates_os << format_iso_date(all_dates[i]) << ',';
        if (last || i != 37) rates_os << fmt(y);
        rates_os << '\n';
    }
    const std::string rates_text = rates_os.str();
    std::istringstream rates_in(rates_text);
    const RateSeries raw_rates = read_rate_series(rates_in);
    const RateSeries rates = impute_rates(raw_rates, valid_dates);
    auto rate_on = [&](Date d) { return continuous_annual_rate(rates.values.at(d)); };

    // Option chain on the equity at a single volatility.
    const double spot = sample.back().second;
    const double r0 = rate_on(kAsOf);
    std::ostringstream chain_os;
    chain_os << "quote_date,expiry_date,strike,bid,ask,mid,vendor_iv\n";
    auto quote_row = [&](int maturity, double moneyness, double iv) {
        const double strike = as_written(moneyness * spot);
        const double mid = as_written(bsm_call({spot, strike, r0, o.equity_vol, maturity / 365.0}));
        const double half = std::max(0.05, 0.005 * mid);
        const double bid = std::max(0.0, std::floor((mid - half) * 100.0) / 100.0);
        const double ask = std::ceil((mid + half) * 100.0) / 100.0;
        chain_os << format_iso_date(kAsOf) << ',' << format_iso_date(kAsOf + days{maturity}) << ',' << fmt(strike)
                 << ',' << fmt(bid) << ',' << fmt(ask) << ',' << fmt(mid) << ',' << fmt(iv) << '\n';
    };
    for (const int t : synthetic_maturities()) {
        for (int k = 1; k <= 30; ++k) {
            const double m = k * 5 / 100.0;
            const double iv = (t == 91 && k == 20) ? 0.95 : o.equity_vol + 0.005 * normal(rng);
            quote_row(t, m, as_written(iv));
        }
    }
    quote_row(364, 1.0, o.equity_vol);  // beyond the maturity cap
    chain_os << format_iso_date(kAsOf) << ',' << format_iso_date(kAsOf + days{28}) << ',' << fmt(spot)
             << ",12.5,11.5,,\n";  // ask below bid

    // Closes replaced by tree prices: the observation for maturity T sits
    // L - T closes before the as-of date.
    const std::vector<Date> window(valid_dates.end() - o.window_length, valid_dates.end());
    auto selfgen = [&](double drift, double up_probability) {
        std::map<Date, double> out = closes;
        const double strike = o.selfgen_moneyness * o.asset_value;
        for (const int t : synthetic_maturities()) {
            if (t >= o.window_length) continue;
            const Date d = window[static_cast<std::size_t>(o.window_length - 1 - t)];
            const TreeParams params =
                tree_params_for_maturity(t, 1, drift, o.tree_vol, up_probability, rate_on(d), ReturnMode::Log);
            out[d] = as_written(tree_call_price(o.asset_value, strike, params).value);
        }
        return out;
    };

    std::ostringstream table_os;
    table_os << "date,adjusted_close\n";
    for (const auto& [d, c] : sample) table_os << format_iso_date(d) << ',' << fmt(c) << '\n';

    std::ostringstream cal_os;
    for (Date d = all_dates.front(); d <= kAsOf + days{400}; d += days{1})
        if (is_weekday(d)) cal_os << format_iso_date(d) << '\n';

    std::string maturity_list;
    for (const int t : synthetic_maturities()) {
        if (!maturity_list.empty()) maturity_list += ',';
        maturity_list += std::to_string(t);
    }
    const std::string common = "rates = rates.csv\ncalendar = calendar.txt\nas_of = " + format_iso_date(kAsOf) +
                               "\nasset_value = " + fmt(o.asset_value) + "\n";
    const std::string window_line = "window_length = " + std::to_string(o.window_length) + "\n";

    std::ostringstream truth;
    truth << "seed=" << o.seed << "\nas_of=" << format_iso_date(kAsOf) << "\nequity_close=" << fmt(spot)
          << "\nequity_vol=" << fmt(o.equity_vol) << "\nasset_value=" << fmt(o.asset_value)
          << "\ntree_vol=" << fmt(o.tree_vol) << "\nselfgen_moneyness=" << fmt(o.selfgen_moneyness)
          << "\nselfgen_up_probability=" << fmt(o.selfgen_up_probability)
          << "\nselfgen_fixed_drift=" << fmt(o.fixed_drift) << "\nselfgen_drift=" << fmt(o.selfgen_drift)
          << "\nselfgen_fixed_up_probability=" << fmt(o.fixed_up_probability) << "\nmaturities=" << maturity_list
          << "\nblank_close=" << format_iso_date(all_dates[blank_index]) << '\n';

    return {
        {"chain.csv", chain_os.str()},
        {"closes.csv", closes_text(all_dates, closes)},
        {"rates.csv", rates_text},
        {"calendar.txt", cal_os.str()},
        {"table1_closes.csv", table_os.str()},
        {"selfgen_closes.csv", closes_text(all_dates, selfgen(o.fixed_drift, o.selfgen_up_probability))},
        {"selfgen_drift_closes.csv", closes_text(all_dates, selfgen(o.selfgen_drift, o.fixed_up_probability))},
        {"ground_truth.txt", truth.str()},
        {"config.txt", "chain = chain.csv\ncloses = closes.csv\n" + common + window_line + "out_dir = out\n"},
        {"config_selfgen.txt", "closes = selfgen_closes.csv\n" + common + window_line +
                                   "moneyness_asset = " + fmt(o.selfgen_moneyness) + "\nmaturities = " +
                                   maturity_list + "\nfixed_drift = " + fmt(o.fixed_drift) +
                                   "\nsigma_override = " + fmt(o.tree_vol) + "\nout_dir = out_selfgen\n"},
        {"config_selfgen_drift.txt", "closes = selfgen_drift_closes.csv\n" + common + window_line +
                                         "moneyness_asset = " + fmt(o.selfgen_moneyness) + "\nmaturities = " +
                                         maturity_list + "\nfixed_up_probability = " +
                                         fmt(o.fixed_up_probability) + "\nsigma_override = " + fmt(o.tree_vol) +
                                         "\nout_dir = out_selfgen_drift\n"},
        {"config_table1.txt", "closes = table1_closes.csv\n" + common +
                                  "window_length = 5\nmaturities = 1,2,3,4\nsigma_override = " + fmt(o.tree_vol) +
                                  "\nout_dir = out_table1\n"},
    };
}

std::vector<std::filesystem::path> write_fixture(const SynthesisOptions& options, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create fixture directory '" + dir.string() + "': " + ec.message());
    std::vector<std::filesystem::path> written;
    for (const auto& [name, content] : synthesize_fixture(options)) {
        write_text_file(dir / name, content);
        written.push_back(dir / name);
    }
    return written;
}

}  // namespace merton
