#include "merton/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "csv.hpp"
#include "merton/errors.hpp"

namespace merton {

namespace {

constexpr std::array kSchema = {
    ConfigKey{"chain", "", "option chain file"},
    ConfigKey{"closes", "", "adjusted-close history file"},
    ConfigKey{"rates", "", "risk-free yield file"},
    ConfigKey{"calendar", "", "trading calendar file"},
    ConfigKey{"out_dir", "out", "output directory"},
    ConfigKey{"as_of", "", "snapshot date (default: last close)"},
    ConfigKey{"window_length", "", "closes in the window, L"},
    ConfigKey{"asset_value", "1e12", "firm asset value V_0"},
    ConfigKey{"moneyness_asset", "0.01:0.90:0.01", "K/V_0 axis for asset-side surfaces"},
    ConfigKey{"moneyness_equity", "0.05:1.50:0.05", "K/S_0 axis for the equity-vol surface"},
    ConfigKey{"maturities", "auto", "maturity axis in days, or auto"},
    ConfigKey{"fixed_drift", "0.08", "mu held during the probability fit"},
    ConfigKey{"fixed_up_probability", "0.5", "p held during the drift fit"},
    ConfigKey{"vol_lookup_moneyness", "0.01", "asset-vol cell feeding the tree fits"},
    ConfigKey{"vol_lookup_maturity", "", "asset-vol row feeding the tree fits (default: same maturity)"},
    ConfigKey{"sigma_override", "", "constant tree volatility instead of the asset-vol lookup"},
    ConfigKey{"tree_mode", "log", "log or arithmetic"},
    ConfigKey{"steps_per_day", "1", "tree steps per calendar day"},
    ConfigKey{"sigma_min", "1e-4", "volatility search bound"},
    ConfigKey{"sigma_max", "5", "volatility search bound"},
    ConfigKey{"drift_min", "-5", "drift search bound"},
    ConfigKey{"drift_max", "5", "drift search bound"},
    ConfigKey{"prob_min", "0.01", "up-probability search bound"},
    ConfigKey{"prob_max", "0.99", "up-probability search bound"},
    ConfigKey{"sigma_tol", "1e-8", "volatility bracket tolerance"},
    ConfigKey{"drift_tol", "1e-6", "drift bracket tolerance"},
    ConfigKey{"prob_tol", "1e-6", "probability bracket tolerance"},
    ConfigKey{"scan_points", "64", "initial scan size of the minimizer"},
    ConfigKey{"low_sensitivity", "1e-8", "relative sensitivity below which a cell is flagged L"},
    ConfigKey{"ambiguity_tol", "1e-12", "objective gap under which another tree-fit basin flags a cell A"},
    ConfigKey{"quote_moneyness_tolerance", "0.005", "max |K/S_0 - M| when matching quotes to equity cells"},
    ConfigKey{"min_bid", "0.05", "quotes with a lower bid are dropped"},
    ConfigKey{"max_maturity_days", "350", "longer quotes are dropped"},
    ConfigKey{"strike_band_min", "0.10", "lower strike band, fraction of spot"},
    ConfigKey{"strike_band_max", "1.50", "upper strike band, fraction of spot"},
    ConfigKey{"winsor_percentile", "0.99", "nearest-rank cap on vendor vols"},
    ConfigKey{"asset_vol_surface", "", "asset-vol records for drift/prob (default: out_dir)"},
    ConfigKey{"heatmap", "false", "also write SVG heatmaps"},
    ConfigKey{"stress_moneyness", "0.9", "monitored moneyness"},
    ConfigKey{"stress_maturity", "30", "monitored maturity in days"},
    ConfigKey{"stress_surfaces", "", "comma-separated DOWNSIDE_PROB records (default: out_dir)"},
};

const ConfigKey* find_key(std::string_view name) {
    for (const auto& key : kSchema)
        if (key.name == name) return &key;
    return nullptr;
}

}  // namespace

std::span<const ConfigKey> config_schema() { return kSchema; }

RunConfig::RunConfig() {
    for (const auto& key : kSchema) values_.emplace(std::string(key.name), std::string(key.default_value));
}

void RunConfig::set(std::string_view key, std::string value) {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown config key '" + std::string(key) + "'");
    it->second = std::move(value);
}

RunConfig RunConfig::parse(std::istream& in, const std::filesystem::path& base_dir) {
    RunConfig config;
    config.base_dir_ = base_dir;
    std::set<std::string, std::less<>> seen;
    std::string line;
    std::size_t line_no = 0;
    while (csv::next_record(in, line, line_no)) {
        const std::string where = "config line " + std::to_string(line_no);
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
        const std::string key(csv::trim(std::string_view(line).substr(0, eq)));
        std::string value(csv::trim(std::string_view(line).substr(eq + 1)));
        if (!find_key(key)) throw ConfigError(where + ": unknown key '" + key + "'");
        if (!seen.insert(key).second) throw ConfigError(where + ": key '" + key + "' given twice");
        config.set(key, std::move(value));
    }
    return config;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path.string() + "'");
    return parse(in, path.parent_path());
}

const std::string& RunConfig::raw(std::string_view key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown config key '" + std::string(key) + "'");
    return it->second;
}

double RunConfig::number(std::string_view key) const {
    const auto v = csv::parse_double(raw(key));
    if (!v) throw ConfigError("config key '" + std::string(key) + "' needs a number, got '" + raw(key) + "'");
    return *v;
}

int RunConfig::integer(std::string_view key) const {
    const std::string& text = raw(key);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size())
        throw ConfigError("config key '" + std::string(key) + "' needs an integer, got '" + text + "'");
    return v;
}

bool RunConfig::flag(std::string_view key) const {
    const std::string& text = raw(key);
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw ConfigError("config key '" + std::string(key) + "' needs true or false, got '" + text + "'");
}

std::optional<double> RunConfig::optional_number(std::string_view key) const {
    if (!is_set(key)) return std::nullopt;
    return number(key);
}

std::optional<int> RunConfig::optional_integer(std::string_view key) const {
    if (!is_set(key)) return std::nullopt;
    return integer(key);
}

std::filesystem::path RunConfig::path(std::string_view key) const {
    if (!is_set(key)) return {};
    std::filesystem::path p(raw(key));
    if (p.is_relative() && !base_dir_.empty()) p = base_dir_ / p;
    return p;
}

std::string RunConfig::echo() const {
    std::ostringstream os;
    for (const auto& key : kSchema) {
        if (key.name == "out_dir") continue;
        os << key.name << '=' << raw(key.name) << '\n';
    }
    return os.str();
}

void RunConfig::validate() const {
    (void)snapshot_config(*this);
    (void)surface_build_config(*this);
    (void)stress_coordinate(*this);
    (void)flag("heatmap");
    (void)parse_moneyness_axis(raw("moneyness_asset"));
    (void)parse_moneyness_axis(raw("moneyness_equity"));
    if (raw("maturities") != "auto") (void)parse_maturity_axis(raw("maturities"));
}

SnapshotSources snapshot_sources(const RunConfig& config) {
    SnapshotSources sources{config.path("chain"), config.path("closes"), config.path("rates"),
                            config.path("calendar")};
    if (sources.closes.empty()) throw ConfigError("config key 'closes' is required");
    if (sources.rates.empty()) throw ConfigError("config key 'rates' is required");
    return sources;
}

SnapshotConfig snapshot_config(const RunConfig& config) {
    SnapshotConfig out;
    const auto window = config.optional_integer("window_length");
    if (!window) throw ConfigError("config key 'window_length' is required");
    if (*window < 1) throw ConfigError("window_length must be at least 1");
    out.window_length = *window;
    out.asset_value = config.number("asset_value");
    if (!(out.asset_value > 0.0)) throw ConfigError("asset_value must be positive");
    if (config.is_set("as_of")) {
        out.as_of = parse_iso_date(config.raw("as_of"));
        if (!out.as_of) throw ConfigError("as_of needs an ISO date, got '" + config.raw("as_of") + "'");
    }
    out.rules.min_bid = config.number("min_bid");
    out.rules.max_maturity_days = config.integer("max_maturity_days");
    out.rules.min_strike_ratio = config.number("strike_band_min");
    out.rules.max_strike_ratio = config.number("strike_band_max");
    out.rules.winsor_percentile = config.number("winsor_percentile");
    if (!(out.rules.min_strike_ratio <= out.rules.max_strike_ratio))
        throw ConfigError("strike band is empty");
    if (!(out.rules.winsor_percentile > 0.0 && out.rules.winsor_percentile <= 1.0))
        throw ConfigError("winsor_percentile must lie in (0, 1]");
    return out;
}

CalibrationSettings calibration_settings(const RunConfig& config) {
    CalibrationSettings s;
    s.sigma_bounds = {config.number("sigma_min"), config.number("sigma_max")};
    s.drift_bounds = {config.number("drift_min"), config.number("drift_max")};
    s.probability_bounds = {config.number("prob_min"), config.number("prob_max")};
    s.sigma_tol = config.number("sigma_tol");
    s.drift_tol = config.number("drift_tol");
    s.probability_tol = config.number("prob_tol");
    s.scan_points = config.integer("scan_points");
    s.low_sensitivity_threshold = config.number("low_sensitivity");
    s.ambiguity_tol = config.number("ambiguity_tol");
    for (const Interval& b : {s.sigma_bounds, s.drift_bounds, s.probability_bounds})
        if (!(b.lower <= b.upper)) throw ConfigError("search bounds must satisfy min <= max");
    if (!(s.sigma_bounds.lower > 0.0)) throw ConfigError("sigma_min must be positive");
    if (!(s.probability_bounds.lower > 0.0 && s.probability_bounds.upper < 1.0))
        throw ConfigError("probability bounds must lie inside (0, 1)");
    if (!(s.sigma_tol > 0.0 && s.drift_tol > 0.0 && s.probability_tol > 0.0))
        throw ConfigError("tolerances must be positive");
    if (s.scan_points < 2) throw ConfigError("scan_points must be at least 2");
    return s;
}

SurfaceBuildConfig surface_build_config(const RunConfig& config, unsigned threads) {
    SurfaceBuildConfig out;
    out.settings = calibration_settings(config);
    out.fixed_drift = config.number("fixed_drift");
    out.fixed_up_probability = config.number("fixed_up_probability");
    if (!(out.fixed_up_probability > 0.0 && out.fixed_up_probability < 1.0))
        throw ConfigError("fixed_up_probability must lie in (0, 1)");
    out.vol_lookup_moneyness = config.number("vol_lookup_moneyness");
    out.vol_lookup_maturity = config.optional_integer("vol_lookup_maturity");
    out.sigma_override = config.optional_number("sigma_override");
    if (out.sigma_override && !(*out.sigma_override > 0.0)) throw ConfigError("sigma_override must be positive");
    try {
        out.mode = parse_return_mode(config.raw("tree_mode"));
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
    out.steps_per_day = config.integer("steps_per_day");
    if (out.steps_per_day < 1) throw ConfigError("steps_per_day must be at least 1");
    out.quote_moneyness_tolerance = config.number("quote_moneyness_tolerance");
    out.threads = threads;
    return out;
}

StressCoordinate stress_coordinate(const RunConfig& config) {
    return {config.number("stress_moneyness"), config.integer("stress_maturity")};
}

SurfaceAxes surface_axes(const RunConfig& config, CalibrationTask task, const MarketSnapshot& snapshot) {
    SurfaceAxes axes;
    axes.moneyness = parse_moneyness_axis(
        config.raw(task == CalibrationTask::EquityVol ? "moneyness_equity" : "moneyness_asset"));
    if (config.raw("maturities") != "auto") {
        axes.maturity_days = parse_maturity_axis(config.raw("maturities"));
        return axes;
    }
    const int cap = config.integer("max_maturity_days");
    for (const auto& q : snapshot.quotes) {
        const int days = q.maturity_days();
        if (days > 0 && days <= cap) axes.maturity_days.push_back(days);
    }
    std::sort(axes.maturity_days.begin(), axes.maturity_days.end());
    axes.maturity_days.erase(std::unique(axes.maturity_days.begin(), axes.maturity_days.end()),
                             axes.maturity_days.end());
    if (axes.maturity_days.empty())
        throw DataError("maturities=auto needs at least one cleaned option quote");
    return axes;
}

}  // namespace merton
