#include "merton/surface.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "csv.hpp"
#include "merton/errors.hpp"
#include "parallel.hpp"

namespace merton {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string format_number(double x) {
    std::ostringstream os;
    os.precision(10);
    os << x;
    return os.str();
}

}  // namespace

std::string_view to_string(SurfaceKind kind) noexcept {
    switch (kind) {
        case SurfaceKind::AssetVol: return "ASSET_VOL";
        case SurfaceKind::EquityVol: return "EQUITY_VOL";
        case SurfaceKind::Drift: return "DRIFT";
        case SurfaceKind::UpProb: return "UP_PROB";
        case SurfaceKind::DownsideProb: return "DOWNSIDE_PROB";
        case SurfaceKind::Diff: return "DIFF";
        case SurfaceKind::RelDiff: return "REL_DIFF";
    }
    return "UNKNOWN";
}

SurfaceKind parse_surface_kind(std::string_view text) {
    for (auto kind : {SurfaceKind::AssetVol, SurfaceKind::EquityVol, SurfaceKind::Drift, SurfaceKind::UpProb,
                      SurfaceKind::DownsideProb, SurfaceKind::Diff, SurfaceKind::RelDiff}) {
        if (to_string(kind) == text) return kind;
    }
    throw DataError("unknown surface kind '" + std::string(text) + "'");
}

std::string flag_codes(std::uint8_t flags) {
    static constexpr std::pair<std::uint8_t, char> kCodes[] = {
        {kFlagBoundary, 'B'}, {kFlagInfeasible, 'I'}, {kFlagLowSensitivity, 'L'},
        {kFlagNoData, 'N'},   {kFlagZeroDenominator, 'Z'},   {kFlagAmbiguous, 'A'},
    };
    std::string out;
    for (const auto& [bit, code] : kCodes) {
        if (flags & bit) {
            if (!out.empty()) out += '|';
            out += code;
        }
    }
    return out.empty() ? "-" : out;
}

std::uint8_t parse_flag_codes(std::string_view codes) {
    std::uint8_t flags = kFlagNone;
    if (codes == "-" || codes.empty()) return flags;
    for (const char c : codes) {
        switch (c) {
            case 'B': flags |= kFlagBoundary; break;
            case 'I': flags |= kFlagInfeasible; break;
            case 'L': flags |= kFlagLowSensitivity; break;
            case 'N': flags |= kFlagNoData; break;
            case 'Z': flags |= kFlagZeroDenominator; break;
            case 'A': flags |= kFlagAmbiguous; break;
            case '|': break;
            default: throw DataError("unknown flag code '" + std::string(1, c) + "'");
        }
    }
    return flags;
}

SurfaceGrid SurfaceGrid::blank(SurfaceKind kind, std::vector<double> moneyness, std::vector<int> maturity_days) {
    SurfaceGrid grid;
    grid.kind = kind;
    grid.moneyness = std::move(moneyness);
    grid.maturity_days = std::move(maturity_days);
    const std::size_t n = grid.rows() * grid.cols();
    grid.values.assign(n, kNaN);
    grid.residuals.assign(n, kNaN);
    grid.flags.assign(n, kFlagNone);
    return grid;
}

std::optional<std::string> SurfaceGrid::meta(std::string_view key) const {
    for (const auto& [k, v] : metadata)
        if (k == key) return v;
    return std::nullopt;
}

void SurfaceGrid::set_meta(std::string key, std::string value) {
    for (auto& [k, v] : metadata) {
        if (k == key) {
            v = std::move(value);
            return;
        }
    }
    metadata.emplace_back(std::move(key), std::move(value));
}

void SurfaceGrid::validate() const {
    const std::size_t n = rows() * cols();
    if (values.size() != n || residuals.size() != n || flags.size() != n)
        throw InvalidArgument("surface matrices do not match the axes");
    for (std::size_t i = 0; i < moneyness.size(); ++i) {
        if (!(moneyness[i] > 0.0)) throw InvalidArgument("moneyness axis must be positive");
        if (i > 0 && !(moneyness[i] > moneyness[i - 1]))
            throw InvalidArgument("moneyness axis must be strictly increasing");
    }
    for (std::size_t i = 0; i < maturity_days.size(); ++i) {
        if (maturity_days[i] <= 0) throw InvalidArgument("maturity axis must be positive");
        if (i > 0 && maturity_days[i] <= maturity_days[i - 1])
            throw InvalidArgument("maturity axis must be strictly increasing");
    }
}

std::string_view to_string(CalibrationTask task) noexcept {
    switch (task) {
        case CalibrationTask::AssetVol: return "asset-vol";
        case CalibrationTask::EquityVol: return "equity-vol";
        case CalibrationTask::Drift: return "drift";
        case CalibrationTask::UpProb: return "prob";
    }
    return "unknown";
}

CalibrationTask parse_calibration_task(std::string_view text) {
    for (auto task : {CalibrationTask::AssetVol, CalibrationTask::EquityVol, CalibrationTask::Drift,
                      CalibrationTask::UpProb}) {
        if (to_string(task) == text) return task;
    }
    throw UsageError("unknown calibration task '" + std::string(text) + "' (asset-vol|equity-vol|drift|prob)");
}

SurfaceCell nearest_cell(const SurfaceGrid& surface, double moneyness, int maturity_days) {
    if (surface.empty()) throw InvalidArgument("lookup on an empty surface");
    std::size_t col = 0;
    for (std::size_t c = 1; c < surface.cols(); ++c)
        if (std::abs(surface.moneyness[c] - moneyness) < std::abs(surface.moneyness[col] - moneyness)) col = c;
    std::size_t row = 0;
    for (std::size_t r = 1; r < surface.rows(); ++r)
        if (std::abs(surface.maturity_days[r] - maturity_days) < std::abs(surface.maturity_days[row] - maturity_days))
            row = r;
    const bool exact = surface.moneyness[col] == moneyness && surface.maturity_days[row] == maturity_days;
    return {row, col, exact};
}

namespace {

struct CellOutcome {
    double value = kNaN;
    double residual = kNaN;
    std::uint8_t flags = kFlagNone;
};

CellOutcome from_result(const CalibrationResult& r) {
    CellOutcome out{r.fitted_value, r.objective, kFlagNone};
    if (r.boundary_hit) out.flags |= kFlagBoundary;
    if (r.low_sensitivity) out.flags |= kFlagLowSensitivity;
    if (!r.feasible) out.flags |= kFlagInfeasible;
    if (r.ambiguous) out.flags |= kFlagAmbiguous;
    return out;
}

CellOutcome no_data() { return {kNaN, kNaN, kFlagNoData}; }

const OptionQuote* find_quote(const MarketSnapshot& snap, int maturity_days, double moneyness, double tolerance) {
    const OptionQuote* best = nullptr;
    double best_gap = tolerance;
    for (const auto& q : snap.quotes) {
        if (q.maturity_days() != maturity_days) continue;
        const double gap = std::abs(q.strike / snap.equity_close - moneyness);
        if (gap > best_gap) continue;
        const bool better = best == nullptr || gap < best_gap ||
                            (gap == best_gap && (q.quote_date > best->quote_date ||
                                                 (q.quote_date == best->quote_date && q.strike < best->strike)));
        if (better) {
            best = &q;
            best_gap = gap;
        }
    }
    return best;
}

double lookup_sigma(const SurfaceGrid& asset_vol, const SurfaceBuildConfig& config, int maturity_days) {
    const int lookup_maturity = config.vol_lookup_maturity.value_or(maturity_days);
    const SurfaceCell cell = nearest_cell(asset_vol, config.vol_lookup_moneyness, lookup_maturity);
    return asset_vol.value(cell.row, cell.col);
}

}  // namespace

SurfaceGrid build_surface(const MarketSnapshot& snapshot, const SurfaceAxes& axes, CalibrationTask task,
                          const SurfaceBuildConfig& config, const SurfaceGrid* asset_vol) {
    if (axes.moneyness.empty() || axes.maturity_days.empty()) throw InvalidArgument("surface axes are empty");
    const bool tree_task = task == CalibrationTask::Drift || task == CalibrationTask::UpProb;
    if (tree_task && !config.sigma_override) {
        if (asset_vol == nullptr || asset_vol->empty())
            throw DependencyError(std::string(to_string(task)) + " calibration needs an asset-vol surface");
        if (asset_vol->kind != SurfaceKind::AssetVol)
            throw DependencyError("volatility source is not an ASSET_VOL surface");
    }
    if (config.steps_per_day < 1) throw ConfigError("steps_per_day must be at least 1");

    const SurfaceKind kind = task == CalibrationTask::AssetVol    ? SurfaceKind::AssetVol
                             : task == CalibrationTask::EquityVol ? SurfaceKind::EquityVol
                             : task == CalibrationTask::Drift     ? SurfaceKind::Drift
                                                                  : SurfaceKind::UpProb;
    SurfaceGrid grid = SurfaceGrid::blank(kind, axes.moneyness, axes.maturity_days);
    grid.validate();

    const std::size_t window = snapshot.close_history.size();
    auto cell = [&](std::size_t row, std::size_t col) -> CellOutcome {
        const int days = grid.maturity_days[row];
        const double m = grid.moneyness[col];
        const double years = days / 365.0;
        switch (task) {
            case CalibrationTask::AssetVol: {
                const CalibrationTarget target{snapshot.equity_close, snapshot.asset_value, m * snapshot.asset_value,
                                               years, snapshot.as_of_rate()};
                return from_result(implied_asset_vol(target, config.settings));
            }
            case CalibrationTask::EquityVol: {
                const OptionQuote* quote = find_quote(snapshot, days, m, config.quote_moneyness_tolerance);
                if (quote == nullptr || !(quote->mid > 0.0)) return no_data();
                const CalibrationTarget target{quote->mid, snapshot.equity_close, quote->strike, years,
                                               snapshot.as_of_rate()};
                return from_result(implied_equity_vol(target, config.settings));
            }
            case CalibrationTask::Drift:
            case CalibrationTask::UpProb: {
                // Option written L - T closes before as-of, expiring T days later.
                if (static_cast<std::size_t>(days) >= window) return no_data();
                const ClosePoint& observed = snapshot.close_history[window - 1 - static_cast<std::size_t>(days)];
                const double sigma =
                    config.sigma_override ? *config.sigma_override : lookup_sigma(*asset_vol, config, days);
                if (!(sigma > 0.0) || !std::isfinite(sigma)) return no_data();
                CalibrationTarget target{observed.adjusted_close, snapshot.asset_value, m * snapshot.asset_value,
                                         years, snapshot.rate_on(observed.date)};
                target.fixed = {.volatility = sigma,
                                .drift = config.fixed_drift,
                                .up_probability = config.fixed_up_probability,
                                .steps = days * config.steps_per_day,
                                .mode = config.mode};
                try {
                    return from_result(task == CalibrationTask::Drift
                                           ? implied_drift(target, config.settings)
                                           : implied_up_probability(target, config.settings));
                } catch (const CalibrationInfeasible&) {
                    return {kNaN, kNaN, kFlagInfeasible};
                }
            }
        }
        return no_data();
    };

    const std::size_t cols = grid.cols();
    detail::parallel_for(grid.values.size(), config.threads, [&](std::size_t i) {
        const CellOutcome out = cell(i / cols, i % cols);
        grid.values[i] = out.value;
        grid.residuals[i] = out.residual;
        grid.flags[i] = out.flags;
    });

    grid.set_meta("as_of", format_iso_date(snapshot.as_of));
    grid.set_meta("asset_value", format_number(snapshot.asset_value));
    grid.set_meta("equity_close", format_number(snapshot.equity_close));
    if (tree_task) {
        grid.set_meta("tree_mode", std::string(to_string(config.mode)));
        grid.set_meta("steps_per_day", std::to_string(config.steps_per_day));
        if (task == CalibrationTask::Drift)
            grid.set_meta("fixed_up_probability", format_number(config.fixed_up_probability));
        else
            grid.set_meta("fixed_drift", format_number(config.fixed_drift));
        grid.set_meta("vol_source", config.sigma_override
                                        ? "constant " + format_number(*config.sigma_override)
                                        : "asset-vol surface at M=" + format_number(config.vol_lookup_moneyness));
    }
    return grid;
}

namespace {

void require_same_axes(const SurfaceGrid& a, const SurfaceGrid& b) {
    a.validate();
    b.validate();
    if (a.moneyness != b.moneyness || a.maturity_days != b.maturity_days)
        throw InvalidArgument("surfaces have different axes; interpolation is not supported");
}

bool is_vol_kind(SurfaceKind kind) { return kind == SurfaceKind::AssetVol || kind == SurfaceKind::EquityVol; }

}  // namespace

SurfaceGrid diff_surface(const SurfaceGrid& a, const SurfaceGrid& b) {
    require_same_axes(a, b);
    if (!is_vol_kind(a.kind) || !is_vol_kind(b.kind))
        throw InvalidArgument("difference surfaces are defined between volatility surfaces");
    SurfaceGrid out = SurfaceGrid::blank(SurfaceKind::Diff, a.moneyness, a.maturity_days);
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        out.values[i] = a.values[i] - b.values[i];
        out.flags[i] = a.flags[i] | b.flags[i];
    }
    out.set_meta("minuend", std::string(to_string(a.kind)));
    out.set_meta("subtrahend", std::string(to_string(b.kind)));
    return out;
}

SurfaceGrid relative_diff_surface(const SurfaceGrid& a, const SurfaceGrid& b) {
    require_same_axes(a, b);
    if (!is_vol_kind(a.kind) || !is_vol_kind(b.kind))
        throw InvalidArgument("relative difference surfaces are defined between volatility surfaces");
    SurfaceGrid out = SurfaceGrid::blank(SurfaceKind::RelDiff, a.moneyness, a.maturity_days);
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        out.flags[i] = a.flags[i] | b.flags[i];
        if (b.values[i] == 0.0) {
            out.flags[i] |= kFlagZeroDenominator;
            continue;
        }
        out.values[i] = (a.values[i] - b.values[i]) / b.values[i];
    }
    out.set_meta("numerator", std::string(to_string(a.kind)));
    out.set_meta("denominator", std::string(to_string(b.kind)));
    return out;
}

SurfaceGrid downside_surface(const SurfaceGrid& up_probability) {
    up_probability.validate();
    if (up_probability.kind != SurfaceKind::UpProb)
        throw InvalidArgument("downside probability is the complement of an UP_PROB surface");
    SurfaceGrid out = up_probability;
    out.kind = SurfaceKind::DownsideProb;
    for (double& v : out.values) v = 1.0 - v;
    return out;
}

SurfaceStats summarize(const SurfaceGrid& surface) {
    SurfaceStats stats;
    stats.cells = surface.values.size();
    double sum = 0.0;
    for (std::size_t i = 0; i < surface.values.size(); ++i) {
        const double v = surface.values[i];
        if (surface.flags[i] != kFlagNone) {
            ++stats.flagged;
            continue;
        }
        if (!std::isfinite(v)) continue;
        if (stats.used == 0) {
            stats.min = stats.max = v;
        } else {
            stats.min = std::min(stats.min, v);
            stats.max = std::max(stats.max, v);
        }
        sum += v;
        ++stats.used;
    }
    if (stats.used > 0) stats.mean = sum / static_cast<double>(stats.used);
    return stats;
}

std::vector<double> parse_moneyness_axis(std::string_view text) {
    text = csv::trim(text);
    std::vector<double> axis;
    const auto parts = csv::split(text, ':');
    if (parts.size() == 3) {
        const auto lo = csv::parse_double(parts[0]);
        const auto hi = csv::parse_double(parts[1]);
        const auto step = csv::parse_double(parts[2]);
        if (!lo || !hi || !step || !(*step > 0.0) || *hi < *lo)
            throw ConfigError("bad moneyness range '" + std::string(text) + "'");
        const auto count = static_cast<long>(std::floor((*hi - *lo) / *step + 1e-9)) + 1;
        for (long i = 0; i < count; ++i) axis.push_back(std::round((*lo + i * *step) * 1e10) / 1e10);
    } else {
        for (const auto& item : csv::split(text, ',')) {
            const auto v = csv::parse_double(item);
            if (!v) throw ConfigError("bad moneyness value '" + item + "'");
            axis.push_back(*v);
        }
    }
    for (std::size_t i = 0; i < axis.size(); ++i)
        if (!(axis[i] > 0.0) || (i > 0 && !(axis[i] > axis[i - 1])))
            throw ConfigError("moneyness axis must be positive and strictly increasing");
    return axis;
}

std::vector<int> parse_maturity_axis(std::string_view text) {
    std::vector<int> axis;
    for (const auto& item : csv::split(csv::trim(text), ',')) {
        int v = 0;
        auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (ec != std::errc{} || ptr != item.data() + item.size() || v <= 0)
            throw ConfigError("bad maturity '" + item + "'");
        axis.push_back(v);
    }
    for (std::size_t i = 1; i < axis.size(); ++i)
        if (axis[i] <= axis[i - 1]) throw ConfigError("maturity axis must be strictly increasing");
    return axis;
}

}  // namespace merton
