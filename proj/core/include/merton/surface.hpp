#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "merton/calibration.hpp"
#include "merton/market_data.hpp"

namespace merton {

enum class SurfaceKind { AssetVol, EquityVol, Drift, UpProb, DownsideProb, Diff, RelDiff };

std::string_view to_string(SurfaceKind kind) noexcept;
SurfaceKind parse_surface_kind(std::string_view text);

/// Per-cell quality markers; combined as a bitmask.
enum CellFlag : std::uint8_t {
    kFlagNone = 0,
    kFlagBoundary = 1 << 0,         // B: solution at a search bound
    kFlagInfeasible = 1 << 1,       // I: no feasible risk-neutral probability
    kFlagLowSensitivity = 1 << 2,   // L: model price barely moves with the parameter
    kFlagNoData = 1 << 3,           // N: no observation for the cell
    kFlagZeroDenominator = 1 << 4,  // Z: relative difference against zero
    kFlagAmbiguous = 1 << 5,        // A: another parameter value fits as well
};

/// "B|L" style codes; "-" for an unflagged cell.
std::string flag_codes(std::uint8_t flags);
std::uint8_t parse_flag_codes(std::string_view codes);

/// Values over (maturity, moneyness), stored row-major with one row per maturity.
/// Moneyness is K/V_0 for asset-side surfaces and K/S_0 for equity surfaces.
struct SurfaceGrid {
    SurfaceKind kind = SurfaceKind::AssetVol;
    std::vector<double> moneyness;   // strictly increasing, > 0
    std::vector<int> maturity_days;  // strictly increasing, > 0
    std::vector<double> values;
    std::vector<double> residuals;
    std::vector<std::uint8_t> flags;
    std::vector<std::pair<std::string, std::string>> metadata;

    static SurfaceGrid blank(SurfaceKind kind, std::vector<double> moneyness, std::vector<int> maturity_days);

    std::size_t rows() const noexcept { return maturity_days.size(); }
    std::size_t cols() const noexcept { return moneyness.size(); }
    std::size_t index(std::size_t row, std::size_t col) const noexcept { return row * cols() + col; }
    bool empty() const noexcept { return values.empty(); }

    double value(std::size_t row, std::size_t col) const { return values.at(index(row, col)); }

    std::optional<std::string> meta(std::string_view key) const;
    void set_meta(std::string key, std::string value);

    /// Throws InvalidArgument on shape or axis-order violations.
    void validate() const;

    friend bool operator==(const SurfaceGrid&, const SurfaceGrid&) = default;
};

struct SurfaceAxes {
    std::vector<double> moneyness;
    std::vector<int> maturity_days;
};

enum class CalibrationTask { AssetVol, EquityVol, Drift, UpProb };

std::string_view to_string(CalibrationTask task) noexcept;
CalibrationTask parse_calibration_task(std::string_view text);

struct SurfaceBuildConfig {
    CalibrationSettings settings;
    double fixed_drift = 0.08;          // held during the up-probability fit
    double fixed_up_probability = 0.5;  // held during the drift fit
    double vol_lookup_moneyness = 0.01;
    std::optional<int> vol_lookup_maturity;  // nullopt: the cell's own maturity
    std::optional<double> sigma_override;    // replaces the asset-vol lookup
    ReturnMode mode = ReturnMode::Log;
    int steps_per_day = 1;
    double quote_moneyness_tolerance = 0.005;
    unsigned threads = 0;  // 0: hardware concurrency
};

/// Calibrates every cell of the grid. Tree tasks (Drift, UpProb) read the
/// volatility from `asset_vol` unless `sigma_override` is set, and use the
/// close L - T trading days before the as-of date as the observed price for
/// maturity T. Results do not depend on the thread count.
SurfaceGrid build_surface(const MarketSnapshot& snapshot, const SurfaceAxes& axes, CalibrationTask task,
                          const SurfaceBuildConfig& config, const SurfaceGrid* asset_vol = nullptr);

/// Cellwise a - b over identical axes; any flagged input cell flags the output.
SurfaceGrid diff_surface(const SurfaceGrid& a, const SurfaceGrid& b);
/// Cellwise (a - b) / b; zero-denominator cells are flagged Z and left NaN.
SurfaceGrid relative_diff_surface(const SurfaceGrid& a, const SurfaceGrid& b);
/// 1 - p for every cell of an UP_PROB surface.
SurfaceGrid downside_surface(const SurfaceGrid& up_probability);

struct SurfaceCell {
    std::size_t row;
    std::size_t col;
    bool exact;
};

/// Nearest grid cell by moneyness, then maturity (ties to the lower index).
SurfaceCell nearest_cell(const SurfaceGrid& surface, double moneyness, int maturity_days);

struct SurfaceStats {
    std::size_t cells = 0;
    std::size_t flagged = 0;
    std::size_t used = 0;  // unflagged finite cells
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
};

/// Statistics over unflagged finite cells.
SurfaceStats summarize(const SurfaceGrid& surface);

/// a:b:step inclusive range with values rounded to 10 decimals, or a comma list.
std::vector<double> parse_moneyness_axis(std::string_view text);
std::vector<int> parse_maturity_axis(std::string_view text);

}  // namespace merton
