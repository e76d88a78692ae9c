#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "merton/dates.hpp"
#include "merton/surface.hpp"

namespace merton {

enum class StressAction { Reduce, Hold, Increase };

std::string_view to_string(StressAction action) noexcept;

inline constexpr double kReduceAbove = 0.80;
inline constexpr double kIncreaseBelow = 0.60;

/// REDUCE above 0.80, INCREASE below 0.60, HOLD otherwise (both cut points
/// included in HOLD). Throws InvalidArgument outside [0, 1].
StressAction classify_signal(double probability);

struct StressCoordinate {
    double moneyness = 0.9;
    int maturity_days = 30;
};

struct StressReading {
    double value;
    StressCoordinate requested;
    StressCoordinate used;  // grid cell actually read
    bool nearest;           // true when `used` differs from `requested`
    bool reliable;          // false when the cell is flagged or missing
};

/// Reads a DOWNSIDE_PROB surface at the coordinate, falling back to the
/// nearest cell.
StressReading stress_metric(const SurfaceGrid& downside, StressCoordinate coordinate = {});

struct StressSignal {
    Date as_of;
    double downside_probability;
    StressAction action;
    StressReading reading;
};

/// One signal per date in chronological order. Throws DataError on a
/// repeated date. A missing value yields HOLD with reading.reliable = false.
std::vector<StressSignal> signal_series(std::vector<std::pair<Date, SurfaceGrid>> surfaces,
                                        StressCoordinate coordinate = {});

/// date,probability,action,reliable
std::string to_signal_text(const std::vector<StressSignal>& series);

}  // namespace merton
