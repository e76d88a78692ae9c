#include "merton/stress.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "merton/errors.hpp"

namespace merton {

std::string_view to_string(StressAction action) noexcept {
    switch (action) {
        case StressAction::Reduce: return "REDUCE";
        case StressAction::Hold: return "HOLD";
        case StressAction::Increase: return "INCREASE";
    }
    return "UNKNOWN";
}

StressAction classify_signal(double probability) {
    if (!(probability >= 0.0 && probability <= 1.0))
        throw InvalidArgument("downside probability " + std::to_string(probability) + " outside [0, 1]");
    if (probability > kReduceAbove) return StressAction::Reduce;
    if (probability < kIncreaseBelow) return StressAction::Increase;
    return StressAction::Hold;
}

StressReading stress_metric(const SurfaceGrid& downside, StressCoordinate coordinate) {
    if (downside.empty()) throw InvalidArgument("stress metric on an empty surface");
    if (downside.kind != SurfaceKind::DownsideProb)
        throw InvalidArgument("stress metric reads a DOWNSIDE_PROB surface, got " +
                              std::string(to_string(downside.kind)));
    const SurfaceCell cell = nearest_cell(downside, coordinate.moneyness, coordinate.maturity_days);
    const std::size_t i = downside.index(cell.row, cell.col);
    const double value = downside.values[i];
    return {
        .value = value,
        .requested = coordinate,
        .used = {downside.moneyness[cell.col], downside.maturity_days[cell.row]},
        .nearest = !cell.exact,
        .reliable = downside.flags[i] == kFlagNone && std::isfinite(value),
    };
}

std::vector<StressSignal> signal_series(std::vector<std::pair<Date, SurfaceGrid>> surfaces,
                                        StressCoordinate coordinate) {
    std::sort(surfaces.begin(), surfaces.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < surfaces.size(); ++i)
        if (surfaces[i].first == surfaces[i - 1].first)
            throw DataError("two stress surfaces dated " + format_iso_date(surfaces[i].first));

    std::vector<StressSignal> series;
    series.reserve(surfaces.size());
    for (const auto& [date, surface] : surfaces) {
        const StressReading reading = stress_metric(surface, coordinate);
        const bool usable = std::isfinite(reading.value);
        series.push_back({
            .as_of = date,
            .downside_probability = reading.value,
            .action = usable ? classify_signal(reading.value) : StressAction::Hold,
            .reading = reading,
        });
    }
    return series;
}

std::string to_signal_text(const std::vector<StressSignal>& series) {
    std::ostringstream os;
    os << "date,probability,action,reliable\n";
    for (const auto& s : series) {
        char prob[40];
        if (std::isfinite(s.downside_probability))
            std::snprintf(prob, sizeof prob, "%.10g", s.downside_probability);
        else
            std::snprintf(prob, sizeof prob, "nan");
        os << format_iso_date(s.as_of) << ',' << prob << ',' << to_string(s.action) << ','
           << (s.reading.reliable ? "yes" : "no") << '\n';
    }
    return os.str();
}

}  // namespace merton
