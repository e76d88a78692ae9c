#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "merton/market_data.hpp"
#include "merton/stress.hpp"
#include "merton/surface.hpp"

// Flat "key = value" run configuration. Lines starting with '#' are comments;
// unknown or repeated keys are errors. Relative paths resolve against the
// directory of the config file. Every key has a default (empty means unset).

namespace merton {

struct ConfigKey {
    std::string_view name;
    std::string_view default_value;
    std::string_view help;
};

/// All recognized keys in echo order.
std::span<const ConfigKey> config_schema();

class RunConfig {
public:
    RunConfig();

    static RunConfig parse(std::istream& in, const std::filesystem::path& base_dir = {});
    static RunConfig load(const std::filesystem::path& path);

    /// Throws ConfigError for an unknown key.
    void set(std::string_view key, std::string value);

    const std::string& raw(std::string_view key) const;
    bool is_set(std::string_view key) const { return !raw(key).empty(); }

    double number(std::string_view key) const;
    int integer(std::string_view key) const;
    bool flag(std::string_view key) const;
    std::optional<double> optional_number(std::string_view key) const;
    std::optional<int> optional_integer(std::string_view key) const;
    /// Empty when unset; relative values are joined to the config directory.
    std::filesystem::path path(std::string_view key) const;

    /// "key=value" per line, schema order. out_dir is omitted so outputs do
    /// not depend on where they were written.
    std::string echo() const;

    /// Parses every typed key once; throws ConfigError on the first bad value.
    void validate() const;

    const std::filesystem::path& base_dir() const noexcept { return base_dir_; }

private:
    std::map<std::string, std::string, std::less<>> values_;
    std::filesystem::path base_dir_;
};

SnapshotSources snapshot_sources(const RunConfig& config);
SnapshotConfig snapshot_config(const RunConfig& config);
CalibrationSettings calibration_settings(const RunConfig& config);
SurfaceBuildConfig surface_build_config(const RunConfig& config, unsigned threads = 0);
StressCoordinate stress_coordinate(const RunConfig& config);

/// Axes for a task: the asset or equity moneyness grid and either the listed
/// maturities or, for "auto", the distinct maturities of the cleaned chain.
SurfaceAxes surface_axes(const RunConfig& config, CalibrationTask task, const MarketSnapshot& snapshot);

}  // namespace merton
