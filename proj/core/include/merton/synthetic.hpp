#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "merton/dates.hpp"

// Seeded synthetic market fixture with known ground truth.
//
//   chain.csv              BSM option prices on the equity at a single vol
//   closes.csv             weekday closes ending with the five-day sample below
//   rates.csv              annual yields with gaps and one blank value
//   calendar.txt           weekdays spanning the history and the option expiries
//   table1_closes.csv      the five-close sample on its own
//   selfgen_closes.csv     closes replaced by tree prices at a known p
//   selfgen_drift_closes.csv  closes replaced by tree prices at a known mu
//   ground_truth.txt       generator parameters
//   config*.txt            ready-to-run configurations
//
// Output is a pure function of the options.

namespace merton {

struct SynthesisOptions {
    std::uint64_t seed = 42;
    int history_days = 420;  // weekday closes, blank row excluded
    int window_length = 400;
    double equity_vol = 0.2;
    double asset_value = 1e12;
    double tree_vol = 0.2;
    double fixed_drift = 0.08;
    double fixed_up_probability = 0.5;
    double selfgen_moneyness = 0.9;
    double selfgen_up_probability = 0.35;
    double selfgen_drift = 0.15;
};

/// The five closes of the sample week ending on the as-of date.
std::vector<std::pair<Date, double>> table1_closes();

/// Maturities (days) of the generated chain; all land on weekdays.
std::vector<int> synthetic_maturities();

/// File name and content for every fixture file, in a fixed order.
std::vector<std::pair<std::string, std::string>> synthesize_fixture(const SynthesisOptions& options);

/// Writes the fixture into `dir`, creating it if needed. Returns the paths written.
std::vector<std::filesystem::path> write_fixture(const SynthesisOptions& options, const std::filesystem::path& dir);

}  // namespace merton
