#pragma once

#include "merton/binomial.hpp"
#include "merton/market_data.hpp"
#include "merton/optimize.hpp"

// One-parameter calibrations, each minimizing the squared relative pricing
// error ((model(x) - observed) / observed)^2 over a bounded interval:
//
//   implied_asset_vol       BSM call on V_0 against the equity level S_0
//   implied_equity_vol      BSM call on S_0 against a quoted option price
//   implied_drift           tree price in mu, with p and sigma held fixed
//   implied_up_probability  tree price in p, with mu and sigma held fixed
//
// Tree points with an infeasible risk-neutral probability score +inf. Tree
// prices depend on mu and p only through lattice effects, so several values
// can fit the same price; such fits are reported as ambiguous.

namespace merton {

struct CalibrationSettings {
    Interval sigma_bounds{1e-4, 5.0};
    Interval drift_bounds{-5.0, 5.0};
    Interval probability_bounds{0.01, 0.99};
    double sigma_tol = 1e-8;
    double drift_tol = 1e-6;
    double probability_tol = 1e-6;
    int scan_points = 64;
    /// |d(model)/d(param)| / observed below this marks the fit as low-sensitivity.
    double low_sensitivity_threshold = 1e-8;
    /// Tree fits: another basin within this objective of the best marks the
    /// fit ambiguous. 0 disables the search.
    double ambiguity_tol = 1e-12;
};

/// Parameters held constant during a tree calibration.
struct TreeFixedParams {
    double volatility = 0.0;
    double drift = 0.08;
    double up_probability = 0.5;
    int steps = 0;  // 0: one step per calendar day of maturity
    ReturnMode mode = ReturnMode::Log;
};

struct CalibrationTarget {
    double observed_price;    // S_0, S_t or a quoted option price; > 0
    double underlying_value;  // V_0 or S_0
    double strike;
    double maturity_years;
    double rate;              // continuously compounded, annualized
    TreeFixedParams fixed{};  // tree calibrations only
};

struct CalibrationResult {
    double fitted_value = 0.0;
    double objective = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool boundary_hit = false;
    /// Relative sensitivity d(model)/d(param) / observed at the solution.
    double sensitivity = 0.0;
    bool low_sensitivity = false;
    bool feasible = true;
    /// Another parameter value reproduces the price about as well.
    bool ambiguous = false;
    double alternative_value = 0.0;
};

CalibrationResult implied_asset_vol(const CalibrationTarget& target, const CalibrationSettings& settings = {});
CalibrationResult implied_equity_vol(const CalibrationTarget& target, const CalibrationSettings& settings = {});

/// Builds an equity-vol target from a quote, refusing quotes that fail the
/// cleaning filters. Maturity is measured from the quote date.
CalibrationTarget equity_target(const OptionQuote& quote, double spot, double rate,
                                const CleaningRules& rules = {});

/// Throws CalibrationInfeasible when no point of the interval is feasible.
CalibrationResult implied_drift(const CalibrationTarget& target, const CalibrationSettings& settings = {});
CalibrationResult implied_up_probability(const CalibrationTarget& target,
                                         const CalibrationSettings& settings = {});

/// Tree parameters a tree calibration evaluates at a trial drift / probability.
TreeParams tree_params_for(const CalibrationTarget& target, double drift, double up_probability);

}  // namespace merton
