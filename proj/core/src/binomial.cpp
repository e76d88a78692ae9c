#include "merton/binomial.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "merton/errors.hpp"

namespace merton {

std::string_view to_string(ReturnMode mode) noexcept {
    return mode == ReturnMode::Log ? "log" : "arithmetic";
}

ReturnMode parse_return_mode(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "log") return ReturnMode::Log;
    if (lower == "arithmetic") return ReturnMode::Arithmetic;
    throw InvalidArgument("unknown return mode '" + std::string(text) + "' (expected log|arithmetic)");
}

void validate(const TreeParams& params) {
    if (!(params.up_probability > 0.0 && params.up_probability < 1.0))
        throw InvalidArgument("up probability must lie in (0, 1)");
    if (params.steps < 1) throw InvalidArgument("tree needs at least one step");
    if (!(params.step_years > 0.0) || !std::isfinite(params.step_years))
        throw InvalidArgument("step length must be positive");
    if (!(params.volatility > 0.0) || !std::isfinite(params.volatility))
        throw InvalidArgument("tree volatility must be positive");
    if (!std::isfinite(params.drift) || !std::isfinite(params.rate))
        throw InvalidArgument("drift and rate must be finite");
}

TreeParams tree_params_for_maturity(int maturity_days, int steps_per_day, double drift, double volatility,
                                    double up_probability, double rate, ReturnMode mode) {
    if (maturity_days < 1) throw InvalidArgument("maturity must be at least one day");
    if (steps_per_day < 1) throw InvalidArgument("steps per day must be at least one");
    const int steps = maturity_days * steps_per_day;
    return {
        .drift = drift,
        .volatility = volatility,
        .up_probability = up_probability,
        .rate = rate,
        .step_years = (maturity_days / 365.0) / steps,
        .steps = steps,
        .mode = mode,
    };
}

StepReturns derive_step_returns(const TreeParams& params) {
    validate(params);
    const double p = params.up_probability;
    const double sqrt_dt = std::sqrt(params.step_years);
    const double mean = params.drift * params.step_years;
    const double up = mean + params.volatility * std::sqrt((1.0 - p) / p) * sqrt_dt;
    const double down = mean - params.volatility * std::sqrt(p / (1.0 - p)) * sqrt_dt;

    if (params.mode == ReturnMode::Arithmetic) {
        if (down <= -1.0)
            throw NegativePriceError("arithmetic down return " + std::to_string(down) +
                                     " leaves a non-positive asset price");
        return {up, down, 1.0 + up, 1.0 + down, 1.0 + params.rate * params.step_years};
    }
    return {up, down, std::exp(up), std::exp(down), std::exp(params.rate * params.step_years)};
}

RiskNeutralStep risk_neutral_unchecked(const TreeParams& params) {
    validate(params);
    const double p = params.up_probability;
    const double theta = (params.drift - params.rate) / params.volatility;
    const double pricing_theta =
        params.mode == ReturnMode::Log ? theta + 0.5 * params.volatility : theta;
    const double q = p - pricing_theta * std::sqrt(p * (1.0 - p) * params.step_years);
    const double gross_rate = params.mode == ReturnMode::Log ? std::exp(params.rate * params.step_years)
                                                             : 1.0 + params.rate * params.step_years;
    return {q, theta, pricing_theta, gross_rate};
}

RiskNeutralStep derive_risk_neutral(const TreeParams& params) {
    const RiskNeutralStep step = risk_neutral_unchecked(params);
    if (!(step.q >= 0.0 && step.q <= 1.0))
        throw RiskNeutralInfeasible(step.q, "risk-neutral probability q = " + std::to_string(step.q) +
                                                " outside [0, 1]");
    return step;
}

Interval feasible_drift_range(const TreeParams& params) {
    validate(params);
    const double p = params.up_probability;
    const double sigma = params.volatility;
    const double dt = params.step_years;
    const double s = std::sqrt(p * (1.0 - p) * dt);
    const double shift = params.mode == ReturnMode::Log ? 0.5 * sigma : 0.0;
    // q = p - (theta + shift) * s with theta = (mu - r) / sigma.
    Interval range{params.rate + sigma * ((p - 1.0) / s - shift), params.rate + sigma * (p / s - shift)};
    if (params.mode == ReturnMode::Arithmetic) {
        const double floor = (sigma * std::sqrt(p / (1.0 - p) * dt) - 1.0) / dt;
        range.lower = std::max(range.lower, std::nextafter(floor, std::numeric_limits<double>::infinity()));
    }
    return range;
}

Interval feasible_probability_range(const TreeParams& params) {
    validate(params);
    const double c = risk_neutral_unchecked(params).pricing_theta;
    const double c2dt = c * c * params.step_years;
    // q >= 0 binds for c > 0 and q <= 1 for c < 0.
    Interval range{0.0, 1.0};
    if (c > 0.0) range.lower = c2dt / (1.0 + c2dt);
    if (c < 0.0) range.upper = 1.0 / (1.0 + c2dt);
    if (params.mode == ReturnMode::Arithmetic) {
        const double gross = 1.0 + params.drift * params.step_years;
        if (!(gross > 0.0)) return {1.0, 0.0};
        const double k = gross / (params.volatility * std::sqrt(params.step_years));
        range.upper = std::min(range.upper, k * k / (1.0 + k * k));
    }
    return range;
}

namespace {

void check_pricing_inputs(double asset0, double strike) {
    if (!(asset0 > 0.0) || !std::isfinite(asset0)) throw InvalidArgument("asset value must be positive");
    if (!(strike >= 0.0) || !std::isfinite(strike)) throw InvalidArgument("strike must be non-negative");
}

}  // namespace

TreeQuote tree_call_price(double asset0, double strike, const TreeParams& params) {
    check_pricing_inputs(asset0, strike);
    if (params.steps > kMaxTreeSteps)
        throw InvalidArgument("tree with " + std::to_string(params.steps) + " steps exceeds the limit of " +
                              std::to_string(kMaxTreeSteps));
    const StepReturns returns = derive_step_returns(params);
    const RiskNeutralStep rn = derive_risk_neutral(params);

    const int n = params.steps;
    const double q = rn.q;
    const double discount = 1.0 / rn.gross_rate;

    // values[j]: option value at the node reached by j up moves.
    std::vector<double> values(static_cast<std::size_t>(n) + 1);
    for (int j = 0; j <= n; ++j) {
        const double asset = asset0 * std::pow(returns.up_factor, j) * std::pow(returns.down_factor, n - j);
        values[j] = std::max(asset - strike, 0.0);
    }
    for (int level = n; level > 0; --level) {
        for (int j = 0; j < level; ++j) {
            values[j] = discount * (q * values[j + 1] + (1.0 - q) * values[j]);
        }
    }

    return {
        .value = std::max(values[0], 0.0),
        .steps_used = n,
        .mode = params.mode,
        .diagnostics = {rn.q, rn.theta, returns.up_return, returns.down_return, params.step_years},
    };
}

double enumerate_paths_price(double asset0, double strike, const TreeParams& params) {
    check_pricing_inputs(asset0, strike);
    if (params.steps > kMaxEnumerationSteps)
        throw InvalidArgument("path enumeration refused for " + std::to_string(params.steps) +
                              " steps (limit " + std::to_string(kMaxEnumerationSteps) + ")");
    const StepReturns returns = derive_step_returns(params);
    const RiskNeutralStep rn = derive_risk_neutral(params);

    const int n = params.steps;
    const std::uint64_t paths = std::uint64_t{1} << n;
    double expectation = 0.0;
    for (std::uint64_t path = 0; path < paths; ++path) {
        double asset = asset0;
        double weight = 1.0;
        for (int step = 0; step < n; ++step) {
            if ((path >> step) & 1U) {
                asset *= returns.up_factor;
                weight *= rn.q;
            } else {
                asset *= returns.down_factor;
                weight *= 1.0 - rn.q;
            }
        }
        expectation += weight * std::max(asset - strike, 0.0);
    }
    return expectation / std::pow(rn.gross_rate, n);
}

StepMoments physical_step_moments(const TreeParams& params) {
    const StepReturns r = derive_step_returns(params);
    const double p = params.up_probability;
    const double spread = r.up_return - r.down_return;
    return {p * r.up_return + (1.0 - p) * r.down_return, p * (1.0 - p) * spread * spread};
}

std::uint64_t lattice_node_count(int steps) noexcept {
    if (steps < 0) return 0;
    const auto n = static_cast<std::uint64_t>(steps);
    return (n + 1) * (n + 2) / 2;
}

}  // namespace merton
