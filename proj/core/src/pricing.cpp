#include "merton/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "merton/errors.hpp"

namespace merton {

double normal_cdf(double x) noexcept {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

void validate(const BsmInputs& in) {
    if (!(in.underlying_value > 0.0) || !std::isfinite(in.underlying_value))
        throw InvalidArgument("underlying value must be positive and finite");
    if (!(in.strike >= 0.0) || !std::isfinite(in.strike))
        throw InvalidArgument("strike must be non-negative and finite");
    if (!(in.volatility >= 0.0) || !std::isfinite(in.volatility))
        throw InvalidArgument("volatility must be non-negative and finite");
    if (!(in.time_to_maturity > 0.0) || !std::isfinite(in.time_to_maturity))
        throw InvalidArgument("time to maturity must be positive and finite");
    if (!std::isfinite(in.rate))
        throw InvalidArgument("rate must be finite");
}

TerminalPayoff payoff_at_maturity(double asset_terminal, double face_value) {
    if (!(asset_terminal >= 0.0) || !(face_value >= 0.0))
        throw InvalidArgument("terminal asset value and face value must be non-negative");
    return {std::min(face_value, asset_terminal), std::max(asset_terminal - face_value, 0.0)};
}

namespace {

struct D1D2 {
    double d1;
    double d2;
};

D1D2 d1_d2(const BsmInputs& in) {
    const double vol_sqrt_t = in.volatility * std::sqrt(in.time_to_maturity);
    const double d1 = (std::log(in.underlying_value / in.strike) +
                       (in.rate + 0.5 * in.volatility * in.volatility) * in.time_to_maturity) /
                      vol_sqrt_t;
    return {d1, d1 - vol_sqrt_t};
}

}  // namespace

double bsm_call(const BsmInputs& in) {
    validate(in);
    if (in.strike == 0.0) return in.underlying_value;
    const double discounted_strike = in.strike * std::exp(-in.rate * in.time_to_maturity);
    if (in.volatility == 0.0) return std::max(in.underlying_value - discounted_strike, 0.0);

    const auto [d1, d2] = d1_d2(in);
    const double value = in.underlying_value * normal_cdf(d1) - discounted_strike * normal_cdf(d2);
    return std::clamp(value, std::max(in.underlying_value - discounted_strike, 0.0), in.underlying_value);
}

double bsm_put(const BsmInputs& in) {
    validate(in);
    if (in.strike == 0.0) return 0.0;
    const double discounted_strike = in.strike * std::exp(-in.rate * in.time_to_maturity);
    if (in.volatility == 0.0) return std::max(discounted_strike - in.underlying_value, 0.0);

    const auto [d1, d2] = d1_d2(in);
    const double value = discounted_strike * normal_cdf(-d2) - in.underlying_value * normal_cdf(-d1);
    return std::clamp(value, std::max(discounted_strike - in.underlying_value, 0.0), discounted_strike);
}

double debt_value(double asset_value, double call_value) {
    if (!(call_value >= 0.0)) throw InvalidArgument("call value must be non-negative");
    if (call_value > asset_value)
        throw ArbitrageError("call value " + std::to_string(call_value) + " exceeds asset value " +
                             std::to_string(asset_value));
    return asset_value - call_value;
}

CapitalStructureSlice capital_structure(const BsmInputs& in) {
    const double call = bsm_call(in);
    return {
        .asset_value = in.underlying_value,
        .equity_value = call,
        .debt_value = debt_value(in.underlying_value, call),
        .put_value = bsm_put(in),
        .discount_factor = std::exp(-in.rate * in.time_to_maturity),
    };
}

}  // namespace merton
