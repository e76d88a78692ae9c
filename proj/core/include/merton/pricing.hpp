#pragma once

// Closed-form Merton / Black-Scholes-Merton valuation of the capital structure.
// Equity is a European call on firm assets struck at the face value of debt;
// debt is the residual claim V - C, equivalently a riskless bond minus a put.

namespace merton {

struct BsmInputs {
    double underlying_value;  // V_t (or S_t for equity options), > 0
    double strike;            // face value of debt, >= 0
    double rate;              // continuously compounded, annualized
    double volatility;        // annualized, >= 0
    double time_to_maturity;  // years, > 0
};

struct TerminalPayoff {
    double debt;
    double equity;
};

struct CapitalStructureSlice {
    double asset_value;
    double equity_value;
    double debt_value;
    double put_value;
    double discount_factor;
};

/// Standard normal CDF through erfc; absolute error at the level of double rounding.
double normal_cdf(double x) noexcept;

/// Throws InvalidArgument when an invariant of BsmInputs does not hold.
void validate(const BsmInputs& in);

/// Debt receives min(K, V_T); equity receives max(V_T - K, 0).
TerminalPayoff payoff_at_maturity(double asset_terminal, double face_value);

double bsm_call(const BsmInputs& in);
double bsm_put(const BsmInputs& in);

/// B_t = V_t - C_t. Throws ArbitrageError when the call exceeds the asset.
double debt_value(double asset_value, double call_value);

/// Equity, debt and put at the same inputs, with the discount factor exp(-rT).
CapitalStructureSlice capital_structure(const BsmInputs& in);

}  // namespace merton
