#pragma once

#include <cstdint>
#include <string_view>

#include "merton/optimize.hpp"

// Recombining binomial tree for firm assets under the physical measure.
//
// Per-step returns are chosen so the physical mean and variance are exactly
// mu*dt and sigma^2*dt for any up-probability p:
//
//   U = mu*dt + sigma*sqrt((1-p)/p)*sqrt(dt)
//   D = mu*dt - sigma*sqrt(p/(1-p))*sqrt(dt)
//
// Pricing uses the risk-neutral probability q = p - theta_q*sqrt(p(1-p)dt).
// In ARITHMETIC mode (u = 1+U, d = 1+D, R = 1+r*dt) theta_q is the
// risk-reward ratio theta = (mu - r)/sigma and q*u + (1-q)*d = R holds exactly.
// In LOG mode (u = e^U, d = e^D, R = e^{r*dt}) the per-step log return must
// have risk-neutral mean (r - sigma^2/2)*dt, so theta_q = theta + sigma/2.

namespace merton {

enum class ReturnMode { Arithmetic, Log };

std::string_view to_string(ReturnMode mode) noexcept;
/// Accepts "log" / "arithmetic" (case-insensitive). Throws InvalidArgument otherwise.
ReturnMode parse_return_mode(std::string_view text);

struct TreeParams {
    double drift = 0.0;           // mu, annualized
    double volatility = 0.0;      // sigma, annualized, > 0
    double up_probability = 0.5;  // p in (0, 1)
    double rate = 0.0;            // r, annualized
    double step_years = 0.0;      // dt = T / n
    int steps = 1;                // n
    ReturnMode mode = ReturnMode::Log;
};

inline constexpr int kMaxTreeSteps = 20'000;
inline constexpr int kMaxEnumerationSteps = 22;

void validate(const TreeParams& params);

/// Tree for a calendar maturity in days: n = days * steps_per_day, dt = (days/365)/n.
TreeParams tree_params_for_maturity(int maturity_days, int steps_per_day, double drift, double volatility,
                                    double up_probability, double rate, ReturnMode mode = ReturnMode::Log);

struct StepReturns {
    double up_return;    // U
    double down_return;  // D
    double up_factor;    // u
    double down_factor;  // d
    double gross_rate;   // R
};

StepReturns derive_step_returns(const TreeParams& params);

struct RiskNeutralStep {
    double q;
    double theta;          // (mu - r) / sigma
    double pricing_theta;  // ratio entering q; theta + sigma/2 in LOG mode
    double gross_rate;
};

/// Throws RiskNeutralInfeasible (carrying q) when q falls outside [0, 1].
RiskNeutralStep derive_risk_neutral(const TreeParams& params);

/// Same as derive_risk_neutral without the feasibility check.
RiskNeutralStep risk_neutral_unchecked(const TreeParams& params);

/// Drifts for which q lies in [0, 1] (and 1 + D > 0 in ARITHMETIC mode),
/// all other parameters held. Empty when lower > upper.
Interval feasible_drift_range(const TreeParams& params);

/// Same for the up-probability, within (0, 1).
Interval feasible_probability_range(const TreeParams& params);

struct TreeDiagnostics {
    double q;
    double theta;
    double up_return;
    double down_return;
    double step_years;
};

struct TreeQuote {
    double value;
    int steps_used;
    ReturnMode mode;
    TreeDiagnostics diagnostics;
};

/// European call by backward induction on a single O(n) value row.
TreeQuote tree_call_price(double asset0, double strike, const TreeParams& params);

/// Brute-force sum over all 2^n paths; independent check of tree_call_price.
double enumerate_paths_price(double asset0, double strike, const TreeParams& params);

struct StepMoments {
    double mean;
    double variance;
};

/// Physical per-step mean p*U + (1-p)*D and variance p(1-p)(U-D)^2.
StepMoments physical_step_moments(const TreeParams& params);

/// Distinct nodes in a recombining tree of n steps: (n+1)(n+2)/2.
std::uint64_t lattice_node_count(int steps) noexcept;

}  // namespace merton
