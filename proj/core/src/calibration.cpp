#include "merton/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "merton/errors.hpp"
#include "merton/pricing.hpp"

namespace merton {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate_target(const CalibrationTarget& t) {
    if (!(t.observed_price > 0.0) || !std::isfinite(t.observed_price))
        throw InvalidArgument("observed price must be positive; relative error is undefined otherwise");
    if (!(t.maturity_years > 0.0)) throw InvalidArgument("maturity must be positive");
    if (!(t.underlying_value > 0.0)) throw InvalidArgument("underlying value must be positive");
    if (!(t.strike >= 0.0)) throw InvalidArgument("strike must be non-negative");
}

double squared_relative_error(double model, double observed) {
    const double rel = (model - observed) / observed;
    return rel * rel;
}

// Central difference where both neighbours are usable, one-sided otherwise.
template <typename Model>
double relative_sensitivity(Model&& model, double x, double step, Interval bounds, double observed) {
    const double centre = model(x);
    const double up = x + step <= bounds.upper ? model(x + step) : kInf;
    const double down = x - step >= bounds.lower ? model(x - step) : kInf;
    double slope = 0.0;
    if (std::isfinite(up) && std::isfinite(down)) {
        slope = (up - down) / (2.0 * step);
    } else if (std::isfinite(up) && std::isfinite(centre)) {
        slope = (up - centre) / step;
    } else if (std::isfinite(down) && std::isfinite(centre)) {
        slope = (centre - down) / step;
    }
    return slope / observed;
}

// Walks outward from x0 in growing steps, capped so that close pairs of roots
// are not jumped over. Sign changes of the residual are bisected and dips of
// |residual| (roots touched at a lattice kink) are minimized locally. Returns
// the first candidate whose objective passes `accept`.
template <typename Model, typename Accept>
std::optional<double> neighbouring_root(Model&& model, double observed, double x0, Interval bounds, double step,
                                        double tol, Accept&& accept) {
    auto residual = [&](double x) { return (model(x) - observed) / observed; };
    auto objective = [&](double x) {
        const double g = residual(x);
        return std::isfinite(g) ? g * g : kInf;
    };
    const double max_stride = (bounds.upper - bounds.lower) / 256.0;
    for (const double dir : {-1.0, 1.0}) {
        const double limit = dir < 0 ? bounds.lower : bounds.upper;
        double prev = x0 + dir * step;
        if ((prev - limit) * dir > 0) continue;
        double g_prev = residual(prev);
        double before = x0;
        double g_before = kInf;
        for (double d = step * 1.5; std::isfinite(g_prev); d = std::min(d * 1.5, d + max_stride)) {
            const double x = (x0 + dir * d - limit) * dir > 0 ? limit : x0 + dir * d;
            const double g = residual(x);
            if (!std::isfinite(g)) break;
            std::optional<double> candidate;
            if (g != 0.0 && g_prev != 0.0 && (g > 0) != (g_prev > 0)) {
                double a = prev, b = x, ga = g_prev;
                while (std::abs(b - a) > tol) {
                    const double m = 0.5 * (a + b);
                    const double gm = residual(m);
                    if ((gm > 0) == (ga > 0)) {
                        a = m;
                        ga = gm;
                    } else {
                        b = m;
                    }
                }
                candidate = 0.5 * (a + b);
            } else if (std::abs(g_prev) < std::abs(g_before) && std::abs(g_prev) < std::abs(g)) {
                const Interval dip{std::min(before, x), std::max(before, x)};
                candidate = minimize_scalar(objective, dip, {.tol = tol, .scan_points = 8}).argmin;
            }
            if (candidate && std::abs(*candidate - x0) > 2.0 * tol && accept(*candidate)) return candidate;
            if (x == limit) break;
            before = prev;
            g_before = g_prev;
            prev = x;
            g_prev = g;
        }
    }
    return std::nullopt;
}

template <typename Model>
CalibrationResult calibrate(Model&& model, double observed, Interval bounds, double tol, double fd_step,
                            const CalibrationSettings& settings, double ambiguity_tol = 0.0) {
    auto objective = [&](double x) {
        const double price = model(x);
        return std::isfinite(price) ? squared_relative_error(price, observed) : kInf;
    };
    const ScalarMinimum min = minimize_scalar(objective, bounds, {.tol = tol, .scan_points = settings.scan_points, .ambiguity_tol = ambiguity_tol});

    CalibrationResult result;
    result.fitted_value = min.argmin;
    result.objective = min.value;
    result.iterations = min.iterations;
    result.evaluations = min.evaluations;
    result.boundary_hit = min.boundary_hit;
    result.feasible = std::isfinite(min.value);
    result.sensitivity = relative_sensitivity(model, min.argmin, fd_step, bounds, observed);
    result.low_sensitivity = !(std::abs(result.sensitivity) >= settings.low_sensitivity_threshold);
    result.ambiguous = min.alternative_minima > 0;
    result.alternative_value = min.alternative_argmin;
    if (ambiguity_tol > 0.0 && !result.ambiguous && result.feasible) {
        const auto other = neighbouring_root(model, observed, min.argmin, bounds, fd_step, tol, [&](double x) {
            return objective(x) <= result.objective + ambiguity_tol;
        });
        if (other) {
            result.ambiguous = true;
            result.alternative_value = *other;
        }
    }
    return result;
}

CalibrationResult calibrate_bsm(const CalibrationTarget& target, const CalibrationSettings& settings) {
    validate_target(target);
    auto model = [&](double sigma) {
        return bsm_call({target.underlying_value, target.strike, target.rate, sigma, target.maturity_years});
    };
    return calibrate(model, target.observed_price, settings.sigma_bounds, settings.sigma_tol, 1e-5, settings);
}

// Tree price, or +inf where the risk-neutral probability leaves [0, 1] or the
// arithmetic tree produces non-positive prices.
double tree_price_or_inf(const CalibrationTarget& target, const TreeParams& params) {
    try {
        return tree_call_price(target.underlying_value, target.strike, params).value;
    } catch (const RiskNeutralInfeasible&) {
        return kInf;
    } catch (const NegativePriceError&) {
        return kInf;
    }
}

// Search bounds narrowed to the region where the tree is defined.
Interval feasible_bounds(Interval configured, Interval feasible, const char* what) {
    const Interval out{std::max(configured.lower, feasible.lower), std::min(configured.upper, feasible.upper)};
    if (!(out.lower <= out.upper))
        throw CalibrationInfeasible(std::string("no ") + what + " in [" + std::to_string(configured.lower) + ", " +
                                    std::to_string(configured.upper) +
                                    "] gives a feasible risk-neutral probability");
    return out;
}

void check_tree_target(const CalibrationTarget& target) {
    validate_target(target);
    if (!(target.fixed.volatility > 0.0))
        throw InvalidArgument("tree calibration needs a positive fixed volatility");
}

}  // namespace

TreeParams tree_params_for(const CalibrationTarget& target, double drift, double up_probability) {
    int steps = target.fixed.steps;
    if (steps <= 0) steps = std::max(1, static_cast<int>(std::lround(target.maturity_years * 365.0)));
    return {
        .drift = drift,
        .volatility = target.fixed.volatility,
        .up_probability = up_probability,
        .rate = target.rate,
        .step_years = target.maturity_years / steps,
        .steps = steps,
        .mode = target.fixed.mode,
    };
}

CalibrationResult implied_asset_vol(const CalibrationTarget& target, const CalibrationSettings& settings) {
    return calibrate_bsm(target, settings);
}

CalibrationResult implied_equity_vol(const CalibrationTarget& target, const CalibrationSettings& settings) {
    return calibrate_bsm(target, settings);
}

CalibrationTarget equity_target(const OptionQuote& quote, double spot, double rate, const CleaningRules& rules) {
    if (!passes_filters(quote, spot, rules))
        throw DataError("quote (strike " + std::to_string(quote.strike) + ", expiry " +
                        format_iso_date(quote.expiry_date) + ") fails the cleaning filters");
    if (quote.maturity_days() < 1) throw DataError("quote expires on its quote date");
    return {
        .observed_price = quote.mid,
        .underlying_value = spot,
        .strike = quote.strike,
        .maturity_years = quote.maturity_days() / 365.0,
        .rate = rate,
    };
}

CalibrationResult implied_drift(const CalibrationTarget& target, const CalibrationSettings& settings) {
    check_tree_target(target);
    auto model = [&](double mu) {
        return tree_price_or_inf(target, tree_params_for(target, mu, target.fixed.up_probability));
    };
    const Interval bounds = feasible_bounds(
        settings.drift_bounds,
        feasible_drift_range(tree_params_for(target, 0.0, target.fixed.up_probability)), "drift");
    CalibrationResult result = calibrate(model, target.observed_price, bounds, settings.drift_tol, 1e-5, settings,
                                         settings.ambiguity_tol);
    if (!result.feasible) throw CalibrationInfeasible("no feasible drift found in the search interval");
    return result;
}

CalibrationResult implied_up_probability(const CalibrationTarget& target, const CalibrationSettings& settings) {
    check_tree_target(target);
    if (!(settings.probability_bounds.lower > 0.0 && settings.probability_bounds.upper < 1.0))
        throw InvalidArgument("probability bounds must lie inside (0, 1)");
    const Interval bounds = feasible_bounds(
        settings.probability_bounds,
        feasible_probability_range(tree_params_for(target, target.fixed.drift, 0.5)), "up-probability");
    auto model = [&](double p) { return tree_price_or_inf(target, tree_params_for(target, target.fixed.drift, p)); };
    CalibrationResult result =
        calibrate(model, target.observed_price, bounds, settings.probability_tol, 1e-5, settings,
                  settings.ambiguity_tol);
    if (!result.feasible) throw CalibrationInfeasible("no feasible up-probability found in the search interval");
    return result;
}

}  // namespace merton
