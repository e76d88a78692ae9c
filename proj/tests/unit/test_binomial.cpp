#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "merton/binomial.hpp"
#include "merton/errors.hpp"
#include "merton/pricing.hpp"
#include "oracles.hpp"

using namespace merton;

namespace {

TreeParams params(double mu, double sigma, double p, double r, double dt, int n,
                  ReturnMode mode = ReturnMode::Log) {
    return {mu, sigma, p, r, dt, n, mode};
}

oracle::Lattice lattice(const TreeParams& t) {
    return {t.drift, t.volatility, t.up_probability, t.rate, t.step_years, t.steps, t.mode == ReturnMode::Log};
}

}  // namespace

TEST(ReturnMode, ParseAndPrint) {
    EXPECT_EQ(parse_return_mode("LOG"), ReturnMode::Log);
    EXPECT_EQ(parse_return_mode("arithmetic"), ReturnMode::Arithmetic);
    EXPECT_EQ(to_string(ReturnMode::Log), "log");
    EXPECT_THROW(parse_return_mode("geometric"), InvalidArgument);
}

TEST(StepReturns, SymmetricAtHalf) {
    const auto s = derive_step_returns(params(0, 0.2, 0.5, 0, 1, 1));
    EXPECT_NEAR(s.up_return, 0.2, 1e-15);
    EXPECT_NEAR(s.down_return, -0.2, 1e-15);
    EXPECT_NEAR(s.up_factor, 1.221403, 1e-6);
    EXPECT_NEAR(s.down_factor, 0.818731, 1e-6);
}

TEST(StepReturns, SkewedProbability) {
    const auto s = derive_step_returns(params(0, 0.2, 0.8, 0, 1, 1));
    EXPECT_NEAR(s.up_return, 0.1, 1e-15);
    EXPECT_NEAR(s.down_return, -0.4, 1e-15);
}

TEST(StepReturns, DailyStep) {
    const auto s = derive_step_returns(params(0.08, 0.2, 0.5, 0, 1.0 / 252, 1));
    EXPECT_NEAR(s.up_return, 0.08 / 252 + 0.2 * std::sqrt(1.0 / 252), 1e-15);
    EXPECT_NEAR(s.up_return, 0.0129162761, 1e-10);
}

TEST(StepReturns, ArithmeticGrossRate) {
    const auto s = derive_step_returns(params(0, 0.2, 0.5, 0.05, 0.5, 1, ReturnMode::Arithmetic));
    EXPECT_NEAR(s.gross_rate, 1.025, 1e-15);
    EXPECT_NEAR(s.up_factor, 1.0 + 0.2 * std::sqrt(0.5), 1e-15);
}

TEST(RiskNeutral, ZeroPremiumKeepsP) {
    const auto rn = derive_risk_neutral(params(0.03, 0.2, 0.37, 0.03, 0.01, 1, ReturnMode::Arithmetic));
    EXPECT_EQ(rn.theta, 0.0);
    EXPECT_EQ(rn.q, 0.37);
}

TEST(RiskNeutral, DailyReference) {
    const auto rn = derive_risk_neutral(params(0.08, 0.2, 0.5, 0.03, 1.0 / 252, 1, ReturnMode::Arithmetic));
    EXPECT_NEAR(rn.theta, 0.25, 1e-15);
    EXPECT_NEAR(rn.q, 0.492126, 1e-6);
}

TEST(RiskNeutral, LogModeAddsConvexity) {
    const auto rn = derive_risk_neutral(params(0.08, 0.2, 0.5, 0.03, 1.0 / 252, 1));
    EXPECT_NEAR(rn.pricing_theta, 0.35, 1e-15);
    EXPECT_NEAR(rn.q, 0.5 - 0.35 * std::sqrt(0.25 / 252), 1e-15);
}

TEST(RiskNeutral, InfeasibleCarriesQ) {
    try {
        derive_risk_neutral(params(10, 0.1, 0.5, 0, 1, 1, ReturnMode::Arithmetic));
        FAIL() << "expected RiskNeutralInfeasible";
    } catch (const RiskNeutralInfeasible& e) {
        EXPECT_NEAR(e.q(), 0.5 - 100 * 0.5, 1e-12);
    }
}

TEST(TreeParams, ValidationRejectsBadInputs) {
    EXPECT_THROW(validate(params(0, 0, 0.5, 0, 1, 1)), InvalidArgument);
    EXPECT_THROW(validate(params(0, 0.2, 0, 0, 1, 1)), InvalidArgument);
    EXPECT_THROW(validate(params(0, 0.2, 1, 0, 1, 1)), InvalidArgument);
    EXPECT_THROW(validate(params(0, 0.2, 0.5, 0, 0, 1)), InvalidArgument);
    EXPECT_THROW(validate(params(0, 0.2, 0.5, 0, 1, 0)), InvalidArgument);
    EXPECT_THROW(tree_call_price(100, 100, params(0, 0.2, 0.5, 0, 1e-5, kMaxTreeSteps + 1)), InvalidArgument);
}

TEST(TreeParams, ForMaturity) {
    const auto t = tree_params_for_maturity(30, 2, 0.08, 0.2, 0.5, 0.04);
    EXPECT_EQ(t.steps, 60);
    EXPECT_NEAR(t.step_years, 30.0 / 365 / 60, 1e-18);
    EXPECT_EQ(t.mode, ReturnMode::Log);
}

TEST(TreeCall, OneStepLog) {
    // q = 0.5 - 0.1 * 0.5 = 0.45 with the convexity-adjusted ratio.
    const auto quote = tree_call_price(100, 100, params(0, 0.2, 0.5, 0, 1, 1));
    EXPECT_NEAR(quote.value, 0.45 * (100 * std::exp(0.2) - 100), 1e-12);
    EXPECT_NEAR(quote.value, 9.963124, 1e-6);
    EXPECT_EQ(quote.steps_used, 1);
    EXPECT_NEAR(quote.diagnostics.q, 0.45, 1e-15);
}

TEST(TreeCall, OneStepArithmetic) {
    const auto quote = tree_call_price(100, 100, params(0, 0.2, 0.5, 0, 1, 1, ReturnMode::Arithmetic));
    EXPECT_NEAR(quote.value, 0.5 * 20, 1e-12);
}

TEST(TreeCall, ZeroStrikeArithmeticIsAsset) {
    const auto t = params(0.07, 0.3, 0.4, 0.02, 0.01, 50, ReturnMode::Arithmetic);
    EXPECT_NEAR(tree_call_price(250, 0, t).value, 250, 1e-10);
}

TEST(TreeCall, ZeroStrikeLogIsDiscountedExpectation) {
    const auto t = params(0.07, 0.3, 0.4, 0.02, 0.01, 50);
    const auto s = derive_step_returns(t);
    const double q = derive_risk_neutral(t).q;
    const double expected = 250 * std::pow((q * s.up_factor + (1 - q) * s.down_factor) / s.gross_rate, 50);
    EXPECT_NEAR(tree_call_price(250, 0, t).value / expected, 1.0, 1e-12);
}

TEST(TreeCall, MatchesBinomialSum) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0, 1);
    int checked = 0;
    while (checked < 50) {
        const auto t = params(-0.2 + 0.5 * u(rng), 0.05 + 0.5 * u(rng), 0.1 + 0.8 * u(rng), 0.06 * u(rng),
                              0.002 + 0.05 * u(rng), 5 + static_cast<int>(60 * u(rng)),
                              u(rng) < 0.5 ? ReturnMode::Log : ReturnMode::Arithmetic);
        const double q = oracle::risk_neutral_q(lattice(t));
        if (q <= 0 || q >= 1) continue;
        const double strike = 100 * (0.6 + 0.8 * u(rng));
        const double expected = oracle::call_by_binomial_sum(100, strike, lattice(t));
        EXPECT_NEAR(tree_call_price(100, strike, t).value, expected, 1e-10 * std::max(1.0, expected));
        ++checked;
    }
}

TEST(PathEnumeration, AgreesWithTree) {
    const auto t = params(0.05, 0.25, 0.45, 0.02, 0.05, 10);
    const double tree = tree_call_price(100, 95, t).value;
    EXPECT_NEAR(enumerate_paths_price(100, 95, t) / tree, 1.0, 1e-10);
    EXPECT_NEAR(oracle::call_by_paths(100, 95, lattice(t)) / tree, 1.0, 1e-10);

    const auto t12 = params(0.1, 0.3, 0.6, 0.01, 0.02, 12, ReturnMode::Arithmetic);
    EXPECT_NEAR(enumerate_paths_price(100, 105, t12) / tree_call_price(100, 105, t12).value, 1.0, 1e-10);
}

TEST(PathEnumeration, RefusesLargeTrees) {
    EXPECT_THROW(enumerate_paths_price(100, 100, params(0, 0.2, 0.5, 0, 0.01, kMaxEnumerationSteps + 1)),
                 InvalidArgument);
}

TEST(TreeCall, InfeasibleThrows) {
    EXPECT_THROW(tree_call_price(100, 100, params(10, 0.1, 0.5, 0, 1, 3, ReturnMode::Arithmetic)),
                 RiskNeutralInfeasible);
}

TEST(TreeCall, NegativeArithmeticPriceThrows) {
    // D = -0.9 * sqrt(9) = -2.7 makes 1 + D negative.
    EXPECT_THROW(tree_call_price(100, 100, params(0, 0.9, 0.9, 0, 1, 2, ReturnMode::Arithmetic)),
                 NumericalError);
}

TEST(TreeCall, ConvergesToBsm) {
    const double bsm = bsm_call({100, 100, 0.03, 0.2, 1});
    const double coarse = tree_call_price(100, 100, params(0.08, 0.2, 0.5, 0.03, 1.0 / 200, 200)).value;
    const double fine = tree_call_price(100, 100, params(0.08, 0.2, 0.5, 0.03, 1.0 / 2000, 2000)).value;
    EXPECT_LT(std::abs(fine - bsm), std::abs(coarse - bsm));
    EXPECT_LT(std::abs(fine - bsm) / bsm, 5e-3);
}

TEST(Moments, ReferenceValues) {
    const auto m = physical_step_moments(params(0.08, 0.2, 0.3, 0, 1.0 / 252, 1));
    EXPECT_NEAR(m.mean, 0.08 / 252, 1e-15);
    EXPECT_NEAR(m.variance, 0.04 / 252, 1e-15);
}

TEST(Lattice, NodeCount) {
    EXPECT_EQ(lattice_node_count(0), 1u);
    EXPECT_EQ(lattice_node_count(1), 3u);
    EXPECT_EQ(lattice_node_count(10), 66u);
}

TEST(FeasibleRanges, BoundariesAreFeasible) {
    for (auto mode : {ReturnMode::Log, ReturnMode::Arithmetic}) {
        auto t = params(0.08, 0.2, 0.4, 0.03, 1.0 / 365, 30, mode);
        const Interval mu = feasible_drift_range(t);
        ASSERT_LT(mu.lower, mu.upper);
        for (double x : {mu.lower + 1e-9, mu.upper - 1e-9, 0.5 * (mu.lower + mu.upper)}) {
            t.drift = x;
            EXPECT_NO_THROW(tree_call_price(100, 90, t)) << "mu=" << x;
        }
        t.drift = mu.upper + 1e-6;
        EXPECT_THROW(tree_call_price(100, 90, t), NumericalError);
        t.drift = mu.lower - 1e-6;
        EXPECT_THROW(tree_call_price(100, 90, t), NumericalError);
    }
}

TEST(FeasibleRanges, ProbabilityRangeExcludesInfeasibleQ) {
    auto t = params(0.5, 0.01, 0.5, 0.0, 1.0 / 365, 30);
    const Interval p = feasible_probability_range(t);
    ASSERT_GT(p.lower, 0.0);
    ASSERT_LE(p.lower, p.upper);
    t.up_probability = p.lower * 0.999;
    EXPECT_LT(oracle::risk_neutral_q(lattice(t)), 0.0);
    t.up_probability = p.lower * 1.001;
    EXPECT_GE(oracle::risk_neutral_q(lattice(t)), 0.0);
}
