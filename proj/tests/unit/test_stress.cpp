#include <gtest/gtest.h>

#include <cmath>

#include "merton/errors.hpp"
#include "merton/stress.hpp"

using namespace merton;
using namespace std::chrono;

namespace {

SurfaceGrid downside(double value, std::uint8_t flags = kFlagNone) {
    SurfaceGrid g = SurfaceGrid::blank(SurfaceKind::DownsideProb, {0.8, 0.9}, {30, 60});
    g.values.assign(4, 0.5);
    g.residuals.assign(4, 0.0);
    g.values[g.index(0, 1)] = value;
    g.flags[g.index(0, 1)] = flags;
    return g;
}

Date feb(int d) { return sys_days{year{2025} / 2 / d}; }

}  // namespace

TEST(Classify, Thresholds) {
    EXPECT_EQ(classify_signal(0.85), StressAction::Reduce);
    EXPECT_EQ(classify_signal(0.80), StressAction::Hold);
    EXPECT_EQ(classify_signal(0.70), StressAction::Hold);
    EXPECT_EQ(classify_signal(0.60), StressAction::Hold);
    EXPECT_EQ(classify_signal(0.55), StressAction::Increase);
    EXPECT_EQ(classify_signal(std::nextafter(0.80, 1.0)), StressAction::Reduce);
    EXPECT_EQ(classify_signal(std::nextafter(0.60, 0.0)), StressAction::Increase);
}

TEST(Classify, OutOfRange) {
    EXPECT_THROW(classify_signal(-0.01), InvalidArgument);
    EXPECT_THROW(classify_signal(1.01), InvalidArgument);
    EXPECT_THROW(classify_signal(std::nan("")), InvalidArgument);
}

TEST(Metric, ExactCell) {
    const auto r = stress_metric(downside(0.85));
    EXPECT_EQ(r.value, 0.85);
    EXPECT_FALSE(r.nearest);
    EXPECT_TRUE(r.reliable);
}

TEST(Metric, NearestCell) {
    const auto r = stress_metric(downside(0.85), {0.91, 30});
    EXPECT_EQ(r.value, 0.85);
    EXPECT_TRUE(r.nearest);
    EXPECT_EQ(r.used.moneyness, 0.9);
    EXPECT_EQ(r.used.maturity_days, 30);
}

TEST(Metric, FlaggedCellUnreliable) {
    const auto r = stress_metric(downside(0.85, kFlagBoundary));
    EXPECT_EQ(r.value, 0.85);
    EXPECT_FALSE(r.reliable);
}

TEST(Metric, NeedsDownsideSurface) {
    auto g = downside(0.85);
    g.kind = SurfaceKind::UpProb;
    EXPECT_THROW(stress_metric(g), InvalidArgument);
}

TEST(Series, PerDateClassification) {
    const auto s = signal_series({{feb(12), downside(0.70)}, {feb(10), downside(0.85)}, {feb(13), downside(0.55)}});
    ASSERT_EQ(s.size(), 3u);
    EXPECT_EQ(s[0].as_of, feb(10));
    EXPECT_EQ(s[0].action, StressAction::Reduce);
    EXPECT_EQ(s[1].action, StressAction::Hold);
    EXPECT_EQ(s[2].action, StressAction::Increase);
}

TEST(Series, EmptyAndDuplicates) {
    EXPECT_TRUE(signal_series({}).empty());
    EXPECT_THROW(signal_series({{feb(10), downside(0.7)}, {feb(10), downside(0.8)}}), DataError);
}

TEST(Series, MissingValueHolds) {
    const auto s = signal_series({{feb(10), downside(std::nan(""), kFlagInfeasible)}});
    EXPECT_EQ(s[0].action, StressAction::Hold);
    EXPECT_FALSE(s[0].reading.reliable);
}

TEST(Series, Text) {
    const auto s = signal_series({{feb(10), downside(0.85)}, {feb(11), downside(0.7, kFlagBoundary)}});
    EXPECT_EQ(to_signal_text(s),
              "date,probability,action,reliable\n"
              "2025-02-10,0.85,REDUCE,yes\n"
              "2025-02-11,0.7,HOLD,no\n");
}
