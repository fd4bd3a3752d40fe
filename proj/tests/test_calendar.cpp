#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "flexbill/assets.hpp"
#include "flexbill/calendar.hpp"
#include "flexbill/tariff.hpp"
#include "support/fixtures.hpp"

using namespace flexbill;

TEST(TimeGrid, StepCountsFollowMonthLength) {
  EXPECT_EQ(build_time_grid(2021, 1).count(), 2976u);
  EXPECT_EQ(build_time_grid(2021, 2).count(), 2688u);
  EXPECT_EQ(build_time_grid(2020, 2).count(), 2784u);
  EXPECT_EQ(build_time_grid(2021, 4).count(), 2880u);
}

TEST(TimeGrid, StepsAreUniformAndIncreasing) {
  const auto grid = build_time_grid(2021, 3);
  const auto steps = grid.steps();
  ASSERT_EQ(steps.size(), grid.count());
  EXPECT_EQ(grid.step_minutes(), 15);
  EXPECT_EQ(steps.front().iso(), "2021-03-01T00:00");
  EXPECT_EQ(steps.back().iso(), "2021-03-31T23:45");
  for (std::size_t t = 1; t < steps.size(); ++t) {
    const auto prev = minutes_since_epoch(steps[t - 1]);
    EXPECT_EQ(minutes_since_epoch(steps[t]) - prev, 15) << "at step " << t;
  }
  EXPECT_TRUE(grid.full_month());
}

TEST(TimeGrid, RejectsBadMonth) {
  EXPECT_THROW(build_time_grid(2021, 0), std::invalid_argument);
  EXPECT_THROW(build_time_grid(2021, 13), std::invalid_argument);
  EXPECT_THROW(TimeGrid(2021, 2, 28, 97), std::invalid_argument);
  EXPECT_THROW(TimeGrid(2021, 2, 0, 8), std::invalid_argument);
}

TEST(TimeGrid, PartialGridStartsAtRequestedDay) {
  const TimeGrid g(2021, 1, 4, 8);
  EXPECT_EQ(g.count(), 8u);
  EXPECT_FALSE(g.full_month());
  EXPECT_EQ(g.at(0).iso(), "2021-01-04T00:00");
  EXPECT_EQ(g.at(7).iso(), "2021-01-04T01:45");
  EXPECT_THROW(g.at(8), std::out_of_range);
}

TEST(TimeGrid, WeekendDetection) {
  const auto grid = build_time_grid(2021, 1);
  EXPECT_FALSE(grid.at(0).is_weekend());             // Friday
  EXPECT_TRUE(grid.at(96).is_weekend());             // Saturday
  EXPECT_TRUE(grid.at(2 * 96).is_weekend());         // Sunday
  EXPECT_FALSE(grid.at(3 * 96).is_weekend());        // Monday
}

TEST(TouCalendar, BundledCalendarPartitionsEveryCell) {
  const auto t = load_tariff(flexbill::testing::bundled("base_b19.json"));
  const auto& cal = t.calendar;
  for (int m = 1; m <= 12; ++m) {
    for (bool we : {false, true}) {
      for (int h = 0; h < 24; ++h) {
        const auto p = cal.period_of(m, we, h);
        ASSERT_LT(p, cal.period_count());
        int hits = 0;
        for (const auto& r : cal.rules()) hits += r.matches(m, we, h) ? 1 : 0;
        EXPECT_EQ(hits, 1) << m << "/" << we << "/" << h;
      }
    }
  }
}

TEST(TouCalendar, IndicatorsSumToOnePerStep) {
  const auto t = load_tariff(flexbill::testing::bundled("storage_option_s.json"));
  for (int month : {1, 4, 7}) {
    const auto grid = build_time_grid(2021, month);
    for (std::size_t step = 0; step < grid.count(); step += 7) {
      int total = 0;
      for (const auto& p : t.calendar.periods()) total += tou_indicator(t.calendar, grid, step, p);
      EXPECT_EQ(total, 1);
    }
  }
}

TEST(TouCalendar, PeakWindowLabels) {
  const auto t = load_tariff(flexbill::testing::bundled("base_b19.json"));
  const auto grid = build_time_grid(2021, 7);
  EXPECT_EQ(tou_indicator(t.calendar, grid, 17 * 4, "peak"), 1);
  EXPECT_EQ(tou_indicator(t.calendar, grid, 21 * 4 - 1, "peak"), 1);
  EXPECT_EQ(tou_indicator(t.calendar, grid, 21 * 4, "partial_peak"), 1);
  EXPECT_EQ(tou_indicator(t.calendar, grid, 3 * 4, "off_peak"), 1);
  EXPECT_THROW(tou_indicator(t.calendar, grid, 0, "shoulder"), std::out_of_range);
}

TEST(TouCalendar, OverlapAndGapAreRejected) {
  EXPECT_THROW(TouCalendar({"a", "b"}, {TouRule{"a", {}, DayClass::All, {{0, 13}}},
                                        TouRule{"b", {}, DayClass::All, {{12, 24}}}}),
               std::invalid_argument);
  EXPECT_THROW(TouCalendar({"a", "b"}, {TouRule{"a", {}, DayClass::All, {{0, 12}}},
                                        TouRule{"b", {}, DayClass::Weekday, {{12, 24}}}}),
               std::invalid_argument);
  EXPECT_THROW(TouCalendar({"a"}, {TouRule{"z", {}, DayClass::All, {{0, 24}}}}),
               std::invalid_argument);
  EXPECT_NO_THROW(TouCalendar({"a", "b"}, {TouRule{"a", {}, DayClass::Weekday, {{0, 24}}},
                                           TouRule{"b", {}, DayClass::Weekend, {{0, 24}}}}));
}

TEST(PeakMask, JanuaryDefaultWindow) {
  const auto mask = peak_mask(HourRange{16, 21}, build_time_grid(2021, 1));
  EXPECT_EQ(std::count(mask.begin(), mask.end(), 1), 31 * 20);
  EXPECT_EQ(mask[16 * 4], 1);
  EXPECT_EQ(mask[16 * 4 - 1], 0);
  EXPECT_EQ(mask[21 * 4], 0);
}

TEST(PeakMask, EmptyWindowGivesEmptyMask) {
  const auto mask = peak_mask(HourRange{16, 16}, build_time_grid(2021, 1));
  EXPECT_EQ(std::accumulate(mask.begin(), mask.end(), 0), 0);
}

TEST(PeakMask, FullDayWindowCoversEverything) {
  const auto mask = peak_mask(HourRange{0, 24}, build_time_grid(2021, 2));
  EXPECT_EQ(std::count(mask.begin(), mask.end(), 1), static_cast<long>(mask.size()));
}
