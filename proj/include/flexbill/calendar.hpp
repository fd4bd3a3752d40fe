#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace flexbill {

inline constexpr int kStepMinutes = 15;
inline constexpr int kStepsPerHour = 60 / kStepMinutes;
inline constexpr int kStepsPerDay = 24 * kStepsPerHour;
// energy integration factor: kW over one step -> kWh
inline constexpr double kHoursPerStep = 0.25;

// Naive local civil time, no DST handling.
struct StepTime {
  std::chrono::year_month_day date;
  int minute_of_day = 0;

  int hour() const { return minute_of_day / 60; }
  bool is_weekend() const;
  std::string iso() const;  // "YYYY-MM-DDTHH:MM"
};

// Uniformly spaced 15-minute steps. A full month by default; partial grids
// (starting at midnight of first_day, fixed step count) are used for short
// test horizons.
class TimeGrid {
 public:
  TimeGrid(int year, int month);
  TimeGrid(int year, int month, int first_day, std::size_t steps);

  int year() const { return year_; }
  int month() const { return month_; }
  int first_day() const { return first_day_; }
  int step_minutes() const { return kStepMinutes; }
  std::size_t count() const { return count_; }
  bool full_month() const;

  StepTime at(std::size_t t) const;
  std::vector<StepTime> steps() const;

 private:
  int year_;
  int month_;
  int first_day_ = 1;
  std::size_t count_ = 0;
};

TimeGrid build_time_grid(int year, int month);

int days_in_month(int year, int month);

enum class DayClass { All, Weekday, Weekend };

DayClass parse_day_class(const std::string& s);
std::string to_string(DayClass c);

// Half-open [begin, end) in whole local hours, 0 <= begin <= end <= 24.
struct HourRange {
  int begin = 0;
  int end = 0;

  bool contains(int hour) const { return hour >= begin && hour < end; }
  bool empty() const { return begin >= end; }
};

struct TouRule {
  std::string period;
  std::vector<int> months;  // 1..12; empty means every month
  DayClass day_class = DayClass::All;
  std::vector<HourRange> hour_ranges;

  bool matches(int month, bool weekend, int hour) const;
};

// TOU period labelling. Construction checks that the rules partition every
// (month, weekday/weekend, hour) cell into exactly one period.
class TouCalendar {
 public:
  TouCalendar(std::vector<std::string> periods, std::vector<TouRule> rules,
              HourRange peak_window = {16, 21});

  const std::vector<std::string>& periods() const { return periods_; }
  const std::vector<TouRule>& rules() const { return rules_; }
  const HourRange& peak_window() const { return peak_window_; }
  std::size_t period_count() const { return periods_.size(); }

  // throws std::out_of_range for an unknown id
  std::size_t period_index(const std::string& id) const;
  std::size_t period_of(int month, bool weekend, int hour) const;
  std::size_t period_of(const StepTime& s) const;

 private:
  std::vector<std::string> periods_;
  std::vector<TouRule> rules_;
  HourRange peak_window_;
  // [month-1][weekend][hour] -> period index
  std::uint8_t table_[12][2][24] = {};
};

// Period index per grid step.
std::vector<std::size_t> period_series(const TouCalendar& cal, const TimeGrid& grid);

int tou_indicator(const TouCalendar& cal, const TimeGrid& grid, std::size_t t,
                  const std::string& period);

using Mask = std::vector<std::uint8_t>;

Mask peak_mask(const TouCalendar& cal, const TimeGrid& grid);
Mask peak_mask(const HourRange& window, const TimeGrid& grid);

}  // namespace flexbill
