#include "flexbill/calendar.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace flexbill {

namespace chr = std::chrono;

bool StepTime::is_weekend() const {
  const chr::weekday wd{chr::sys_days{date}};
  return wd == chr::Saturday || wd == chr::Sunday;
}

std::string StepTime::iso() const {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()),
                minute_of_day / 60, minute_of_day % 60);
  return buf;
}

int days_in_month(int year, int month) {
  if (month < 1 || month > 12) {
    throw std::invalid_argument("month must be in 1..12, got " + std::to_string(month));
  }
  const chr::year_month_day_last last{chr::year{year} / chr::month{static_cast<unsigned>(month)} /
                                      chr::last};
  return static_cast<int>(static_cast<unsigned>(last.day()));
}

TimeGrid::TimeGrid(int year, int month)
    : year_(year),
      month_(month),
      count_(static_cast<std::size_t>(days_in_month(year, month)) * kStepsPerDay) {}

TimeGrid::TimeGrid(int year, int month, int first_day, std::size_t steps)
    : year_(year), month_(month), first_day_(first_day), count_(steps) {
  const int days = days_in_month(year, month);
  if (first_day < 1 || first_day > days) {
    throw std::invalid_argument("first_day " + std::to_string(first_day) + " outside the month");
  }
  const auto available = static_cast<std::size_t>(days - first_day + 1) * kStepsPerDay;
  if (steps == 0 || steps > available) {
    throw std::invalid_argument("grid of " + std::to_string(steps) + " steps does not fit in the month");
  }
}

bool TimeGrid::full_month() const {
  return first_day_ == 1 && count_ == static_cast<std::size_t>(days_in_month(year_, month_)) * kStepsPerDay;
}

StepTime TimeGrid::at(std::size_t t) const {
  if (t >= count()) {
    throw std::out_of_range("step index " + std::to_string(t) + " outside grid of " +
                            std::to_string(count()));
  }
  const auto day = static_cast<unsigned>(t / kStepsPerDay + static_cast<std::size_t>(first_day_));
  const int minute = static_cast<int>(t % kStepsPerDay) * kStepMinutes;
  return {chr::year{year_} / chr::month{static_cast<unsigned>(month_)} / chr::day{day}, minute};
}

std::vector<StepTime> TimeGrid::steps() const {
  std::vector<StepTime> out;
  out.reserve(count());
  for (std::size_t t = 0; t < count(); ++t) out.push_back(at(t));
  return out;
}

TimeGrid build_time_grid(int year, int month) { return TimeGrid(year, month); }

DayClass parse_day_class(const std::string& s) {
  if (s == "all") return DayClass::All;
  if (s == "weekday") return DayClass::Weekday;
  if (s == "weekend") return DayClass::Weekend;
  throw std::invalid_argument("day_class must be one of all/weekday/weekend, got '" + s + "'");
}

std::string to_string(DayClass c) {
  switch (c) {
    case DayClass::All:
      return "all";
    case DayClass::Weekday:
      return "weekday";
    case DayClass::Weekend:
      return "weekend";
  }
  return "all";
}

bool TouRule::matches(int month, bool weekend, int hour) const {
  if (!months.empty() && std::find(months.begin(), months.end(), month) == months.end()) {
    return false;
  }
  if (day_class == DayClass::Weekday && weekend) return false;
  if (day_class == DayClass::Weekend && !weekend) return false;
  return std::any_of(hour_ranges.begin(), hour_ranges.end(),
                     [hour](const HourRange& r) { return r.contains(hour); });
}

namespace {

void check_range(const HourRange& r, const std::string& what) {
  if (r.begin < 0 || r.end > 24 || r.begin > r.end) {
    throw std::invalid_argument(what + ": hour range [" + std::to_string(r.begin) + ", " +
                                std::to_string(r.end) + ") must satisfy 0 <= begin <= end <= 24");
  }
}

}  // namespace

TouCalendar::TouCalendar(std::vector<std::string> periods, std::vector<TouRule> rules,
                         HourRange peak_window)
    : periods_(std::move(periods)), rules_(std::move(rules)), peak_window_(peak_window) {
  if (periods_.empty()) throw std::invalid_argument("calendar defines no TOU periods");
  if (periods_.size() > 255) throw std::invalid_argument("too many TOU periods");
  check_range(peak_window_, "peak_window");

  std::vector<std::size_t> rule_period;
  for (const auto& r : rules_) {
    const auto it = std::find(periods_.begin(), periods_.end(), r.period);
    if (it == periods_.end()) {
      throw std::invalid_argument("tou_rules: unknown period '" + r.period + "'");
    }
    for (int m : r.months) {
      if (m < 1 || m > 12) {
        throw std::invalid_argument("tou_rules[" + r.period + "]: month " + std::to_string(m) +
                                    " outside 1..12");
      }
    }
    for (const auto& h : r.hour_ranges) check_range(h, "tou_rules[" + r.period + "]");
    rule_period.push_back(static_cast<std::size_t>(it - periods_.begin()));
  }

  for (int m = 1; m <= 12; ++m) {
    for (int we = 0; we < 2; ++we) {
      for (int h = 0; h < 24; ++h) {
        int hits = 0;
        std::size_t found = 0;
        for (std::size_t i = 0; i < rules_.size(); ++i) {
          if (rules_[i].matches(m, we == 1, h)) {
            // two rules for the same period may not overlap either
            ++hits;
            found = rule_period[i];
          }
        }
        if (hits != 1) {
          throw std::invalid_argument(
              "tou_rules do not partition the calendar: month " + std::to_string(m) + ", " +
              (we ? "weekend" : "weekday") + ", hour " + std::to_string(h) + " matches " +
              std::to_string(hits) + " rules");
        }
        table_[m - 1][we][h] = static_cast<std::uint8_t>(found);
      }
    }
  }
}

std::size_t TouCalendar::period_index(const std::string& id) const {
  const auto it = std::find(periods_.begin(), periods_.end(), id);
  if (it == periods_.end()) throw std::out_of_range("unknown TOU period '" + id + "'");
  return static_cast<std::size_t>(it - periods_.begin());
}

std::size_t TouCalendar::period_of(int month, bool weekend, int hour) const {
  return table_[month - 1][weekend ? 1 : 0][hour];
}

std::size_t TouCalendar::period_of(const StepTime& s) const {
  return period_of(static_cast<int>(static_cast<unsigned>(s.date.month())), s.is_weekend(),
                   s.hour());
}

std::vector<std::size_t> period_series(const TouCalendar& cal, const TimeGrid& grid) {
  std::vector<std::size_t> out(grid.count());
  for (std::size_t t = 0; t < grid.count(); ++t) out[t] = cal.period_of(grid.at(t));
  return out;
}

int tou_indicator(const TouCalendar& cal, const TimeGrid& grid, std::size_t t,
                  const std::string& period) {
  const std::size_t p = cal.period_index(period);
  return cal.period_of(grid.at(t)) == p ? 1 : 0;
}

Mask peak_mask(const HourRange& window, const TimeGrid& grid) {
  Mask out(grid.count(), 0);
  for (std::size_t t = 0; t < grid.count(); ++t) {
    const int minute = static_cast<int>(t % kStepsPerDay) * kStepMinutes;
    out[t] = (minute >= window.begin * 60 && minute < window.end * 60) ? 1 : 0;
  }
  return out;
}

Mask peak_mask(const TouCalendar& cal, const TimeGrid& grid) {
  return peak_mask(cal.peak_window(), grid);
}

}  // namespace flexbill
