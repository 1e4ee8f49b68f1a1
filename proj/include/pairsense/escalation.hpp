// Copyright 2026 The Pairsense Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace pairsense::escalation {

// Whole-hour ranges, half-open [start, end). Morning windows must lie within
// 04:00-11:00 and evening windows within 16:00-23:00.
struct HourRange {
  int start = 0;
  int end = 0;  // start == end means an empty window

  int count() const { return end - start; }
  bool contains(int hour) const { return hour >= start && hour < end; }

  friend bool operator==(const HourRange&, const HourRange&) = default;
};

struct AvailabilityWindows {
  HourRange weekday_morning{7, 11};
  HourRange weekday_evening{17, 22};
  HourRange weekend_morning{6, 10};
  HourRange weekend_evening{16, 22};

  friend bool operator==(const AvailabilityWindows&, const AvailabilityWindows&) = default;
};

inline void validate(const AvailabilityWindows& w) {
  auto check = [](const HourRange& r, int lo, int hi, const char* name) {
    if (r.start > r.end || r.start < lo || r.end > hi) {
      throw std::invalid_argument(std::string("availability window ") + name +
                                  " out of bounds");
    }
  };
  check(w.weekday_morning, 4, 11, "weekday_morning");
  check(w.weekend_morning, 4, 11, "weekend_morning");
  check(w.weekday_evening, 16, 23, "weekday_evening");
  check(w.weekend_evening, 16, 23, "weekend_evening");
}

enum class DayKind { Weekday, Weekend };

struct DayStats {
  int expected_morning = 0;
  int completed_morning = 0;
  int expected_evening = 0;
  int completed_evening = 0;
  bool diary_completed = false;
};

struct EscalationDecision {
  bool reminder_sms_morning = false;
  bool reminder_sms_evening = false;
  bool participant_sms = false;
  bool supervisor_email = false;  // never without participant_sms

  friend bool operator==(const EscalationDecision&, const EscalationDecision&) = default;
};

// One expected self-report per availability hour per period.
inline std::pair<int, int> expected_counts(const AvailabilityWindows& windows, DayKind day) {
  if (day == DayKind::Weekday) {
    return {windows.weekday_morning.count(), windows.weekday_evening.count()};
  }
  return {windows.weekend_morning.count(), windows.weekend_evening.count()};
}

// 14:00 check: morning reminder when strictly under 60% of the expected
// morning self-reports are completed. Meeting 60% exactly passes.
inline EscalationDecision afternoon_check(const DayStats& stats) {
  EscalationDecision d;
  if (stats.expected_morning > 0 &&
      stats.completed_morning < 0.6 * stats.expected_morning) {
    d.reminder_sms_morning = true;
  }
  return d;
}

// End-of-day check: evening reminder at the same 60% rule, plus participant
// SMS + supervisor email when the diary is missing or the day total falls
// strictly under 30%.
inline EscalationDecision end_of_day_check(const DayStats& stats) {
  EscalationDecision d;
  if (stats.expected_evening > 0 &&
      stats.completed_evening < 0.6 * stats.expected_evening) {
    d.reminder_sms_evening = true;
  }
  int total_expected = stats.expected_morning + stats.expected_evening;
  int total_completed = stats.completed_morning + stats.completed_evening;
  bool low_total = total_expected > 0 && total_completed < 0.3 * total_expected;
  if (!stats.diary_completed || low_total) {
    d.participant_sms = true;
    d.supervisor_email = true;
  }
  return d;
}

}  // namespace pairsense::escalation
