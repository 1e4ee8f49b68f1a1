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

#include <cstdint>

namespace pairsense {

// Virtual-clock time in milliseconds since the study epoch (midnight of day 0).
using TimeMs = std::int64_t;

inline constexpr TimeMs kMsPerSecond = 1000;
inline constexpr TimeMs kMsPerMinute = 60 * kMsPerSecond;
inline constexpr TimeMs kMsPerHour = 60 * kMsPerMinute;
inline constexpr TimeMs kMsPerDay = 24 * kMsPerHour;

inline constexpr int minute_of_hour(TimeMs t) {
  return static_cast<int>((t % kMsPerHour) / kMsPerMinute);
}

inline constexpr int hour_of_day(TimeMs t) {
  return static_cast<int>((t % kMsPerDay) / kMsPerHour);
}

inline constexpr int day_index(TimeMs t) { return static_cast<int>(t / kMsPerDay); }

inline constexpr TimeMs hour_floor(TimeMs t) { return t - t % kMsPerHour; }

}  // namespace pairsense
