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

#include <cmath>
#include <stdexcept>

#include "pairsense/time.hpp"

namespace pairsense::proximity {

// Log-distance path loss with Gaussian shadowing:
//   rssi(d) = rssi_at_1m - 10 * n * log10(d) + noise_std * z
// Defaults put the -80 dB closeness cutoff at roughly 5 m.
struct PathLossModel {
  double rssi_at_1m_dbm = -66.0;
  double path_loss_exponent = 2.0;  // >= 1
  double noise_std_db = 4.0;        // >= 0
};

struct RssiSample {
  TimeMs timestamp_ms = 0;
  double rssi_dbm = 0.0;  // < 0
};

struct ProximityConfig {
  double threshold_dbm = -80.0;  // < 0
  TimeMs scan_period_ms = 1000;
};

enum class ScanOutcome { KeepScanning, AttemptConnect };

// noise_draw is a standard-normal scalar supplied by the caller, so the
// function stays deterministic and testable.
inline double predict_rssi(const PathLossModel& model, double distance_m,
                           double noise_draw = 0.0) {
  if (!(distance_m > 0.0)) {
    throw std::domain_error("predict_rssi: distance must be positive");
  }
  return model.rssi_at_1m_dbm -
         10.0 * model.path_loss_exponent * std::log10(distance_m) +
         model.noise_std_db * noise_draw;
}

// Strict comparison: a sample exactly at the threshold is not proximate.
inline bool is_proximate(const RssiSample& sample, const ProximityConfig& config) {
  return sample.rssi_dbm > config.threshold_dbm;
}

inline ScanOutcome scan_step(const RssiSample& sample, const ProximityConfig& config) {
  return is_proximate(sample, config) ? ScanOutcome::AttemptConnect
                                      : ScanOutcome::KeepScanning;
}

}  // namespace pairsense::proximity
