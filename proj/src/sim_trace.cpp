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

#include "pairsense/sim/trace.hpp"

#include <algorithm>

namespace pairsense::sim {

bool CoupleTrace::together_at(std::size_t s) const {
  return distance_m[s] <= 5.0f;
}

bool CoupleTrace::any_partner_speech(std::size_t start_s, std::size_t len_s) const {
  std::size_t end = std::min(start_s + len_s, seconds());
  for (std::size_t s = start_s; s < end; ++s) {
    if (partner_a_speaking[s] || partner_b_speaking[s]) return true;
  }
  return false;
}

bool CoupleTrace::both_partners_spoke(std::size_t start_s, std::size_t len_s) const {
  return partner_spoke(start_s, len_s, true) && partner_spoke(start_s, len_s, false);
}

bool CoupleTrace::partner_spoke(std::size_t start_s, std::size_t len_s, bool partner_a) const {
  std::size_t end = std::min(start_s + len_s, seconds());
  const auto& speaking = partner_a ? partner_a_speaking : partner_b_speaking;
  for (std::size_t s = start_s; s < end; ++s) {
    if (speaking[s]) return true;
  }
  return false;
}

bool CoupleTrace::conversation_in(std::size_t start_s, std::size_t len_s) const {
  if (!both_partners_spoke(start_s, len_s)) return false;
  std::size_t end = std::min(start_s + len_s, seconds());
  if (end <= start_s) return false;
  // conversational range is wider than the proximity-trigger range: partners
  // can talk across a room that BLE ranging calls "apart"
  std::size_t same_room = 0;
  for (std::size_t s = start_s; s < end; ++s) same_room += distance_m[s] <= 10.0f;
  return 2 * same_room >= end - start_s;
}

namespace {

// Two-state per-second speech process with the given stationary speaking
// fraction and mean burst length.
class SpeechProcess {
 public:
  SpeechProcess(double burst_mean_s) : exit_prob_(1.0 / std::max(1.0, burst_mean_s)) {}

  bool step(double stationary_fraction, Rng& rng) {
    double entry_prob =
        stationary_fraction >= 1.0
            ? 1.0
            : exit_prob_ * stationary_fraction / (1.0 - stationary_fraction);
    if (speaking_) {
      if (rng.bernoulli(exit_prob_)) speaking_ = false;
    } else {
      if (rng.bernoulli(std::min(1.0, entry_prob))) speaking_ = true;
    }
    return speaking_;
  }

 private:
  double exit_prob_;
  bool speaking_ = false;
};

}  // namespace

CoupleTrace generate_trace(const Scenario& scenario, Rng& rng) {
  const auto total_s = static_cast<std::size_t>(scenario.days) * 86400;
  const BehaviorParams& b = scenario.behavior;

  CoupleTrace trace;
  trace.distance_m.resize(total_s);
  trace.partner_a_speaking.assign(total_s, 0);
  trace.partner_b_speaking.assign(total_s, 0);
  trace.tv_audio.assign(total_s, 0);
  trace.watches_worn.assign(total_s, 1);

  SpeechProcess speech_a(b.speech_burst_mean_s);
  SpeechProcess speech_b(b.speech_burst_mean_s);

  bool together = false;
  bool tv_bout = false;
  float bout_distance = static_cast<float>(b.distance_apart_m);
  std::size_t bout_remaining = 0;

  for (std::size_t s = 0; s < total_s; ++s) {
    if (bout_remaining == 0) {
      together = !together;
      double mean_s = (together ? b.together_bout_mean_min : b.apart_bout_mean_min) * 60.0;
      bout_remaining = std::max<std::size_t>(1, static_cast<std::size_t>(rng.exponential(mean_s)));
      if (together) {
        bout_distance = static_cast<float>(
            rng.uniform(b.distance_together_min_m, b.distance_together_max_m));
        tv_bout = b.tv_bout_prob > 0.0 && rng.bernoulli(b.tv_bout_prob);
      } else {
        bout_distance = static_cast<float>(b.distance_apart_m);
        tv_bout = false;
      }
    }
    --bout_remaining;

    trace.distance_m[s] = bout_distance;
    if (tv_bout) {
      // watches on the table, TV running, partners silent
      trace.watches_worn[s] = 0;
      trace.tv_audio[s] = 1;
    } else {
      double fraction = together ? b.speech_prob_together : b.speech_prob_apart;
      trace.partner_a_speaking[s] = speech_a.step(fraction, rng) ? 1 : 0;
      trace.partner_b_speaking[s] = speech_b.step(fraction, rng) ? 1 : 0;
    }
  }
  return trace;
}

std::vector<CoupleTrace> generate_traces(const Scenario& scenario) {
  std::vector<CoupleTrace> traces;
  traces.reserve(static_cast<std::size_t>(scenario.n_couples));
  Rng root(scenario.seed);
  for (int c = 0; c < scenario.n_couples; ++c) {
    Rng stream = root.substream(static_cast<std::uint64_t>(c) * 16 + 1);
    traces.push_back(generate_trace(scenario, stream));
  }
  return traces;
}

}  // namespace pairsense::sim
