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
#include <vector>

#include "pairsense/rng.hpp"
#include "pairsense/sim/scenario.hpp"

namespace pairsense::sim {

// Per-second ground truth over the whole study for one couple.
struct CoupleTrace {
  std::vector<float> distance_m;
  std::vector<std::uint8_t> partner_a_speaking;
  std::vector<std::uint8_t> partner_b_speaking;
  std::vector<std::uint8_t> tv_audio;       // non-partner speech source
  std::vector<std::uint8_t> watches_worn;

  std::size_t seconds() const { return distance_m.size(); }
  bool together_at(std::size_t s) const;

  // Span queries over [start_s, start_s + len_s).
  bool any_partner_speech(std::size_t start_s, std::size_t len_s) const;
  bool both_partners_spoke(std::size_t start_s, std::size_t len_s) const;
  bool partner_spoke(std::size_t start_s, std::size_t len_s, bool partner_a) const;

  // What an annotator would mark as a couple conversation: both partners
  // spoke during the span and for most of it they were within earshot,
  // which reaches a bit beyond the proximity-trigger range.
  bool conversation_in(std::size_t start_s, std::size_t len_s) const;
};

CoupleTrace generate_trace(const Scenario& scenario, Rng& rng);

// One trace per couple, each from an independent seeded substream.
std::vector<CoupleTrace> generate_traces(const Scenario& scenario);

}  // namespace pairsense::sim
