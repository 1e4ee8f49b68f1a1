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

#include <optional>
#include <string>
#include <vector>

#include "pairsense/rng.hpp"
#include "pairsense/time.hpp"

namespace pairsense::transport {

enum class MessageKind {
  ConfigHours,
  BleHandshakeAck,
  StartPeerRecording,
  RecordingDoneIntent,
  ShowSelfReport,
  SelfReportStarted,
  SelfReportCompleted,
  Ack,
  LogText,
};

struct Message {
  MessageKind kind = MessageKind::Ack;
  std::string sender;
  std::string receiver;
  std::string payload;
  TimeMs sent_at = 0;
};

enum class LinkKind { Ble, DataLayer, Internet };

struct OutageInterval {
  TimeMs start = 0;
  TimeMs end = 0;  // half-open [start, end)
};

struct Link {
  LinkKind kind = LinkKind::DataLayer;
  std::string endpoint_a;
  std::string endpoint_b;
  TimeMs latency_ms = 0;
  TimeMs jitter_ms = 0;
  double drop_prob = 0.0;
  std::vector<OutageInterval> outages;  // non-overlapping

  bool in_outage(TimeMs t) const {
    for (const auto& o : outages) {
      if (t >= o.start && t < o.end) return true;
    }
    return false;
  }
};

struct SendResult {
  bool delivered = false;
  TimeMs delivered_at = 0;
};

// Messages during an outage are dropped, not queued (store-and-forward is a
// what-if mode at the relay level, not here).
SendResult send(const Link& link, const Message& msg, Rng& rng);

struct BleConnectionState {
  int consecutive_failures = 0;
  int stack_generation = 0;
};

enum class BleConnectOutcome { Connected, Failed, StackResetPerformed };

struct BleConnectConfig {
  double failure_prob = 0.0;
  int failure_cap = 3;  // consecutive failures before a full stack reset
};

BleConnectOutcome ble_connect(BleConnectionState& state, bool proximity_ok,
                              const BleConnectConfig& config, Rng& rng);

enum class NotShownReason {
  DataLayerDrop,
  InternetUnavailable,
  ServerHangup,
  TooLate,
};

struct RelayResult {
  std::optional<TimeMs> shown_at;  // empty => not shown
  std::optional<NotShownReason> reason;
};

struct RelayConfig {
  TimeMs deadline_window = 4 * kMsPerMinute;  // watch alert window
  bool server_hangup = false;                 // cleared by a simulated restart
  bool store_and_forward = false;             // queue across Internet outages
};

// watch -> phone (data layer) -> server (internet) -> phone (internet).
RelayResult relay_selfreport_trigger(const Message& intent, const Link& data_layer,
                                     const Link& internet, const RelayConfig& config,
                                     Rng& rng);

const char* to_string(MessageKind kind);
const char* to_string(NotShownReason reason);

// One line-delimited trace record: timestamp, link, kind, outcome.
std::string format_send(const Link& link, const Message& msg, const SendResult& result);

}  // namespace pairsense::transport
