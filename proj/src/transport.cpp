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

#include "pairsense/transport.hpp"

#include <sstream>
#include <stdexcept>

namespace pairsense::transport {

namespace {

bool on_link(const Link& link, const std::string& endpoint) {
  return endpoint == link.endpoint_a || endpoint == link.endpoint_b;
}

}  // namespace

SendResult send(const Link& link, const Message& msg, Rng& rng) {
  if (!on_link(link, msg.sender) || !on_link(link, msg.receiver)) {
    throw std::invalid_argument("send: endpoint not attached to link (" + msg.sender +
                                " -> " + msg.receiver + ")");
  }
  if (link.in_outage(msg.sent_at)) return {};
  if (link.drop_prob > 0.0 && rng.bernoulli(link.drop_prob)) return {};
  TimeMs jitter = link.jitter_ms > 0
                      ? static_cast<TimeMs>(rng.uniform_index(
                            static_cast<std::uint64_t>(link.jitter_ms) + 1))
                      : 0;
  return {true, msg.sent_at + link.latency_ms + jitter};
}

BleConnectOutcome ble_connect(BleConnectionState& state, bool proximity_ok,
                              const BleConnectConfig& config, Rng& rng) {
  bool ok = proximity_ok && !(config.failure_prob > 0.0 && rng.bernoulli(config.failure_prob));
  if (ok) {
    state.consecutive_failures = 0;
    return BleConnectOutcome::Connected;
  }
  ++state.consecutive_failures;
  if (state.consecutive_failures >= config.failure_cap) {
    state.consecutive_failures = 0;
    ++state.stack_generation;
    return BleConnectOutcome::StackResetPerformed;
  }
  return BleConnectOutcome::Failed;
}

RelayResult relay_selfreport_trigger(const Message& intent, const Link& data_layer,
                                     const Link& internet, const RelayConfig& config,
                                     Rng& rng) {
  const TimeMs deadline = intent.sent_at + config.deadline_window;

  auto hop = [&](const Link& link, MessageKind kind, const std::string& from,
                 const std::string& to, TimeMs at) -> SendResult {
    Message m{kind, from, to, intent.payload, at};
    if (config.store_and_forward && link.in_outage(at)) {
      // queue until the outage clears, then send
      for (const auto& o : link.outages) {
        if (at >= o.start && at < o.end) {
          m.sent_at = o.end;
          break;
        }
      }
    }
    return send(link, m, rng);
  };

  SendResult to_phone = hop(data_layer, MessageKind::RecordingDoneIntent,
                            data_layer.endpoint_a, data_layer.endpoint_b, intent.sent_at);
  if (!to_phone.delivered) return {std::nullopt, NotShownReason::DataLayerDrop};

  if (config.server_hangup) return {std::nullopt, NotShownReason::ServerHangup};

  SendResult to_server = hop(internet, MessageKind::RecordingDoneIntent,
                             internet.endpoint_a, internet.endpoint_b, to_phone.delivered_at);
  if (!to_server.delivered) return {std::nullopt, NotShownReason::InternetUnavailable};

  SendResult back_to_phone = hop(internet, MessageKind::ShowSelfReport, internet.endpoint_b,
                                 internet.endpoint_a, to_server.delivered_at);
  if (!back_to_phone.delivered) return {std::nullopt, NotShownReason::InternetUnavailable};

  if (back_to_phone.delivered_at > deadline) return {std::nullopt, NotShownReason::TooLate};
  return {back_to_phone.delivered_at, std::nullopt};
}

const char* to_string(MessageKind kind) {
  switch (kind) {
    case MessageKind::ConfigHours: return "ConfigHours";
    case MessageKind::BleHandshakeAck: return "BleHandshakeAck";
    case MessageKind::StartPeerRecording: return "StartPeerRecording";
    case MessageKind::RecordingDoneIntent: return "RecordingDoneIntent";
    case MessageKind::ShowSelfReport: return "ShowSelfReport";
    case MessageKind::SelfReportStarted: return "SelfReportStarted";
    case MessageKind::SelfReportCompleted: return "SelfReportCompleted";
    case MessageKind::Ack: return "Ack";
    case MessageKind::LogText: return "LogText";
  }
  return "?";
}

const char* to_string(NotShownReason reason) {
  switch (reason) {
    case NotShownReason::DataLayerDrop: return "DataLayerDrop";
    case NotShownReason::InternetUnavailable: return "InternetUnavailable";
    case NotShownReason::ServerHangup: return "ServerHangup";
    case NotShownReason::TooLate: return "TooLate";
  }
  return "?";
}

std::string format_send(const Link& link, const Message& msg, const SendResult& result) {
  const char* link_name = link.kind == LinkKind::Ble ? "ble"
                          : link.kind == LinkKind::DataLayer ? "datalayer"
                                                             : "internet";
  std::ostringstream os;
  os << msg.sent_at << '\t' << link_name << '\t' << to_string(msg.kind) << '\t';
  if (result.delivered) {
    os << "delivered@" << result.delivered_at;
  } else {
    os << "dropped";
  }
  return os.str();
}

}  // namespace pairsense::transport
