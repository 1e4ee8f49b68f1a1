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

#include <doctest.h>

#include <stdexcept>

#include "pairsense/transport.hpp"

using namespace pairsense;
using namespace pairsense::transport;

namespace {

Link watch_phone(TimeMs latency = 100) {
  Link l;
  l.kind = LinkKind::DataLayer;
  l.endpoint_a = "watch";
  l.endpoint_b = "phone";
  l.latency_ms = latency;
  return l;
}

Link phone_server(TimeMs latency = 250) {
  Link l;
  l.kind = LinkKind::Internet;
  l.endpoint_a = "phone";
  l.endpoint_b = "server";
  l.latency_ms = latency;
  return l;
}

Message intent_at(TimeMs t) {
  return {MessageKind::RecordingDoneIntent, "watch", "phone", "rec-1", t};
}

}  // namespace

TEST_CASE("send applies fixed latency") {
  Rng rng(1);
  auto r = send(watch_phone(100), intent_at(5000), rng);
  CHECK(r.delivered);
  CHECK(r.delivered_at == 5100);
}

TEST_CASE("send drops everything at drop_prob 1") {
  Rng rng(2);
  Link l = watch_phone();
  l.drop_prob = 1.0;
  for (int i = 0; i < 10; ++i) {
    CHECK_FALSE(send(l, intent_at(i * 1000), rng).delivered);
  }
}

TEST_CASE("send drops inside an outage, half-open bounds") {
  Rng rng(3);
  Link l = watch_phone();
  l.outages = {{10000, 20000}};
  CHECK(send(l, intent_at(9999), rng).delivered);
  CHECK_FALSE(send(l, intent_at(10000), rng).delivered);
  CHECK_FALSE(send(l, intent_at(19999), rng).delivered);
  CHECK(send(l, intent_at(20000), rng).delivered);
}

TEST_CASE("send rejects endpoints off the link") {
  Rng rng(4);
  Message m{MessageKind::Ack, "watch", "server", "", 0};
  CHECK_THROWS_AS(send(watch_phone(), m, rng), std::invalid_argument);
}

TEST_CASE("send preserves order when jitter is zero") {
  Rng rng(5);
  Link l = watch_phone(80);
  TimeMs prev = 0;
  for (TimeMs t = 0; t < 10000; t += 1000) {
    auto r = send(l, intent_at(t), rng);
    REQUIRE(r.delivered);
    CHECK(r.delivered_at > prev);
    prev = r.delivered_at;
  }
}

TEST_CASE("send jitter is bounded and deterministic per seed") {
  Link l = watch_phone(100);
  l.jitter_ms = 50;
  std::vector<TimeMs> first, second;
  for (int pass = 0; pass < 2; ++pass) {
    Rng rng(99);
    auto& out = pass == 0 ? first : second;
    for (int i = 0; i < 200; ++i) {
      auto r = send(l, intent_at(0), rng);
      REQUIRE(r.delivered);
      CHECK(r.delivered_at >= 100);
      CHECK(r.delivered_at <= 150);
      out.push_back(r.delivered_at);
    }
  }
  CHECK(first == second);
}

TEST_CASE("ble_connect succeeds under proximity with no failure prob") {
  Rng rng(6);
  BleConnectionState state;
  BleConnectConfig config;
  CHECK(ble_connect(state, true, config, rng) == BleConnectOutcome::Connected);
  CHECK(state.consecutive_failures == 0);
  CHECK(state.stack_generation == 0);
}

TEST_CASE("ble_connect fails without proximity and resets the stack at the cap") {
  Rng rng(7);
  BleConnectionState state;
  BleConnectConfig config;  // cap 3
  CHECK(ble_connect(state, false, config, rng) == BleConnectOutcome::Failed);
  CHECK(ble_connect(state, false, config, rng) == BleConnectOutcome::Failed);
  CHECK(state.consecutive_failures == 2);
  CHECK(ble_connect(state, false, config, rng) == BleConnectOutcome::StackResetPerformed);
  CHECK(state.consecutive_failures == 0);
  CHECK(state.stack_generation == 1);
  // success clears the failure streak
  CHECK(ble_connect(state, false, config, rng) == BleConnectOutcome::Failed);
  CHECK(ble_connect(state, true, config, rng) == BleConnectOutcome::Connected);
  CHECK(state.consecutive_failures == 0);
  CHECK(state.stack_generation == 1);
}

TEST_CASE("ble_connect with failure_prob 1 always fails despite proximity") {
  Rng rng(8);
  BleConnectionState state;
  BleConnectConfig config;
  config.failure_prob = 1.0;
  CHECK(ble_connect(state, true, config, rng) == BleConnectOutcome::Failed);
  CHECK(ble_connect(state, true, config, rng) == BleConnectOutcome::Failed);
  CHECK(ble_connect(state, true, config, rng) == BleConnectOutcome::StackResetPerformed);
}

TEST_CASE("relay shows the self-report on healthy links") {
  Rng rng(9);
  RelayConfig config;
  auto r = relay_selfreport_trigger(intent_at(60000), watch_phone(100), phone_server(250),
                                    config, rng);
  REQUIRE(r.shown_at.has_value());
  // watch->phone 100, phone->server 250, server->phone 250
  CHECK(*r.shown_at == 60000 + 100 + 250 + 250);
  CHECK_FALSE(r.reason.has_value());
}

TEST_CASE("relay reports internet outage") {
  Rng rng(10);
  Link internet = phone_server();
  internet.outages = {{0, kMsPerHour}};
  auto r = relay_selfreport_trigger(intent_at(60000), watch_phone(), internet, {}, rng);
  CHECK_FALSE(r.shown_at.has_value());
  CHECK(r.reason == NotShownReason::InternetUnavailable);
}

TEST_CASE("relay reports server hangup after the data-layer hop") {
  Rng rng(11);
  RelayConfig config;
  config.server_hangup = true;
  auto r = relay_selfreport_trigger(intent_at(60000), watch_phone(), phone_server(), config,
                                    rng);
  CHECK_FALSE(r.shown_at.has_value());
  CHECK(r.reason == NotShownReason::ServerHangup);
}

TEST_CASE("relay reports data-layer drop") {
  Rng rng(12);
  Link dl = watch_phone();
  dl.drop_prob = 1.0;
  auto r = relay_selfreport_trigger(intent_at(60000), dl, phone_server(), {}, rng);
  CHECK_FALSE(r.shown_at.has_value());
  CHECK(r.reason == NotShownReason::DataLayerDrop);
}

TEST_CASE("relay rejects arrivals past the deadline window") {
  Rng rng(13);
  RelayConfig config;
  config.deadline_window = 500;
  auto r = relay_selfreport_trigger(intent_at(60000), watch_phone(100), phone_server(250),
                                    config, rng);
  CHECK_FALSE(r.shown_at.has_value());
  CHECK(r.reason == NotShownReason::TooLate);
}

TEST_CASE("store-and-forward queues across an internet outage") {
  Rng rng(14);
  Link internet = phone_server(250);
  internet.outages = {{0, 120000}};
  Message intent = intent_at(60000);

  auto plain = relay_selfreport_trigger(intent, watch_phone(100), internet, {}, rng);
  CHECK(plain.reason == NotShownReason::InternetUnavailable);

  RelayConfig config;
  config.deadline_window = 5 * kMsPerMinute;
  config.store_and_forward = true;
  auto queued = relay_selfreport_trigger(intent, watch_phone(100), internet, config, rng);
  REQUIRE(queued.shown_at.has_value());
  // queued until 120000, then phone->server and server->phone hops
  CHECK(*queued.shown_at == 120000 + 250 + 250);
}

TEST_CASE("format_send trace lines") {
  Link l = watch_phone(100);
  Message m = intent_at(5000);
  CHECK(format_send(l, m, {true, 5100}) ==
        "5000\tdatalayer\tRecordingDoneIntent\tdelivered@5100");
  CHECK(format_send(l, m, {}) == "5000\tdatalayer\tRecordingDoneIntent\tdropped");
}
