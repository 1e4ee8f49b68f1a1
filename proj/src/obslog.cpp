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

#include "pairsense/obslog.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace pairsense::obslog {

using nlohmann::json;

namespace {

json event_count_to_json(const EventCount& e) {
  return json{{"count", e.count()}, {"at", e.at}};
}

EventCount event_count_from_json(const json& j, const char* field) {
  EventCount e;
  e.at = j.at("at").get<std::vector<TimeMs>>();
  int count = j.at("count").get<int>();
  if (count != e.count()) {
    throw std::runtime_error(std::string(field) + ": count does not match timestamp list");
  }
  return e;
}

json windows_to_json(const escalation::AvailabilityWindows& w) {
  auto range = [](const escalation::HourRange& r) { return json::array({r.start, r.end}); };
  return json{{"weekday_morning", range(w.weekday_morning)},
              {"weekday_evening", range(w.weekday_evening)},
              {"weekend_morning", range(w.weekend_morning)},
              {"weekend_evening", range(w.weekend_evening)}};
}

escalation::AvailabilityWindows windows_from_json(const json& j) {
  auto range = [&](const char* key) {
    auto arr = j.at(key);
    return escalation::HourRange{arr.at(0).get<int>(), arr.at(1).get<int>()};
  };
  escalation::AvailabilityWindows w;
  w.weekday_morning = range("weekday_morning");
  w.weekday_evening = range("weekday_evening");
  w.weekend_morning = range("weekend_morning");
  w.weekend_evening = range("weekend_evening");
  return w;
}

void check_within_hour(const EventCount& e, TimeMs hour_start, const char* field) {
  for (TimeMs t : e.at) {
    if (t < hour_start || t > hour_start + kMsPerHour) {
      throw std::invalid_argument(std::string(field) + ": timestamp outside the covered hour");
    }
  }
}

void validate_hourly(const HourlyLog& log) {
  for (auto [field, e] : std::initializer_list<std::pair<const char*, const EventCount*>>{
           {"ble_scan_or_advertise", &log.ble_scan_or_advertise},
           {"closeness_met", &log.closeness_met},
           {"no_silence_detections", &log.no_silence_detections},
           {"vad_detections", &log.vad_detections},
           {"connections", &log.connections},
           {"recordings", &log.recordings},
           {"selfreport_alert1", &log.selfreport_alert1},
           {"selfreport_alert2", &log.selfreport_alert2},
           {"selfreport_started", &log.selfreport_started},
           {"selfreport_completed", &log.selfreport_completed},
           {"errors", &log.errors},
           {"restarts", &log.restarts}}) {
    check_within_hour(*e, log.hour_start, field);
  }
}

json to_json(const ConfigLog& r) {
  return json{{"type", "config"},     {"v", kSchemaVersion},
              {"couple", r.couple_id}, {"device", r.device},
              {"days", r.days},       {"windows", windows_to_json(r.windows)}};
}

json to_json(const BeforeStudyLog& r) {
  return json{{"type", "before_study"},
              {"v", kSchemaVersion},
              {"ts", r.timestamp},
              {"battery", r.battery_level},
              {"ms_until_start", r.ms_until_start},
              {"exceptions_prev_hour", r.exceptions_prev_hour}};
}

json to_json(const HourlyLog& r) {
  return json{{"type", "hourly"},
              {"v", kSchemaVersion},
              {"couple", r.couple_id},
              {"device", r.device},
              {"ts", r.timestamp},
              {"hour_start", r.hour_start},
              {"battery", r.battery_level},
              {"scan_or_advertise", event_count_to_json(r.ble_scan_or_advertise)},
              {"closeness", event_count_to_json(r.closeness_met)},
              {"no_silence", event_count_to_json(r.no_silence_detections)},
              {"vad", event_count_to_json(r.vad_detections)},
              {"connections", event_count_to_json(r.connections)},
              {"recordings", event_count_to_json(r.recordings)},
              {"alert1", event_count_to_json(r.selfreport_alert1)},
              {"alert2", event_count_to_json(r.selfreport_alert2)},
              {"started", event_count_to_json(r.selfreport_started)},
              {"completed", event_count_to_json(r.selfreport_completed)},
              {"was_backup", r.was_backup},
              {"audio_discarded", r.audio_discarded},
              {"errors", event_count_to_json(r.errors)},
              {"restarts", event_count_to_json(r.restarts)},
              {"internet", r.internet_available},
              {"storage_mb", r.storage_remaining_mb}};
}

json to_json(const BleLog& r) {
  return json{{"type", "ble"},
              {"v", kSchemaVersion},
              {"couple", r.couple_id},
              {"ts", r.timestamp},
              {"rssi", r.rssi_dbm}};
}

json to_json(const ErrorLog& r) {
  return json{{"type", "error"},   {"v", kSchemaVersion},
              {"couple", r.couple_id}, {"device", r.device},
              {"ts", r.timestamp}, {"message", r.message}};
}

}  // namespace

std::string write_log(const LogRecord& record) {
  if (const auto* hourly = std::get_if<HourlyLog>(&record)) validate_hourly(*hourly);
  json j = std::visit([](const auto& r) { return to_json(r); }, record);
  return j.dump();
}

LogRecord parse_log(const std::string& line, int line_number) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw ParseError(line_number, std::string("malformed record: ") + e.what());
  }
  try {
    std::string type = j.at("type").get<std::string>();
    int version = j.at("v").get<int>();
    if (version != kSchemaVersion) {
      throw std::runtime_error("unsupported schema version " + std::to_string(version));
    }
    if (type == "config") {
      ConfigLog r;
      r.couple_id = j.at("couple").get<std::string>();
      r.device = j.at("device").get<std::string>();
      r.days = j.at("days").get<int>();
      r.windows = windows_from_json(j.at("windows"));
      escalation::validate(r.windows);
      return r;
    }
    if (type == "before_study") {
      BeforeStudyLog r;
      r.timestamp = j.at("ts").get<TimeMs>();
      r.battery_level = j.at("battery").get<double>();
      r.ms_until_start = j.at("ms_until_start").get<TimeMs>();
      r.exceptions_prev_hour = j.at("exceptions_prev_hour").get<int>();
      return r;
    }
    if (type == "hourly") {
      HourlyLog r;
      r.couple_id = j.at("couple").get<std::string>();
      r.device = j.at("device").get<std::string>();
      r.timestamp = j.at("ts").get<TimeMs>();
      r.hour_start = j.at("hour_start").get<TimeMs>();
      r.battery_level = j.at("battery").get<double>();
      r.ble_scan_or_advertise = event_count_from_json(j.at("scan_or_advertise"), "scan_or_advertise");
      r.closeness_met = event_count_from_json(j.at("closeness"), "closeness");
      r.no_silence_detections = event_count_from_json(j.at("no_silence"), "no_silence");
      r.vad_detections = event_count_from_json(j.at("vad"), "vad");
      r.connections = event_count_from_json(j.at("connections"), "connections");
      r.recordings = event_count_from_json(j.at("recordings"), "recordings");
      r.selfreport_alert1 = event_count_from_json(j.at("alert1"), "alert1");
      r.selfreport_alert2 = event_count_from_json(j.at("alert2"), "alert2");
      r.selfreport_started = event_count_from_json(j.at("started"), "started");
      r.selfreport_completed = event_count_from_json(j.at("completed"), "completed");
      r.was_backup = j.at("was_backup").get<bool>();
      r.audio_discarded = j.at("audio_discarded").get<bool>();
      r.errors = event_count_from_json(j.at("errors"), "errors");
      r.restarts = event_count_from_json(j.at("restarts"), "restarts");
      r.internet_available = j.at("internet").get<bool>();
      r.storage_remaining_mb = j.at("storage_mb").get<double>();
      validate_hourly(r);
      return r;
    }
    if (type == "ble") {
      BleLog r;
      r.couple_id = j.at("couple").get<std::string>();
      r.timestamp = j.at("ts").get<TimeMs>();
      r.rssi_dbm = j.at("rssi").get<double>();
      return r;
    }
    if (type == "error") {
      ErrorLog r;
      r.couple_id = j.at("couple").get<std::string>();
      r.device = j.at("device").get<std::string>();
      r.timestamp = j.at("ts").get<TimeMs>();
      r.message = j.at("message").get<std::string>();
      return r;
    }
    throw std::runtime_error("unknown record type '" + type + "'");
  } catch (const json::exception& e) {
    throw ParseError(line_number, std::string("schema error: ") + e.what());
  } catch (const std::runtime_error& e) {
    if (dynamic_cast<const ParseError*>(&e)) throw;
    throw ParseError(line_number, e.what());
  }
}

std::vector<LogRecord> parse_log_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open log file " + path);
  std::vector<LogRecord> records;
  std::string line;
  int line_number = 0;
  while (std::getline(is, line)) {
    ++line_number;
    if (line.empty()) continue;
    records.push_back(parse_log(line, line_number));
  }
  return records;
}

void validate(const RecordingAnnotation& a) {
  if (a.conversation && !(a.male_spoke && a.female_spoke)) {
    throw std::invalid_argument("annotation " + a.recording_id +
                               ": conversation requires both partners to have spoken");
  }
  if ((a.male_spoke || a.female_spoke) && !a.has_speech) {
    throw std::invalid_argument("annotation " + a.recording_id +
                               ": partner speech requires has_speech");
  }
}

void write_annotations_csv(const std::string& path,
                           const std::vector<RecordingAnnotation>& annotations) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << "recording_id,has_speech,male_spoke,female_spoke,conversation,kind\n";
  for (const auto& a : annotations) {
    validate(a);
    os << a.recording_id << ',' << (a.has_speech ? 1 : 0) << ',' << (a.male_spoke ? 1 : 0)
       << ',' << (a.female_spoke ? 1 : 0) << ',' << (a.conversation ? 1 : 0) << ','
       << (a.kind == session::RecordingKind::Triggered ? "triggered" : "backup") << "\n";
  }
}

std::vector<RecordingAnnotation> read_annotations_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::vector<RecordingAnnotation> annotations;
  std::string line;
  int line_number = 0;
  while (std::getline(is, line)) {
    ++line_number;
    if (line.empty()) continue;
    if (line_number == 1) {
      if (line != "recording_id,has_speech,male_spoke,female_spoke,conversation,kind") {
        throw ParseError(1, "unexpected annotation CSV header");
      }
      continue;
    }
    std::istringstream ls(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() != 6) throw ParseError(line_number, "expected 6 CSV fields");
    auto flag = [&](const std::string& v) {
      if (v == "1") return true;
      if (v == "0") return false;
      throw ParseError(line_number, "boolean field must be 0 or 1");
    };
    RecordingAnnotation a;
    a.recording_id = fields[0];
    a.has_speech = flag(fields[1]);
    a.male_spoke = flag(fields[2]);
    a.female_spoke = flag(fields[3]);
    a.conversation = flag(fields[4]);
    if (fields[5] == "triggered") {
      a.kind = session::RecordingKind::Triggered;
    } else if (fields[5] == "backup") {
      a.kind = session::RecordingKind::Backup;
    } else {
      throw ParseError(line_number, "kind must be 'triggered' or 'backup'");
    }
    try {
      validate(a);
    } catch (const std::runtime_error& e) {
      throw ParseError(line_number, e.what());
    }
    annotations.push_back(a);
  }
  return annotations;
}

void validate(const CollectionCounts& c) {
  bool ok = c.selfreport_completed <= c.selfreport_started &&
            c.selfreport_started <= c.selfreport_triggered &&
            c.selfreport_triggered <= c.expected_app_running &&
            c.expected_app_running <= c.total_expected && c.total_expected >= 0 &&
            c.selfreport_completed >= 0 && c.sensor_collected >= 0;
  if (!ok) throw std::invalid_argument("collection counts violate the handshake ordering");
}

double round_percent(long numerator, long denominator) {
  double pct = 100.0 * static_cast<double>(numerator) / static_cast<double>(denominator);
  return std::floor(pct * 10.0 + 0.5) / 10.0;
}

CollectionMetrics collection_metrics(const CollectionCounts& c) {
  if (c.total_expected == 0 || c.expected_app_running == 0) {
    throw std::domain_error("collection metrics undefined: zero expected samples");
  }
  CollectionMetrics m;
  m.collected_of_total = round_percent(c.sensor_collected, c.total_expected);
  m.collected_of_running = round_percent(c.sensor_collected, c.expected_app_running);
  m.triggered_of_total = round_percent(c.selfreport_triggered, c.total_expected);
  m.triggered_of_running = round_percent(c.selfreport_triggered, c.expected_app_running);
  if (c.selfreport_triggered > 0) {
    m.started_of_triggered = round_percent(c.selfreport_started, c.selfreport_triggered);
    m.completed_of_triggered = round_percent(c.selfreport_completed, c.selfreport_triggered);
  }
  return m;
}

ConversationMetrics conversation_metrics(const std::vector<RecordingAnnotation>& annotations) {
  if (annotations.empty()) {
    throw std::domain_error("conversation metrics undefined: no annotations");
  }
  long total = 0, speech = 0, conversation = 0;
  long triggered = 0, triggered_speech = 0, triggered_conv = 0, triggered_either = 0;
  long backup = 0, backup_speech = 0, backup_conv = 0;
  for (const auto& a : annotations) {
    ++total;
    speech += a.has_speech;
    conversation += a.conversation;
    if (a.kind == session::RecordingKind::Triggered) {
      ++triggered;
      triggered_speech += a.has_speech;
      triggered_conv += a.conversation;
      triggered_either += a.male_spoke || a.female_spoke;
    } else {
      ++backup;
      backup_speech += a.has_speech;
      backup_conv += a.conversation;
    }
  }
  ConversationMetrics m;
  m.speech_overall = round_percent(speech, total);
  m.conversation_overall = round_percent(conversation, total);
  if (triggered > 0) {
    m.speech_triggered = round_percent(triggered_speech, triggered);
    m.conversation_triggered = round_percent(triggered_conv, triggered);
    m.either_spoke_triggered = round_percent(triggered_either, triggered);
  }
  if (backup > 0) {
    m.speech_backup = round_percent(backup_speech, backup);
    m.conversation_backup = round_percent(backup_conv, backup);
  }
  return m;
}

bool hour_in_windows(TimeMs hour_start, const escalation::AvailabilityWindows& windows) {
  int day = day_index(hour_start);
  int hour = hour_of_day(hour_start);
  bool weekend = day % 7 >= 5;
  const auto& morning = weekend ? windows.weekend_morning : windows.weekday_morning;
  const auto& evening = weekend ? windows.weekend_evening : windows.weekday_evening;
  return morning.contains(hour) || evening.contains(hour);
}

long app_running_hours(const std::vector<HourlyLog>& logs,
                       const escalation::AvailabilityWindows& windows) {
  long count = 0;
  for (const auto& log : logs) {
    if (hour_in_windows(log.hour_start, windows)) ++count;
  }
  return count;
}

}  // namespace pairsense::obslog
