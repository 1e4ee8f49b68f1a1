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
//
// Acceptance suite: eleven criteria, one PASS/FAIL line each, nonzero exit
// when any fails. Tolerances are pinned inline at each check.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <queue>
#include <sstream>
#include <string>
#include <vector>

#include "pairsense/escalation.hpp"
#include "pairsense/obslog.hpp"
#include "pairsense/proximity.hpp"
#include "pairsense/rng.hpp"
#include "pairsense/session.hpp"
#include "pairsense/sim/engine.hpp"
#include "pairsense/vad/audio.hpp"
#include "pairsense/vad/train.hpp"
#include "reference_mfcc.hpp"

using namespace pairsense;

namespace {

int failures = 0;

void report(int n, const char* name, bool ok, const std::string& detail) {
  std::printf("%s criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", n, name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------
// Session drivers shared by criteria 2 and 3. An "attempt" is a proximity +
// speech observation at a given instant; its outcome says how the wearer
// responds to the self-report prompt of the recording it starts (if any).

enum class Outcome { Complete, StartOnly, Expire };

struct Attempt {
  TimeMs at = 0;
  Outcome outcome = Outcome::Complete;
};

struct HourRecord {
  TimeMs start = 0;
  session::RecordingKind kind = session::RecordingKind::Triggered;
  session::SelfReportStatus status = session::SelfReportStatus::NotTriggered;
  bool retained = false;

  friend bool operator==(const HourRecord&, const HourRecord&) = default;
};

struct HourResult {
  std::vector<HourRecord> records;
  int deletions = 0;

  friend bool operator==(const HourResult&, const HourResult&) = default;
};

// Drives one hour through the session machine with an event queue, the way
// the production engine does: timers come back exactly as scheduled, the
// self-report response arrives 61 s after the prompt (completion 60 s later),
// ignored prompts just let the alert timers run out.
HourResult drive_hour(session::SessionState& state, TimeMs hour0,
                      const std::vector<Attempt>& attempts, Outcome backup_outcome,
                      const session::TimingConfig& cfg) {
  enum Kind { kAttempt, kTimer, kRecComplete, kSelfStart, kSelfComplete };
  struct QEvent {
    TimeMs at;
    int seq;
    int kind;
    session::TimerId timer;
    Outcome outcome;
  };
  auto later = [](const QEvent& a, const QEvent& b) {
    return a.at != b.at ? a.at > b.at : a.seq > b.seq;
  };
  std::priority_queue<QEvent, std::vector<QEvent>, decltype(later)> queue(later);
  int seq = 0;
  for (const auto& a : attempts) {
    queue.push({a.at, seq++, kAttempt, session::TimerId::Backup, a.outcome});
  }

  const TimeMs hend = hour0 + kMsPerHour;
  HourResult out;
  Outcome current = Outcome::Expire;

  auto absorb = [&](const session::StepResult& r) {
    for (const auto& act : r.actions) {
      if (act.kind == session::ActionKind::ScheduleTimer) {
        queue.push({act.at, seq++, kTimer, act.timer, Outcome::Expire});
      } else if (act.kind == session::ActionKind::DeleteAudio) {
        ++out.deletions;
      }
    }
    state = r.state;
  };
  auto recording_started = [&](std::size_t before, TimeMs at, Outcome o) {
    if (state.records.size() > before) {
      current = o;
      queue.push({at + cfg.record_duration, seq++, kRecComplete, session::TimerId::Backup,
                  Outcome::Expire});
    }
  };

  absorb(session::advance(state, {session::EventKind::HourStart, hour0}, cfg));
  while (!queue.empty()) {
    QEvent e = queue.top();
    queue.pop();
    if (e.at >= hend) continue;
    switch (e.kind) {
      case kAttempt: {
        absorb(session::advance(state, {session::EventKind::ProximityMet, e.at}, cfg));
        std::size_t before = state.records.size();
        absorb(session::advance(state, {session::EventKind::SpeechDetected, e.at}, cfg));
        recording_started(before, e.at, e.outcome);
        break;
      }
      case kTimer: {
        std::size_t before = state.records.size();
        absorb(session::advance(state, {session::EventKind::TimerFired, e.at, e.timer}, cfg));
        recording_started(before, e.at, backup_outcome);
        break;
      }
      case kRecComplete: {
        absorb(session::advance(state, {session::EventKind::RecordingComplete, e.at}, cfg));
        if (current != Outcome::Expire) {
          queue.push({e.at + 61000, seq++, kSelfStart, session::TimerId::Backup, current});
          if (current == Outcome::Complete) {
            queue.push({e.at + 121000, seq++, kSelfComplete, session::TimerId::Backup, current});
          }
        }
        break;
      }
      case kSelfStart:
        if (state.phase == session::Phase::AwaitingSelfReport) {
          absorb(session::advance(state, {session::EventKind::SelfReportStarted, e.at}, cfg));
        }
        break;
      case kSelfComplete: {
        bool has_started = false;
        for (const auto& r : state.records) {
          has_started |= r.selfreport == session::SelfReportStatus::Started;
        }
        if (has_started) {
          absorb(session::advance(state, {session::EventKind::SelfReportCompleted, e.at}, cfg));
        }
        break;
      }
    }
  }
  absorb(session::advance(state, {session::EventKind::HourEnd, hend}, cfg));
  for (const auto& r : session::retain(state.records)) {
    out.records.push_back({r.start, r.kind, r.selfreport, r.retained});
  }
  return out;
}

// Independent straight-line interpreter of the same contract, written against
// the behavioral rules rather than the state machine: a recording starts when
// the machine is free, the start fits in the hour, and the 20-minute
// start-to-start gap is open (inclusive); the minute-44 backup additionally
// requires no kept record this hour and reschedules once past a still-open
// gap; only the last recording can be retained, and only when its self-report
// was at least started; ignored or unreachable prompts expire at the second
// alert or the hour end, deleting the audio either way.
HourResult reference_hour(std::optional<TimeMs>& last_start, TimeMs hour0,
                          const std::vector<Attempt>& attempts, Outcome backup_outcome,
                          const session::TimingConfig& cfg) {
  const TimeMs hend = hour0 + kMsPerHour;
  HourResult out;
  TimeMs busy_until = 0;
  bool kept_exists = false;

  auto resolve = [&](TimeMs start, Outcome o, session::RecordingKind kind) {
    TimeMs end = start + cfg.record_duration;
    session::SelfReportStatus status;
    if (o == Outcome::Expire) {
      status = session::SelfReportStatus::Expired;
      ++out.deletions;
      busy_until = std::min(end + cfg.first_alert_wait + cfg.second_alert_wait, hend);
    } else {
      TimeMs started_at = end + 61000;
      if (started_at >= hend) {
        status = session::SelfReportStatus::Expired;
        ++out.deletions;
        busy_until = hend;
      } else {
        status = (o == Outcome::Complete && end + 121000 < hend)
                     ? session::SelfReportStatus::Completed
                     : session::SelfReportStatus::Started;
        busy_until = started_at;
        kept_exists = true;
      }
    }
    out.records.push_back({start, kind, status, false});
    last_start = start;
  };

  std::size_t i = 0;
  std::optional<TimeMs> backup_at = hour0 + cfg.backup_minute * kMsPerMinute;
  while (i < attempts.size() || backup_at) {
    bool take_attempt =
        i < attempts.size() && (!backup_at || attempts[i].at <= *backup_at);
    if (take_attempt) {
      Attempt a = attempts[i++];
      if (a.at < busy_until) continue;
      if (a.at + cfg.record_duration > hend) continue;
      if (last_start && a.at - *last_start < cfg.min_gap) continue;
      resolve(a.at, a.outcome, session::RecordingKind::Triggered);
    } else {
      TimeMs bt = *backup_at;
      backup_at.reset();
      if (bt < busy_until) continue;
      if (kept_exists) continue;
      if (bt + cfg.record_duration > hend) continue;
      if (last_start && bt - *last_start < cfg.min_gap) {
        TimeMs retry = *last_start + cfg.min_gap;
        if (retry + cfg.record_duration <= hend) backup_at = retry;
        continue;
      }
      resolve(bt, backup_outcome, session::RecordingKind::Backup);
    }
  }
  if (!out.records.empty()) {
    auto& last = out.records.back();
    last.retained = last.status == session::SelfReportStatus::Started ||
                    last.status == session::SelfReportStatus::Completed;
  }
  return out;
}

// ---------------------------------------------------------------------------

void criterion_1() {
  auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::ostringstream bad;

  obslog::CollectionCounts counts{1392, 1028, 1019, 1019, 618, 598};
  auto cm = obslog::collection_metrics(counts);
  auto expect = [&](std::optional<double> got, double want, const char* what) {
    if (got != want) {
      ok = false;
      bad << ' ' << what << '=' << (got ? *got : -1.0) << "!=" << want;
    }
  };
  expect(cm.collected_of_total, 73.2, "collected/total");
  expect(cm.collected_of_running, 99.1, "collected/running");
  expect(cm.triggered_of_total, 73.2, "triggered/total");
  expect(cm.triggered_of_running, 99.1, "triggered/running");
  expect(cm.started_of_triggered, 60.6, "started/triggered");
  expect(cm.completed_of_triggered, 58.7, "completed/triggered");

  std::vector<obslog::RecordingAnnotation> rows;
  auto add = [&rows](int n, bool speech, bool male, bool female, bool conv,
                     session::RecordingKind kind) {
    for (int i = 0; i < n; ++i) {
      rows.push_back({"r" + std::to_string(rows.size()), speech, male, female, conv, kind});
    }
  };
  add(215, true, true, true, true, session::RecordingKind::Triggered);
  add(29, true, true, false, false, session::RecordingKind::Triggered);
  add(12, true, false, false, false, session::RecordingKind::Triggered);
  add(21, false, false, false, false, session::RecordingKind::Triggered);
  add(323, true, true, true, true, session::RecordingKind::Backup);
  add(212, true, false, true, false, session::RecordingKind::Backup);
  add(202, false, false, false, false, session::RecordingKind::Backup);
  auto vm = obslog::conversation_metrics(rows);
  expect(vm.speech_overall, 78.0, "speech/overall");
  expect(vm.speech_triggered, 92.4, "speech/triggered");
  expect(vm.speech_backup, 72.6, "speech/backup");
  expect(vm.conversation_overall, 53.1, "conv/overall");
  expect(vm.conversation_triggered, 77.6, "conv/triggered");
  expect(vm.either_spoke_triggered, 88.1, "either/triggered");
  expect(vm.conversation_backup, 43.8, "conv/backup");

  double elapsed = seconds_since(t0);
  if (elapsed >= 1.0) {
    ok = false;
    bad << " elapsed=" << elapsed << "s";
  }
  std::ostringstream d;
  d << "1014 annotations, " << rows.size() << " rows, one-decimal equality, "
    << elapsed << "s" << bad.str();
  report(1, "metrics oracle exact", ok, d.str());
}

void criterion_2() {
  auto t0 = std::chrono::steady_clock::now();
  const session::TimingConfig cfg;
  const Outcome outcomes[] = {Outcome::Complete, Outcome::StartOnly, Outcome::Expire};
  long scripts = 0, mismatches = 0;

  auto run_script = [&](const std::vector<int>& minutes, int outcome_code,
                        Outcome backup_outcome) {
    std::vector<Attempt> attempts;
    int code = outcome_code;
    for (int m : minutes) {
      attempts.push_back({static_cast<TimeMs>(m) * kMsPerMinute + 1, outcomes[code % 3]});
      code /= 3;
    }
    session::SessionState state;
    HourResult got = drive_hour(state, 0, attempts, backup_outcome, cfg);
    std::optional<TimeMs> last_start;
    HourResult want = reference_hour(last_start, 0, attempts, backup_outcome, cfg);
    ++scripts;
    if (!(got == want)) ++mismatches;
  };

  // every subset of <= 3 trigger minutes, every outcome assignment, every
  // backup outcome
  std::vector<std::vector<int>> minute_sets;
  minute_sets.push_back({});
  for (int a = 0; a < 60; ++a) {
    minute_sets.push_back({a});
    for (int b = a + 1; b < 60; ++b) {
      minute_sets.push_back({a, b});
      for (int c = b + 1; c < 60; ++c) minute_sets.push_back({a, b, c});
    }
  }
  for (const auto& minutes : minute_sets) {
    int combos = 1;
    for (std::size_t k = 0; k < minutes.size(); ++k) combos *= 3;
    for (int code = 0; code < combos; ++code) {
      for (Outcome backup : outcomes) run_script(minutes, code, backup);
    }
  }

  double elapsed = seconds_since(t0);
  std::ostringstream d;
  d << scripts << " sequences, " << mismatches << " mismatches, " << elapsed << "s";
  report(2, "session brute-force equivalence", mismatches == 0 && elapsed < 60.0, d.str());
}

void criterion_3() {
  const session::TimingConfig cfg;
  const Outcome outcomes[] = {Outcome::Complete, Outcome::StartOnly, Outcome::Expire};
  long violations = 0, hours = 0;
  std::string first;

  auto violate = [&](const std::string& what) {
    ++violations;
    if (first.empty()) first = what;
  };

  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    Rng rng(seed);
    session::SessionState state;
    std::optional<TimeMs> ref_last;
    std::vector<TimeMs> all_starts;
    for (int h = 0; h < 2; ++h) {
      TimeMs hour0 = static_cast<TimeMs>(h) * kMsPerHour;
      std::vector<Attempt> attempts;
      auto n = rng.uniform_index(7);
      for (std::uint64_t k = 0; k < n; ++k) {
        attempts.push_back(
            {hour0 + static_cast<TimeMs>(rng.uniform_index(3600)) * 1000 + 1,
             outcomes[rng.uniform_index(3)]});
      }
      std::sort(attempts.begin(), attempts.end(),
                [](const Attempt& a, const Attempt& b) { return a.at < b.at; });
      Outcome backup = outcomes[rng.uniform_index(3)];

      HourResult got = drive_hour(state, hour0, attempts, backup, cfg);
      HourResult want = reference_hour(ref_last, hour0, attempts, backup, cfg);
      if (!(got == want)) violate("reference mismatch");
      ++hours;

      if (got.records.empty()) violate("hour without any recording");
      int retained = 0;
      bool kept_seen = false;
      for (const auto& r : got.records) {
        all_starts.push_back(r.start);
        if (r.retained) ++retained;
        if (r.retained && r.status != session::SelfReportStatus::Started &&
            r.status != session::SelfReportStatus::Completed) {
          violate("retained without started self-report");
        }
        if (r.kind == session::RecordingKind::Backup) {
          if (minute_of_hour(r.start) < cfg.backup_minute) violate("early backup");
          if (kept_seen) violate("backup after a kept recording");
        }
        kept_seen |= r.status == session::SelfReportStatus::Started ||
                     r.status == session::SelfReportStatus::Completed;
      }
      if (retained > 1) violate("more than one retained recording in an hour");
    }
    for (std::size_t i = 1; i < all_starts.size(); ++i) {
      if (all_starts[i] - all_starts[i - 1] < cfg.min_gap) {
        violate("start-to-start gap under 20 min");
      }
    }
  }
  std::ostringstream d;
  d << "10000 seeds, " << hours << " fuzzed hours, " << violations << " violations";
  if (!first.empty()) d << ", first: " << first;
  report(3, "session invariants under fuzzing", violations == 0, d.str());
}

void criterion_4() {
  Rng rng(2024);
  vad::MfccExtractor extractor;
  std::vector<vad::LabeledFeature> train_set, holdout;
  const int kSegmentsPerClass = 1100;  // 2200 labeled 1-s segments total
  const int kTrainPerClass = 300;
  long segments = 0;
  for (int cls = 0; cls < 2; ++cls) {
    vad::FrameLabel label = cls == 0 ? vad::FrameLabel::Speech : vad::FrameLabel::NonSpeech;
    for (int i = 0; i < kSegmentsPerClass; ++i) {
      vad::Vec seg = cls == 0 ? vad::synth_speech_like(1.0, rng) : vad::synth_noise(1.0, rng);
      ++segments;
      auto& dest = i < kTrainPerClass ? train_set : holdout;
      for (int f : {0, 13, 26}) {
        dest.emplace_back(extractor.extract(seg.segment(f * vad::kFrameSize, vad::kFrameSize)),
                          label);
      }
    }
  }
  vad::TrainOptions options;
  options.seed = 5;
  vad::VadModel model = vad::train(train_set, options);
  vad::EvalMetrics m = vad::evaluate(model, holdout);
  bool ok = segments >= 2000 && m.accuracy >= 0.95 && m.shr >= 0.95 && m.far <= 0.05;
  std::ostringstream d;
  d << segments << " segments, holdout accuracy=" << m.accuracy << " shr=" << m.shr
    << " far=" << m.far << " (need >=0.95/>=0.95/<=0.05)";
  report(4, "vad pipeline on synthetic corpus", ok, d.str());
}

void criterion_5() {
  // trivial model: the first standardized coefficient decides
  vad::VadModel model;
  model.weights[0] = 1.0;
  Rng rng(31);
  int bad = 0;
  for (int trial = 0; trial < 20; ++trial) {
    long tp = 1 + static_cast<long>(rng.uniform_index(50));
    long fn = static_cast<long>(rng.uniform_index(50));
    long tn = 1 + static_cast<long>(rng.uniform_index(50));
    long fp = static_cast<long>(rng.uniform_index(50));
    std::vector<vad::LabeledFeature> labeled;
    auto add = [&labeled](long n, double c, vad::FrameLabel label) {
      vad::FeatureVector f = vad::FeatureVector::Zero();
      f[0] = c;
      for (long i = 0; i < n; ++i) labeled.emplace_back(f, label);
    };
    add(tp, 1.0, vad::FrameLabel::Speech);
    add(fn, -1.0, vad::FrameLabel::Speech);
    add(tn, -1.0, vad::FrameLabel::NonSpeech);
    add(fp, 1.0, vad::FrameLabel::NonSpeech);
    vad::EvalMetrics m = vad::evaluate(model, labeled);
    double n = static_cast<double>(tp + fn + tn + fp);
    bool exact =
        m.accuracy == static_cast<double>(tp + tn) / n &&
        m.shr == static_cast<double>(tp) / static_cast<double>(tp + fn) &&
        m.far == 1.0 - static_cast<double>(tn) / static_cast<double>(tn + fp);
    if (!exact) ++bad;
  }
  std::ostringstream d;
  d << "20 hand-built confusion matrices, " << bad
    << " mismatches against closed-form accuracy/SHR/FAR, exact equality";
  report(5, "evaluation metric definitions", bad == 0, d.str());
}

void criterion_6() {
  Rng rng(77);
  vad::MfccExtractor extractor;
  auto random_frame = [&rng](double amp) {
    vad::Vec f(vad::kFrameSize);
    for (int i = 0; i < vad::kFrameSize; ++i) f[i] = rng.uniform(-amp, amp);
    return f;
  };

  double worst_gain = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    vad::Vec frame = random_frame(0.3);
    double gain = rng.uniform(0.25, 4.0);
    vad::FeatureVector a = extractor.extract(frame);
    vad::FeatureVector b = extractor.extract(gain * frame);
    worst_gain = std::max(worst_gain, (a - b).cwiseAbs().maxCoeff());
  }

  double zero_norm = extractor.extract(vad::Vec::Zero(vad::kFrameSize)).cwiseAbs().maxCoeff();

  double worst_ref = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    vad::Vec frame = random_frame(0.4);
    std::vector<double> plain(frame.data(), frame.data() + frame.size());
    auto want = reference::mfcc(plain);
    vad::FeatureVector got = extractor.extract(frame);
    for (int i = 0; i < vad::kNumCepstra; ++i) {
      worst_ref = std::max(worst_ref, std::abs(got[i] - want[static_cast<std::size_t>(i)]));
    }
  }

  bool ok = worst_gain < 1e-6 && zero_norm == 0.0 && worst_ref < 1e-6;
  std::ostringstream d;
  d << "gain dev=" << worst_gain << " (1000 pairs, <1e-6), zero-frame max=" << zero_norm
    << ", reference dev=" << worst_ref << " (100 frames, <1e-6)";
  report(6, "mfcc properties", ok, d.str());
}

void criterion_7() {
  Rng rng(55);
  vad::MfccExtractor extractor;
  vad::VadModel model;
  model.weights[0] = 1.0;

  std::vector<vad::Vec> frames;
  vad::Vec audio = vad::synth_speech_like(10.0, rng);
  for (int f = 0; f + vad::kFrameSize <= audio.size(); f += vad::kFrameSize) {
    frames.push_back(audio.segment(f, vad::kFrameSize));
  }
  double latency = vad::measure_frame_latency(model, extractor, frames);

  vad::Vec second = vad::synth_speech_like(1.0, rng);
  auto t0 = std::chrono::steady_clock::now();
  (void)vad::decide_segment(model, extractor, second);
  double segment_s = seconds_since(t0);

  bool ok = latency < 0.025 && segment_s < 1.0;
  std::ostringstream d;
  d << frames.size() << " frames, mean latency=" << latency * 1000.0
    << "ms (<25ms), 1s segment in " << segment_s << "s (<1s)";
  report(7, "vad throughput", ok, d.str());
}

void criterion_8() {
  proximity::PathLossModel model;
  proximity::ProximityConfig config;

  // bisect the -80 dB crossing
  double lo = 1.0, hi = 40.0;
  for (int i = 0; i < 80; ++i) {
    double mid = 0.5 * (lo + hi);
    if (proximity::predict_rssi(model, mid) > -80.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double crossing = 0.5 * (lo + hi);

  bool boundary = !proximity::is_proximate({0, -80.0}, config) &&
                  proximity::is_proximate({0, -79.99}, config);
  bool ok = crossing >= 4.9 && crossing <= 5.1 && boundary;
  std::ostringstream d;
  d << "-80 dB crossing at " << crossing << " m (in [4.9, 5.1]), boundary -80->false "
    << "-79.99->true " << (boundary ? "exact" : "WRONG");
  report(8, "proximity calibration", ok, d.str());
}

void criterion_9() {
  using escalation::DayStats;
  using escalation::EscalationDecision;
  struct Case {
    DayStats stats;
    EscalationDecision want;
  };
  const Case cases[] = {
      {{4, 4, 5, 5, true}, {false, false, false, false}},   // perfect day
      {{4, 3, 5, 5, true}, {false, false, false, false}},   // morning at 60% exactly
      {{4, 4, 5, 3, true}, {false, false, false, false}},   // evening at 60% exactly
      {{4, 4, 5, 2, true}, {false, true, false, false}},    // evening one under
      {{5, 2, 5, 1, true}, {false, true, false, false}},    // day total at 30% exactly
      {{4, 1, 5, 1, true}, {false, true, true, true}},      // day total under 30%
      {{4, 0, 5, 0, true}, {false, true, true, true}},      // nothing completed
      {{4, 4, 5, 5, false}, {false, false, true, true}},    // diary missing only
      {{4, 4, 5, 2, false}, {false, true, true, true}},     // diary missing + weak evening
      {{0, 0, 0, 0, true}, {false, false, false, false}},   // nothing expected
      {{0, 0, 0, 0, false}, {false, false, true, true}},    // nothing expected, no diary
      {{4, 4, 5, 0, true}, {false, true, false, false}},    // morning cannot rescue evening
  };
  int bad = 0;
  for (const auto& c : cases) {
    EscalationDecision got = escalation::end_of_day_check(c.stats);
    // afternoon morning-reminder folded in for completeness
    got.reminder_sms_morning = escalation::afternoon_check(c.stats).reminder_sms_morning;
    EscalationDecision want = c.want;
    want.reminder_sms_morning = c.stats.expected_morning > 0 &&
                                c.stats.completed_morning < 0.6 * c.stats.expected_morning;
    if (!(got == want)) ++bad;
  }
  std::ostringstream d;
  d << "12 boundary combinations around 60%/30%/diary, " << bad << " mismatches, exact";
  report(9, "escalation truth table", bad == 0, d.str());
}

sim::RunResult default_run() {
  sim::Scenario scenario = sim::default_scenario();  // 13 couples, 7 days, seed 42
  return sim::run(scenario);
}

void criterion_10() {
  auto t0 = std::chrono::steady_clock::now();
  sim::RunResult result = default_run();
  double elapsed = seconds_since(t0);

  const auto& conv = result.report.conversation;
  const auto& pol = result.report.policies;
  bool have = conv.conversation_triggered && conv.conversation_backup && pol.triggered &&
              pol.scheduled && pol.random;
  bool ok = false;
  std::ostringstream d;
  if (have) {
    double margin = *conv.conversation_triggered - *conv.conversation_backup;
    ok = margin >= 15.0 && *pol.triggered > *pol.scheduled && *pol.triggered > *pol.random &&
         elapsed < 60.0;
    d << "triggered=" << *conv.conversation_triggered << "% backup="
      << *conv.conversation_backup << "% (margin " << margin << "pp, need >=15), policies "
      << *pol.triggered << " > " << *pol.scheduled << "/" << *pol.random << ", run "
      << elapsed << "s (<60s)";
  } else {
    d << "missing conversation or policy rates, run " << elapsed << "s";
  }
  report(10, "end-to-end directional reproduction", ok, d.str());
}

void criterion_11() {
  namespace fs = std::filesystem;
  fs::path a = fs::temp_directory_path() / "pairsense_acceptance_a";
  fs::path b = fs::temp_directory_path() / "pairsense_acceptance_b";
  fs::remove_all(a);
  fs::remove_all(b);
  sim::write_outputs(default_run(), a);
  sim::write_outputs(default_run(), b);

  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  };
  long files = 0, differing = 0;
  for (const auto& entry : fs::recursive_directory_iterator(a)) {
    if (!entry.is_regular_file()) continue;
    ++files;
    fs::path twin = b / fs::relative(entry.path(), a);
    if (!fs::exists(twin) || slurp(entry.path()) != slurp(twin)) ++differing;
  }
  bool ok = files > 0 && differing == 0;
  std::ostringstream d;
  d << files << " output files from two identical seed-42 runs, " << differing
    << " differ, byte equality";
  report(11, "determinism of outputs", ok, d.str());
  fs::remove_all(a);
  fs::remove_all(b);
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
