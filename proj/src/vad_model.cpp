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

#include "pairsense/vad/model.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace pairsense::vad {

FrameLabel classify_frame(const VadModel& model, const FeatureVector& features) {
  FeatureVector z = (features - model.feat_mean).cwiseQuotient(model.feat_std);
  double score = model.weights.dot(z) + model.bias;
  return score > 0.0 ? FrameLabel::Speech : FrameLabel::NonSpeech;
}

SegmentDecision decide_segment(const VadModel& model, const MfccExtractor& extractor,
                               const Eigen::Ref<const Vec>& segment) {
  if (segment.size() != kSegmentSize) {
    throw std::domain_error("decide_segment: segment must hold exactly 8000 samples");
  }
  if (rms(segment) < model.rms_threshold) {
    return SegmentDecision::Silence;
  }
  int speech_frames = 0;
  for (int f = 0; f < kFramesPerSegment; ++f) {
    FeatureVector feat = extractor.extract(segment.segment(f * kFrameSize, kFrameSize));
    if (classify_frame(model, feat) == FrameLabel::Speech) ++speech_frames;
  }
  double fraction = static_cast<double>(speech_frames) / kFramesPerSegment;
  return fraction >= model.segment_speech_fraction ? SegmentDecision::Speech
                                                   : SegmentDecision::NonSpeech;
}

EvalMetrics evaluate(const VadModel& model, const std::vector<LabeledFeature>& labeled) {
  long speech_total = 0, speech_hit = 0, noise_total = 0, noise_hit = 0;
  for (const auto& [feat, label] : labeled) {
    FrameLabel predicted = classify_frame(model, feat);
    if (label == FrameLabel::Speech) {
      ++speech_total;
      if (predicted == FrameLabel::Speech) ++speech_hit;
    } else {
      ++noise_total;
      if (predicted == FrameLabel::NonSpeech) ++noise_hit;
    }
  }
  if (speech_total == 0 || noise_total == 0) {
    throw std::domain_error("evaluate: both classes must be present, metric undefined");
  }
  EvalMetrics m;
  m.accuracy = static_cast<double>(speech_hit + noise_hit) /
               static_cast<double>(speech_total + noise_total);
  m.shr = static_cast<double>(speech_hit) / static_cast<double>(speech_total);
  m.far = 1.0 - static_cast<double>(noise_hit) / static_cast<double>(noise_total);
  return m;
}

double measure_frame_latency(const VadModel& model, const MfccExtractor& extractor,
                             const std::vector<Vec>& frames) {
  if (frames.empty()) {
    throw std::domain_error("measure_frame_latency: empty batch");
  }
  volatile double sink = 0.0;  // keep the classify result observable
  auto start = std::chrono::steady_clock::now();
  for (const auto& frame : frames) {
    FeatureVector feat = extractor.extract(frame);
    sink = sink + static_cast<double>(classify_frame(model, feat) == FrameLabel::Speech);
  }
  auto end = std::chrono::steady_clock::now();
  (void)sink;
  double total_s = std::chrono::duration<double>(end - start).count();
  return total_s / static_cast<double>(frames.size());
}

double calibrate_rms_threshold(VadModel& model, const Eigen::Ref<const Vec>& ambient,
                               double percentile) {
  if (ambient.size() < kSegmentSize) {
    throw std::domain_error("calibrate_rms_threshold: need at least one second of audio");
  }
  std::vector<double> per_second;
  for (Eigen::Index off = 0; off + kSegmentSize <= ambient.size(); off += kSegmentSize) {
    per_second.push_back(rms(ambient.segment(off, kSegmentSize)));
  }
  std::sort(per_second.begin(), per_second.end());
  double rank = percentile / 100.0 * static_cast<double>(per_second.size() - 1);
  auto idx = static_cast<std::size_t>(rank);
  double frac = rank - static_cast<double>(idx);
  double value = per_second[idx];
  if (idx + 1 < per_second.size()) {
    value += frac * (per_second[idx + 1] - per_second[idx]);
  }
  model.rms_threshold = value;
  return value;
}

namespace {

constexpr const char* kModelMagic = "pairsense-vad-model";
constexpr int kModelVersion = 1;

void write_real(std::ostream& os, double v) { os << std::hexfloat << v << std::defaultfloat; }

double read_real(std::istream& is) {
  std::string tok;
  if (!(is >> tok)) throw std::runtime_error("model file: truncated");
  return std::strtod(tok.c_str(), nullptr);
}

}  // namespace

void save_model(const VadModel& model, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("save_model: cannot open " + path.string());
  os << kModelMagic << " v" << kModelVersion << "\n";
  os << "rms_threshold ";
  write_real(os, model.rms_threshold);
  os << "\nsegment_speech_fraction ";
  write_real(os, model.segment_speech_fraction);
  os << "\nbias ";
  write_real(os, model.bias);
  for (auto [name, vec] : {std::pair<const char*, const FeatureVector*>{"weights", &model.weights},
                           {"feat_mean", &model.feat_mean},
                           {"feat_std", &model.feat_std}}) {
    os << "\n" << name;
    for (int i = 0; i < kNumCepstra; ++i) {
      os << ' ';
      write_real(os, (*vec)[i]);
    }
  }
  os << "\n";
}

VadModel load_model(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("load_model: cannot open " + path.string());
  std::string magic, version;
  is >> magic >> version;
  if (magic != kModelMagic || version != "v1") {
    throw std::runtime_error("load_model: unrecognized model file header");
  }
  VadModel model;
  auto expect_key = [&is](const char* key) {
    std::string tok;
    if (!(is >> tok) || tok != key) {
      throw std::runtime_error(std::string("load_model: expected field ") + key);
    }
  };
  expect_key("rms_threshold");
  model.rms_threshold = read_real(is);
  expect_key("segment_speech_fraction");
  model.segment_speech_fraction = read_real(is);
  expect_key("bias");
  model.bias = read_real(is);
  for (auto [name, vec] : {std::pair<const char*, FeatureVector*>{"weights", &model.weights},
                           {"feat_mean", &model.feat_mean},
                           {"feat_std", &model.feat_std}}) {
    expect_key(name);
    for (int i = 0; i < kNumCepstra; ++i) (*vec)[i] = read_real(is);
  }
  if ((model.feat_std.array() <= 0.0).any()) {
    throw std::runtime_error("load_model: feat_std must be strictly positive");
  }
  return model;
}

}  // namespace pairsense::vad
