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

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>

#include "pairsense/rng.hpp"
#include "pairsense/vad/audio.hpp"
#include "pairsense/vad/model.hpp"
#include "pairsense/vad/train.hpp"

using namespace pairsense;
using namespace pairsense::vad;

namespace {

Vec tone(double freq_hz, int samples, double amplitude = 0.5) {
  Vec v(samples);
  for (int n = 0; n < samples; ++n) {
    v[n] = amplitude * std::sin(2.0 * std::numbers::pi * freq_hz * n / kSampleRateHz);
  }
  return v;
}

// Model whose frame decision separates a low tone (Speech) from a high tone
// (NonSpeech), built directly from the two feature vectors.
VadModel two_tone_model(FeatureVector& fa, FeatureVector& fb) {
  fa = extract_mfcc(tone(300.0, kFrameSize));
  fb = extract_mfcc(tone(3000.0, kFrameSize));
  VadModel model;
  model.weights = fa - fb;
  model.bias = -model.weights.dot((fa + fb) / 2.0);
  model.rms_threshold = 0.01;
  return model;
}

std::vector<LabeledFeature> separable_set(int per_class, double center, double noise_std,
                                          Rng& rng) {
  std::vector<LabeledFeature> labeled;
  for (int i = 0; i < per_class; ++i) {
    FeatureVector s = FeatureVector::Zero();
    FeatureVector n = FeatureVector::Zero();
    s[0] = center;
    n[0] = -center;
    for (int d = 0; d < kNumCepstra; ++d) {
      s[d] += noise_std * rng.normal();
      n[d] += noise_std * rng.normal();
    }
    labeled.emplace_back(s, FrameLabel::Speech);
    labeled.emplace_back(n, FrameLabel::NonSpeech);
  }
  return labeled;
}

}  // namespace

TEST_CASE("classify_frame sign rules") {
  VadModel model;  // zero weights
  model.bias = 1.0;
  CHECK(classify_frame(model, FeatureVector::Random()) == FrameLabel::Speech);
  model.bias = -1.0;
  CHECK(classify_frame(model, FeatureVector::Random()) == FrameLabel::NonSpeech);

  model.bias = 0.0;
  model.weights = FeatureVector::Zero();
  model.weights[0] = 1.0;
  FeatureVector f = FeatureVector::Zero();
  f[0] = 2.5;
  CHECK(classify_frame(model, f) == FrameLabel::Speech);
  f[0] = -2.5;
  CHECK(classify_frame(model, f) == FrameLabel::NonSpeech);
}

TEST_CASE("classify_frame invariant under positive rescaling") {
  Rng rng(3);
  VadModel model;
  for (int i = 0; i < kNumCepstra; ++i) model.weights[i] = rng.normal();
  model.bias = rng.normal();
  VadModel scaled = model;
  scaled.weights *= 7.5;
  scaled.bias *= 7.5;
  for (int trial = 0; trial < 100; ++trial) {
    FeatureVector f;
    for (int i = 0; i < kNumCepstra; ++i) f[i] = rng.normal();
    CHECK(classify_frame(model, f) == classify_frame(scaled, f));
  }
}

TEST_CASE("decide_segment silence gate") {
  VadModel model;
  model.bias = 1.0;  // everything would classify Speech
  MfccExtractor extractor;
  CHECK(decide_segment(model, extractor, Vec::Zero(kSegmentSize)) ==
        SegmentDecision::Silence);
  CHECK_THROWS_AS(decide_segment(model, extractor, Vec::Zero(kSegmentSize - 1)),
                  std::domain_error);
}

TEST_CASE("decide_segment fraction rule") {
  FeatureVector fa, fb;
  VadModel model = two_tone_model(fa, fb);
  MfccExtractor extractor;
  CHECK(classify_frame(model, fa) == FrameLabel::Speech);
  CHECK(classify_frame(model, fb) == FrameLabel::NonSpeech);

  Vec all_speech(kSegmentSize), mixed(kSegmentSize);
  Vec low = tone(300.0, kFrameSize), high = tone(3000.0, kFrameSize);
  for (int f = 0; f < kFramesPerSegment; ++f) {
    all_speech.segment(f * kFrameSize, kFrameSize) = low;
    mixed.segment(f * kFrameSize, kFrameSize) = f < 10 ? low : high;
  }
  CHECK(decide_segment(model, extractor, all_speech) == SegmentDecision::Speech);
  // 10 of 40 speech frames: 0.25 < 0.5
  CHECK(decide_segment(model, extractor, mixed) == SegmentDecision::NonSpeech);
}

TEST_CASE("evaluate formulas") {
  FeatureVector fa, fb;
  VadModel model = two_tone_model(fa, fb);

  std::vector<LabeledFeature> labeled;
  // 100 speech frames, 80 detected; 100 noise frames, 90 detected as noise.
  for (int i = 0; i < 80; ++i) labeled.emplace_back(fa, FrameLabel::Speech);
  for (int i = 0; i < 20; ++i) labeled.emplace_back(fb, FrameLabel::Speech);
  for (int i = 0; i < 90; ++i) labeled.emplace_back(fb, FrameLabel::NonSpeech);
  for (int i = 0; i < 10; ++i) labeled.emplace_back(fa, FrameLabel::NonSpeech);
  EvalMetrics m = evaluate(model, labeled);
  CHECK(m.shr == doctest::Approx(0.80));
  CHECK(m.far == doctest::Approx(0.10));
  CHECK(m.accuracy == doctest::Approx(0.85));

  // perfect classifier
  labeled.clear();
  labeled.emplace_back(fa, FrameLabel::Speech);
  labeled.emplace_back(fb, FrameLabel::NonSpeech);
  m = evaluate(model, labeled);
  CHECK(m.accuracy == 1.0);
  CHECK(m.shr == 1.0);
  CHECK(m.far == 0.0);

  // all-Speech classifier on 50/50 data
  VadModel always;
  always.bias = 1.0;
  labeled.clear();
  for (int i = 0; i < 50; ++i) {
    labeled.emplace_back(fa, FrameLabel::Speech);
    labeled.emplace_back(fb, FrameLabel::NonSpeech);
  }
  m = evaluate(always, labeled);
  CHECK(m.accuracy == doctest::Approx(0.5));
  CHECK(m.shr == doctest::Approx(1.0));
  CHECK(m.far == doctest::Approx(1.0));

  // single class undefined
  labeled.clear();
  labeled.emplace_back(fa, FrameLabel::Speech);
  CHECK_THROWS_WITH_AS(evaluate(model, labeled),
                       "evaluate: both classes must be present, metric undefined",
                       std::domain_error);
}

TEST_CASE("accuracy identity over random confusion matrices") {
  FeatureVector fa, fb;
  VadModel model = two_tone_model(fa, fb);
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    int p = 1 + static_cast<int>(rng.uniform_index(50));
    int n = 1 + static_cast<int>(rng.uniform_index(50));
    int tp = static_cast<int>(rng.uniform_index(p + 1));
    int tn = static_cast<int>(rng.uniform_index(n + 1));
    std::vector<LabeledFeature> labeled;
    for (int i = 0; i < tp; ++i) labeled.emplace_back(fa, FrameLabel::Speech);
    for (int i = 0; i < p - tp; ++i) labeled.emplace_back(fb, FrameLabel::Speech);
    for (int i = 0; i < tn; ++i) labeled.emplace_back(fb, FrameLabel::NonSpeech);
    for (int i = 0; i < n - tn; ++i) labeled.emplace_back(fa, FrameLabel::NonSpeech);
    EvalMetrics m = evaluate(model, labeled);
    double want = (m.shr * p + (1.0 - m.far) * n) / (p + n);
    CHECK(m.accuracy == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("train on separable clusters") {
  Rng rng(21);
  auto labeled = separable_set(100, 3.0, 0.1, rng);
  TrainOptions options;
  options.seed = 5;
  TrainReport report;
  VadModel model = train(labeled, options, &report);
  CHECK(report.grid.size() == 4);

  int correct = 0;
  for (const auto& [f, label] : labeled) {
    if (classify_frame(model, f) == label) ++correct;
  }
  CHECK(correct == static_cast<int>(labeled.size()));

  // held-out set from the same distribution
  auto holdout = separable_set(60, 3.0, 0.1, rng);
  correct = 0;
  for (const auto& [f, label] : holdout) {
    if (classify_frame(model, f) == label) ++correct;
  }
  CHECK(static_cast<double>(correct) / holdout.size() >= 0.99);
}

TEST_CASE("train duplicate-set invariance and determinism") {
  Rng rng(22);
  auto labeled = separable_set(40, 3.0, 0.1, rng);
  TrainOptions options;
  options.seed = 5;
  VadModel a = train(labeled, options);
  VadModel a2 = train(labeled, options);
  CHECK(a.weights == a2.weights);  // bit-identical rerun
  CHECK(a.bias == a2.bias);

  std::vector<LabeledFeature> doubled = labeled;
  doubled.insert(doubled.end(), labeled.begin(), labeled.end());
  VadModel b = train(doubled, options);
  CHECK((a.weights - b.weights).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(std::abs(a.bias - b.bias) < 1e-9);
}

TEST_CASE("train rejects degenerate inputs") {
  Rng rng(23);
  std::vector<LabeledFeature> one_class;
  for (int i = 0; i < 20; ++i) {
    one_class.emplace_back(FeatureVector::Zero(), FrameLabel::Speech);
  }
  CHECK_THROWS(train(one_class));
}

TEST_CASE("model persistence round trip is exact") {
  Rng rng(24);
  VadModel model;
  for (int i = 0; i < kNumCepstra; ++i) {
    model.weights[i] = rng.normal();
    model.feat_mean[i] = rng.normal();
    model.feat_std[i] = 0.5 + rng.uniform();
  }
  model.bias = rng.normal();
  model.rms_threshold = 0.0123456789;
  auto path = std::filesystem::temp_directory_path() / "pairsense_model_test.txt";
  save_model(model, path);
  VadModel loaded = load_model(path);
  CHECK(loaded.weights == model.weights);
  CHECK(loaded.bias == model.bias);
  CHECK(loaded.feat_mean == model.feat_mean);
  CHECK(loaded.feat_std == model.feat_std);
  CHECK(loaded.rms_threshold == model.rms_threshold);
  CHECK(loaded.segment_speech_fraction == model.segment_speech_fraction);
  std::filesystem::remove(path);
}

TEST_CASE("latency measurement runs and rejects empty batches") {
  VadModel model;
  MfccExtractor extractor;
  std::vector<Vec> frames(8, Vec::Zero(kFrameSize));
  double mean_s = measure_frame_latency(model, extractor, frames);
  CHECK(mean_s >= 0.0);
  CHECK_THROWS_AS(measure_frame_latency(model, extractor, {}), std::domain_error);
}

TEST_CASE("rms threshold calibration picks a percentile") {
  VadModel model;
  Vec ambient(3 * kSegmentSize);
  ambient.segment(0, kSegmentSize).setConstant(0.01);
  ambient.segment(kSegmentSize, kSegmentSize).setConstant(0.02);
  ambient.segment(2 * kSegmentSize, kSegmentSize).setConstant(0.03);
  double t = calibrate_rms_threshold(model, ambient, 50.0);
  CHECK(t == doctest::Approx(0.02).epsilon(1e-9));
  CHECK(model.rms_threshold == doctest::Approx(0.02).epsilon(1e-9));
}

TEST_CASE("wav round trip and resampling") {
  Rng rng(25);
  AudioBuffer audio;
  audio.samples = synth_speech_like(0.5, rng);
  auto path = std::filesystem::temp_directory_path() / "pairsense_wav_test.wav";
  write_wav(path, audio);
  AudioBuffer back = read_wav(path);
  CHECK(back.sample_rate_hz == kSampleRateHz);
  CHECK(back.samples.size() == audio.samples.size());
  // 16-bit quantization error bound
  CHECK((back.samples - audio.samples).cwiseAbs().maxCoeff() < 1.0 / 32000.0);
  std::filesystem::remove(path);

  Vec same = resample(audio.samples, kSampleRateHz, kSampleRateHz);
  CHECK(same == audio.samples);
  Vec down = resample(audio.samples, 44100, 8000);
  CHECK(down.size() > 0);
  CHECK(down.size() < audio.samples.size());
}
