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

#include <filesystem>
#include <utility>
#include <vector>

#include "pairsense/vad/dsp.hpp"

namespace pairsense::vad {

enum class FrameLabel { NonSpeech = 0, Speech = 1 };

enum class SegmentDecision { Silence, Speech, NonSpeech };

// Two-stage detector: an RMS no-silence gate followed by a linear classifier
// over standardized MFCC features.
struct VadModel {
  FeatureVector weights = FeatureVector::Zero();
  double bias = 0.0;
  FeatureVector feat_mean = FeatureVector::Zero();
  FeatureVector feat_std = FeatureVector::Ones();  // strictly positive
  double rms_threshold = 0.01;                     // full-scale amplitude, (0, 1)
  double segment_speech_fraction = 0.5;            // (0, 1]
};

struct EvalMetrics {
  double accuracy = 0.0;
  double shr = 0.0;  // speech hit rate
  double far = 0.0;  // false alarm rate = 1 - noise hit rate
};

using LabeledFeature = std::pair<FeatureVector, FrameLabel>;

FrameLabel classify_frame(const VadModel& model, const FeatureVector& features);

// Decide one 1-second segment (8000 samples): Silence when the whole-second
// RMS is under the gate, otherwise Speech when at least
// segment_speech_fraction of the 40 frames classify Speech.
SegmentDecision decide_segment(const VadModel& model, const MfccExtractor& extractor,
                               const Eigen::Ref<const Vec>& segment);

// Accuracy, SHR and FAR over labeled frames. Both classes must be present.
EvalMetrics evaluate(const VadModel& model, const std::vector<LabeledFeature>& labeled);

// Wall-clock mean of extract + classify per frame, in seconds.
double measure_frame_latency(const VadModel& model, const MfccExtractor& extractor,
                             const std::vector<Vec>& frames);

// Sets rms_threshold to the given percentile of per-second RMS over an
// ambient recording. Returns the chosen threshold.
double calibrate_rms_threshold(VadModel& model, const Eigen::Ref<const Vec>& ambient,
                               double percentile = 25.0);

// Versioned flat-file persistence; reals stored as hexfloats so the
// round trip is exact.
void save_model(const VadModel& model, const std::filesystem::path& path);
VadModel load_model(const std::filesystem::path& path);

}  // namespace pairsense::vad
