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

#include <Eigen/Dense>

namespace pairsense::vad {

inline constexpr int kSampleRateHz = 8000;
inline constexpr int kFrameSize = 200;  // 25 ms, non-overlapping
inline constexpr int kFramesPerSegment = 40;
inline constexpr int kSegmentSize = kFrameSize * kFramesPerSegment;  // 1 s
inline constexpr int kNumCepstra = 12;  // MFCC 2..13, c0 excluded

using Vec = Eigen::VectorXd;
using FeatureVector = Eigen::Matrix<double, kNumCepstra, 1>;

struct DspConfig {
  int fft_size = 256;  // frame zero-padded to this length
  int num_filters = 26;
  double low_freq_hz = 0.0;
  double high_freq_hz = 4000.0;
  double log_floor = 1e-10;
};

// Root mean square of a frame (or any sample block).
double rms(const Eigen::Ref<const Vec>& samples);

// MFCC front end: Hamming window -> DFT magnitude -> triangular mel
// filterbank -> floored log -> orthogonal DCT-II, keeping coefficients 2..13.
// The window, filterbank, and DCT rows are precomputed at construction.
class MfccExtractor {
 public:
  explicit MfccExtractor(const DspConfig& config = DspConfig{});

  FeatureVector extract(const Eigen::Ref<const Vec>& frame) const;

  const DspConfig& config() const { return config_; }

 private:
  DspConfig config_;
  Vec window_;                 // kFrameSize
  Eigen::MatrixXd filterbank_;  // num_filters x (fft_size/2 + 1)
  Eigen::MatrixXd dct_rows_;    // kNumCepstra x num_filters (rows 1..12 of DCT-II)
};

// Convenience wrapper over a process-wide default-config extractor.
FeatureVector extract_mfcc(const Eigen::Ref<const Vec>& frame);

}  // namespace pairsense::vad
