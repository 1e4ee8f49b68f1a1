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

#include "pairsense/rng.hpp"
#include "pairsense/vad/dsp.hpp"

namespace pairsense::vad {

struct AudioBuffer {
  Vec samples;  // amplitudes in [-1, 1]
  int sample_rate_hz = kSampleRateHz;
};

// 16-bit PCM mono WAV.
AudioBuffer read_wav(const std::filesystem::path& path);
void write_wav(const std::filesystem::path& path, const AudioBuffer& audio);

// Linear-interpolation resampler; identity when already at the target rate.
Vec resample(const Eigen::Ref<const Vec>& samples, int from_hz, int to_hz);

// read_wav + resample to the 8 kHz pipeline rate.
Vec load_audio_8k(const std::filesystem::path& path);

// Synthetic fixture signals at 8 kHz. Speech-like: pitch-modulated harmonic
// stack with formant emphasis and syllabic amplitude modulation. Noise:
// filtered broadband noise.
Vec synth_speech_like(double seconds, Rng& rng);
Vec synth_noise(double seconds, Rng& rng);

}  // namespace pairsense::vad
