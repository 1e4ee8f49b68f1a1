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
// Straight-line reference MFCC, deliberately naive (O(N^2) DFT, direct
// filterbank and DCT sums) and independent of the library implementation.
// The front-end contract it encodes: Hamming window over the 200-sample
// frame, zero-padding to 256, DFT magnitude over bins 0..128, 26 triangular
// filters with edges equally spaced on the mel scale between 0 and 4000 Hz,
// log with floor 1e-10, orthogonal DCT-II keeping coefficients 2..13.

#pragma once

#include <cmath>
#include <vector>

namespace reference {

inline std::vector<double> mfcc(const std::vector<double>& frame) {
  const double pi = 3.14159265358979323846;
  const int frame_size = 200;
  const int fft_size = 256;
  const int num_bins = fft_size / 2 + 1;
  const int num_filters = 26;
  const double sample_rate = 8000.0;
  const double log_floor = 1e-10;

  // window + zero pad
  std::vector<double> x(fft_size, 0.0);
  for (int n = 0; n < frame_size; ++n) {
    double w = 0.54 - 0.46 * std::cos(2.0 * pi * n / (frame_size - 1));
    x[n] = frame[n] * w;
  }

  // naive DFT magnitude
  std::vector<double> mag(num_bins);
  for (int k = 0; k < num_bins; ++k) {
    double re = 0.0, im = 0.0;
    for (int n = 0; n < fft_size; ++n) {
      double ang = -2.0 * pi * k * n / fft_size;
      re += x[n] * std::cos(ang);
      im += x[n] * std::sin(ang);
    }
    mag[k] = std::sqrt(re * re + im * im);
  }

  // mel filterbank
  auto hz_to_mel = [](double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); };
  auto mel_to_hz = [](double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); };
  double mel_hi = hz_to_mel(sample_rate / 2.0);
  std::vector<double> edges(num_filters + 2);
  for (int i = 0; i < num_filters + 2; ++i) {
    edges[i] = mel_to_hz(mel_hi * i / (num_filters + 1));
  }
  std::vector<double> log_e(num_filters);
  for (int m = 0; m < num_filters; ++m) {
    double left = edges[m], center = edges[m + 1], right = edges[m + 2];
    double e = 0.0;
    for (int k = 0; k < num_bins; ++k) {
      double f = k * sample_rate / fft_size;
      double weight = 0.0;
      if (f > left && f < center) {
        weight = (f - left) / (center - left);
      } else if (f >= center && f < right) {
        weight = (right - f) / (right - center);
      }
      e += weight * mag[k];
    }
    if (e < log_floor) e = log_floor;
    log_e[m] = std::log(e);
  }

  // orthogonal DCT-II, coefficients 2..13 (indices 1..12)
  std::vector<double> out(12);
  for (int k = 1; k <= 12; ++k) {
    double c = 0.0;
    for (int n = 0; n < num_filters; ++n) {
      c += log_e[n] * std::cos(pi * k * (n + 0.5) / num_filters);
    }
    out[k - 1] = c * std::sqrt(2.0 / num_filters);
  }
  return out;
}

}  // namespace reference
