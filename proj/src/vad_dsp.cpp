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

#include "pairsense/vad/dsp.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace pairsense::vad {

namespace {

constexpr double kPi = std::numbers::pi;

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

// In-place iterative radix-2 FFT. fft_size must be a power of two.
void fft_radix2(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    double ang = -2.0 * kPi / static_cast<double>(len);
    std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        std::complex<double> u = a[i + k];
        std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

}  // namespace

double rms(const Eigen::Ref<const Vec>& samples) {
  if (samples.size() == 0) return 0.0;
  return std::sqrt(samples.squaredNorm() / static_cast<double>(samples.size()));
}

MfccExtractor::MfccExtractor(const DspConfig& config) : config_(config) {
  if (config_.fft_size < kFrameSize || (config_.fft_size & (config_.fft_size - 1)) != 0) {
    throw std::invalid_argument("MfccExtractor: fft_size must be a power of two >= frame size");
  }
  if (config_.num_filters < kNumCepstra + 1) {
    throw std::invalid_argument("MfccExtractor: need more filters than kept cepstra");
  }

  window_.resize(kFrameSize);
  for (int n = 0; n < kFrameSize; ++n) {
    window_[n] = 0.54 - 0.46 * std::cos(2.0 * kPi * n / (kFrameSize - 1));
  }

  const int num_bins = config_.fft_size / 2 + 1;
  const double bin_hz = static_cast<double>(kSampleRateHz) / config_.fft_size;
  const double mel_lo = hz_to_mel(config_.low_freq_hz);
  const double mel_hi = hz_to_mel(config_.high_freq_hz);

  // Filter edges equally spaced on the mel scale.
  std::vector<double> edges_hz(config_.num_filters + 2);
  for (int i = 0; i < config_.num_filters + 2; ++i) {
    double mel = mel_lo + (mel_hi - mel_lo) * i / (config_.num_filters + 1);
    edges_hz[i] = mel_to_hz(mel);
  }

  filterbank_ = Eigen::MatrixXd::Zero(config_.num_filters, num_bins);
  for (int m = 0; m < config_.num_filters; ++m) {
    double left = edges_hz[m], center = edges_hz[m + 1], right = edges_hz[m + 2];
    for (int k = 0; k < num_bins; ++k) {
      double f = k * bin_hz;
      if (f > left && f < center) {
        filterbank_(m, k) = (f - left) / (center - left);
      } else if (f >= center && f < right) {
        filterbank_(m, k) = (right - f) / (right - center);
      }
    }
  }

  // Orthogonal DCT-II rows 1..kNumCepstra (row 0 carries overall gain and is
  // dropped).
  const int nf = config_.num_filters;
  dct_rows_.resize(kNumCepstra, nf);
  for (int k = 1; k <= kNumCepstra; ++k) {
    for (int n = 0; n < nf; ++n) {
      dct_rows_(k - 1, n) = std::sqrt(2.0 / nf) * std::cos(kPi * k * (n + 0.5) / nf);
    }
  }
}

FeatureVector MfccExtractor::extract(const Eigen::Ref<const Vec>& frame) const {
  if (frame.size() != kFrameSize) {
    throw std::domain_error("extract: frame must hold exactly 200 samples");
  }
  // all filter energies sit on the log floor, and the DCT rows kept here sum
  // a constant to exactly zero; short-circuit so the identity holds in floats
  if (frame.isZero(0.0)) return FeatureVector::Zero();

  std::vector<std::complex<double>> buf(static_cast<std::size_t>(config_.fft_size),
                                        std::complex<double>(0.0, 0.0));
  for (int n = 0; n < kFrameSize; ++n) {
    buf[static_cast<std::size_t>(n)] = frame[n] * window_[n];
  }
  fft_radix2(buf);

  const int num_bins = config_.fft_size / 2 + 1;
  Vec magnitude(num_bins);
  for (int k = 0; k < num_bins; ++k) {
    magnitude[k] = std::abs(buf[static_cast<std::size_t>(k)]);
  }

  Vec energies = filterbank_ * magnitude;
  Vec log_energies = energies.cwiseMax(config_.log_floor).array().log().matrix();
  return dct_rows_ * log_energies;
}

FeatureVector extract_mfcc(const Eigen::Ref<const Vec>& frame) {
  static const MfccExtractor extractor;
  return extractor.extract(frame);
}

}  // namespace pairsense::vad
