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

#include "pairsense/vad/audio.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace pairsense::vad {

namespace {

constexpr double kPi = std::numbers::pi;

std::uint32_t read_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

std::uint16_t read_u16(std::istream& is) {
  unsigned char b[2];
  is.read(reinterpret_cast<char*>(b), 2);
  return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

void write_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<char*>(b), 4);
}

void write_u16(std::ostream& os, std::uint16_t v) {
  unsigned char b[2] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8)};
  os.write(reinterpret_cast<char*>(b), 2);
}

}  // namespace

AudioBuffer read_wav(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_wav: cannot open " + path.string());

  char tag[5] = {0};
  is.read(tag, 4);
  if (std::strncmp(tag, "RIFF", 4) != 0) throw std::runtime_error("read_wav: not a RIFF file");
  read_u32(is);  // riff size
  is.read(tag, 4);
  if (std::strncmp(tag, "WAVE", 4) != 0) throw std::runtime_error("read_wav: not a WAVE file");

  AudioBuffer audio;
  std::uint16_t channels = 0, bits = 0;
  bool got_fmt = false, got_data = false;
  std::vector<std::int16_t> pcm;

  while (is.read(tag, 4)) {
    std::uint32_t chunk_size = read_u32(is);
    if (std::strncmp(tag, "fmt ", 4) == 0) {
      std::uint16_t format = read_u16(is);
      channels = read_u16(is);
      audio.sample_rate_hz = static_cast<int>(read_u32(is));
      read_u32(is);  // byte rate
      read_u16(is);  // block align
      bits = read_u16(is);
      if (chunk_size > 16) is.seekg(chunk_size - 16, std::ios::cur);
      if (format != 1 || channels != 1 || bits != 16) {
        throw std::runtime_error("read_wav: only 16-bit PCM mono is supported");
      }
      got_fmt = true;
    } else if (std::strncmp(tag, "data", 4) == 0) {
      if (!got_fmt) throw std::runtime_error("read_wav: data chunk before fmt");
      pcm.resize(chunk_size / 2);
      is.read(reinterpret_cast<char*>(pcm.data()), static_cast<std::streamsize>(chunk_size));
      if (is.gcount() != static_cast<std::streamsize>(chunk_size)) {
        throw std::runtime_error("read_wav: truncated data chunk");
      }
      got_data = true;
    } else {
      is.seekg(chunk_size + (chunk_size & 1), std::ios::cur);
    }
  }
  if (!got_data) throw std::runtime_error("read_wav: missing data chunk");

  audio.samples.resize(static_cast<Eigen::Index>(pcm.size()));
  for (std::size_t i = 0; i < pcm.size(); ++i) {
    audio.samples[static_cast<Eigen::Index>(i)] = static_cast<double>(pcm[i]) / 32768.0;
  }
  return audio;
}

void write_wav(const std::filesystem::path& path, const AudioBuffer& audio) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_wav: cannot open " + path.string());
  auto n = static_cast<std::uint32_t>(audio.samples.size());
  std::uint32_t data_bytes = n * 2;

  os.write("RIFF", 4);
  write_u32(os, 36 + data_bytes);
  os.write("WAVE", 4);
  os.write("fmt ", 4);
  write_u32(os, 16);
  write_u16(os, 1);  // PCM
  write_u16(os, 1);  // mono
  write_u32(os, static_cast<std::uint32_t>(audio.sample_rate_hz));
  write_u32(os, static_cast<std::uint32_t>(audio.sample_rate_hz) * 2);
  write_u16(os, 2);
  write_u16(os, 16);
  os.write("data", 4);
  write_u32(os, data_bytes);
  for (Eigen::Index i = 0; i < audio.samples.size(); ++i) {
    double v = std::clamp(audio.samples[i], -1.0, 1.0);
    auto s = static_cast<std::int16_t>(std::lround(v * 32767.0));
    write_u16(os, static_cast<std::uint16_t>(s));
  }
}

Vec resample(const Eigen::Ref<const Vec>& samples, int from_hz, int to_hz) {
  if (from_hz <= 0 || to_hz <= 0) throw std::domain_error("resample: rates must be positive");
  if (from_hz == to_hz) return samples;
  auto out_len = static_cast<Eigen::Index>(
      static_cast<double>(samples.size()) * to_hz / from_hz);
  Vec out(out_len);
  double step = static_cast<double>(from_hz) / to_hz;
  for (Eigen::Index i = 0; i < out_len; ++i) {
    double pos = static_cast<double>(i) * step;
    auto idx = static_cast<Eigen::Index>(pos);
    double frac = pos - static_cast<double>(idx);
    double a = samples[std::min(idx, samples.size() - 1)];
    double b = samples[std::min(idx + 1, samples.size() - 1)];
    out[i] = a + frac * (b - a);
  }
  return out;
}

Vec load_audio_8k(const std::filesystem::path& path) {
  AudioBuffer audio = read_wav(path);
  return resample(audio.samples, audio.sample_rate_hz, kSampleRateHz);
}

Vec synth_speech_like(double seconds, Rng& rng) {
  auto n = static_cast<Eigen::Index>(seconds * kSampleRateHz);
  Vec out(n);
  double f0 = rng.uniform(90.0, 220.0);       // pitch
  double vibrato = rng.uniform(2.0, 6.0);     // slow pitch wobble, Hz
  double syllable_rate = rng.uniform(3.0, 5.0);
  double formant1 = rng.uniform(400.0, 800.0);
  double formant2 = rng.uniform(1200.0, 2200.0);
  double phase = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double t = static_cast<double>(i) / kSampleRateHz;
    double pitch = f0 * (1.0 + 0.03 * std::sin(2.0 * kPi * vibrato * t));
    phase += 2.0 * kPi * pitch / kSampleRateHz;
    double sample = 0.0;
    for (int h = 1; h <= 12; ++h) {
      double fh = pitch * h;
      if (fh > 3800.0) break;
      // formant-shaped harmonic weighting
      double w = 1.0 / h +
                 0.8 * std::exp(-std::pow((fh - formant1) / 150.0, 2)) +
                 0.5 * std::exp(-std::pow((fh - formant2) / 250.0, 2));
      sample += w * std::sin(phase * h);
    }
    double envelope = 0.55 + 0.45 * std::sin(2.0 * kPi * syllable_rate * t + 1.3);
    out[i] = 0.12 * envelope * sample + 0.002 * (rng.uniform() - 0.5);
  }
  double peak = out.cwiseAbs().maxCoeff();
  if (peak > 0.95) out *= 0.95 / peak;
  return out;
}

Vec synth_noise(double seconds, Rng& rng) {
  auto n = static_cast<Eigen::Index>(seconds * kSampleRateHz);
  Vec out(n);
  // one-pole lowpassed white noise; coefficient varied per clip
  double alpha = rng.uniform(0.1, 0.7);
  double level = rng.uniform(0.05, 0.25);
  double prev = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double white = 2.0 * rng.uniform() - 1.0;
    prev = alpha * prev + (1.0 - alpha) * white;
    out[i] = level * prev;
  }
  return out;
}

}  // namespace pairsense::vad
