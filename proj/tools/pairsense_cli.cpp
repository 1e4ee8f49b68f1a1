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
// Single command-line entry point:
//   pairsense vad train|eval|classify ...
//   pairsense sim run|compare ...
//   pairsense metrics ...
//   pairsense logparse ...
// Exit codes: 0 success, 1 domain error, 2 usage error.

#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pairsense/obslog.hpp"
#include "pairsense/sim/engine.hpp"
#include "pairsense/sim/scenario.hpp"
#include "pairsense/vad/audio.hpp"
#include "pairsense/vad/model.hpp"
#include "pairsense/vad/train.hpp"

namespace {

using namespace pairsense;

std::vector<vad::LabeledFeature> load_labeled(const std::vector<std::string>& speech_wavs,
                                              const std::vector<std::string>& noise_wavs,
                                              double synth_seconds, std::uint64_t seed) {
  vad::MfccExtractor extractor;
  std::vector<vad::LabeledFeature> labeled;
  auto add = [&](const vad::Vec& audio, vad::FrameLabel label) {
    for (int f = 0; f + vad::kFrameSize <= audio.size(); f += vad::kFrameSize) {
      labeled.emplace_back(extractor.extract(audio.segment(f, vad::kFrameSize)), label);
    }
  };
  for (const auto& p : speech_wavs) add(vad::load_audio_8k(p), vad::FrameLabel::Speech);
  for (const auto& p : noise_wavs) add(vad::load_audio_8k(p), vad::FrameLabel::NonSpeech);
  if (synth_seconds > 0.0) {
    Rng rng(seed);
    add(vad::synth_speech_like(synth_seconds, rng), vad::FrameLabel::Speech);
    add(vad::synth_noise(synth_seconds, rng), vad::FrameLabel::NonSpeech);
  }
  return labeled;
}

int cmd_vad_train(const std::vector<std::string>& speech, const std::vector<std::string>& noise,
                  double synth_seconds, const std::string& model_path, std::uint64_t seed) {
  auto labeled = load_labeled(speech, noise, synth_seconds, seed);
  vad::TrainOptions options;
  options.seed = seed;
  vad::TrainReport report;
  vad::VadModel model = vad::train(labeled, options, &report);
  vad::save_model(model, model_path);
  std::cout << "trained on " << labeled.size() << " frames\n";
  for (const auto& r : report.grid) {
    std::cout << "  lambda " << r.lambda << "  cv accuracy " << std::fixed
              << std::setprecision(4) << r.cv_accuracy << "\n";
  }
  std::cout << "chosen lambda " << report.chosen_lambda << "\nmodel written to "
            << model_path << "\n";
  return 0;
}

int cmd_vad_eval(const std::vector<std::string>& speech, const std::vector<std::string>& noise,
                 double synth_seconds, const std::string& model_path, std::uint64_t seed) {
  vad::VadModel model = vad::load_model(model_path);
  auto labeled = load_labeled(speech, noise, synth_seconds, seed);
  vad::EvalMetrics m = vad::evaluate(model, labeled);
  std::cout << std::fixed << std::setprecision(4) << "accuracy " << m.accuracy << "\nshr "
            << m.shr << "\nfar " << m.far << "\n";
  return 0;
}

int cmd_vad_classify(const std::string& wav_path, const std::string& model_path) {
  vad::VadModel model = vad::load_model(model_path);
  vad::MfccExtractor extractor;
  vad::Vec audio = vad::load_audio_8k(wav_path);
  long seconds = audio.size() / vad::kSegmentSize;
  for (long s = 0; s < seconds; ++s) {
    auto decision = vad::decide_segment(model, extractor,
                                        audio.segment(s * vad::kSegmentSize, vad::kSegmentSize));
    const char* name = decision == vad::SegmentDecision::Silence    ? "Silence"
                       : decision == vad::SegmentDecision::Speech   ? "Speech"
                                                                    : "NonSpeech";
    std::cout << s << "\t" << name << "\n";
  }
  return 0;
}

sim::Scenario load_or_default(const std::string& config, std::optional<std::uint64_t> seed,
                              const std::string& mode) {
  sim::Scenario scenario =
      config.empty() ? sim::default_scenario() : sim::load_scenario(config);
  if (seed) scenario.seed = *seed;
  if (mode == "dsp") {
    scenario.mode = sim::VadMode::Dsp;
  } else if (mode == "ground-truth") {
    scenario.mode = sim::VadMode::GroundTruth;
  } else if (!mode.empty()) {
    throw std::runtime_error("mode must be 'dsp' or 'ground-truth'");
  }
  return scenario;
}

int cmd_sim_run(const std::string& config, std::optional<std::uint64_t> seed,
                const std::string& mode, const std::string& out_dir) {
  sim::Scenario scenario = load_or_default(config, seed, mode);
  sim::RunResult result = sim::run(scenario);
  sim::write_outputs(result, out_dir);
  std::cout << sim::format_report(result.report);
  std::cout << "outputs written to " << out_dir << "\n";
  return 0;
}

std::string pct(const std::optional<double>& v) {
  if (!v) return "n/a";
  std::ostringstream os;
  os << std::fixed << std::setprecision(1) << *v << "%";
  return os.str();
}

int cmd_sim_compare(const std::string& config, std::optional<std::uint64_t> seed,
                    const std::string& mode) {
  sim::Scenario scenario = load_or_default(config, seed, mode);
  sim::PolicyRates rates = sim::compare_policies(scenario);
  std::cout << "conversation-capture rate by policy\n"
            << "  interaction-triggered .... " << pct(rates.triggered) << "\n"
            << "  scheduled fixed minute ... " << pct(rates.scheduled) << "\n"
            << "  random minute ............ " << pct(rates.random) << "\n";
  return 0;
}

int cmd_metrics(const std::string& logs_dir, const std::string& annotations_path) {
  namespace fs = std::filesystem;
  std::vector<obslog::LogRecord> records;
  std::vector<fs::path> files;
  if (!fs::is_directory(logs_dir)) throw std::runtime_error("not a directory: " + logs_dir);
  for (const auto& entry : fs::directory_iterator(logs_dir)) files.push_back(entry.path());
  if (files.empty()) throw std::runtime_error("no log files in " + logs_dir);
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    auto parsed = obslog::parse_log_file(f.string());
    records.insert(records.end(), parsed.begin(), parsed.end());
  }
  obslog::CollectionCounts counts = sim::derive_counts(records);
  obslog::validate(counts);
  obslog::CollectionMetrics cm = obslog::collection_metrics(counts);

  std::cout << "collection\n"
            << "  total expected ............. " << counts.total_expected << "\n"
            << "  expected, app running ...... " << counts.expected_app_running << "\n"
            << "  sensor data collected ...... " << counts.sensor_collected << "\n"
            << "  self-reports triggered ..... " << counts.selfreport_triggered << "\n"
            << "  self-reports started ....... " << counts.selfreport_started << "\n"
            << "  self-reports completed ..... " << counts.selfreport_completed << "\n"
            << "collection rates\n"
            << "  collected / total .......... " << pct(cm.collected_of_total) << "\n"
            << "  collected / app running .... " << pct(cm.collected_of_running) << "\n"
            << "  triggered / total .......... " << pct(cm.triggered_of_total) << "\n"
            << "  triggered / app running .... " << pct(cm.triggered_of_running) << "\n"
            << "  started / triggered ........ " << pct(cm.started_of_triggered) << "\n"
            << "  completed / triggered ...... " << pct(cm.completed_of_triggered) << "\n";

  if (!annotations_path.empty()) {
    auto annotations = obslog::read_annotations_csv(annotations_path);
    obslog::ConversationMetrics v = obslog::conversation_metrics(annotations);
    std::cout << "conversation content (" << annotations.size() << " recordings)\n"
              << "  speech, overall ............ " << pct(v.speech_overall) << "\n"
              << "  speech, triggered .......... " << pct(v.speech_triggered) << "\n"
              << "  speech, backup ............. " << pct(v.speech_backup) << "\n"
              << "  conversation, overall ...... " << pct(v.conversation_overall) << "\n"
              << "  conversation, triggered .... " << pct(v.conversation_triggered) << "\n"
              << "  either spoke, triggered .... " << pct(v.either_spoke_triggered) << "\n"
              << "  conversation, backup ....... " << pct(v.conversation_backup) << "\n";
  }
  return 0;
}

int cmd_logparse(const std::vector<std::string>& files) {
  long total = 0;
  for (const auto& f : files) {
    auto records = obslog::parse_log_file(f);
    total += static_cast<long>(records.size());
    std::cout << f << ": " << records.size() << " records\n";
  }
  std::cout << total << " records parsed, all valid\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"interaction-triggered dyadic sensing toolkit"};
  app.require_subcommand(1);

  // vad
  auto* vad_cmd = app.add_subcommand("vad", "voice activity detection");
  vad_cmd->require_subcommand(1);
  std::vector<std::string> speech_wavs, noise_wavs;
  std::string model_path = "vad-model.txt";
  double synth_seconds = 0.0;
  std::uint64_t vad_seed = 0;
  std::string classify_wav;

  auto* train = vad_cmd->add_subcommand("train", "train the frame classifier");
  train->add_option("--speech", speech_wavs, "speech-labeled WAV files");
  train->add_option("--noise", noise_wavs, "non-speech WAV files");
  train->add_option("--synth-seconds", synth_seconds,
                    "append this many synthetic seconds per class");
  train->add_option("--model", model_path, "output model path");
  train->add_option("--seed", vad_seed, "fold-assignment / synthesis seed");

  auto* eval = vad_cmd->add_subcommand("eval", "evaluate a trained model");
  eval->add_option("--speech", speech_wavs, "speech-labeled WAV files");
  eval->add_option("--noise", noise_wavs, "non-speech WAV files");
  eval->add_option("--synth-seconds", synth_seconds,
                   "append this many synthetic seconds per class");
  eval->add_option("--model", model_path, "model path")->required();
  eval->add_option("--seed", vad_seed, "synthesis seed");

  auto* classify = vad_cmd->add_subcommand("classify", "per-second decisions for a WAV");
  classify->add_option("wav", classify_wav, "input WAV")->required();
  classify->add_option("--model", model_path, "model path")->required();

  // sim
  auto* sim_cmd = app.add_subcommand("sim", "study simulation");
  sim_cmd->require_subcommand(1);
  std::string config, out_dir = "out", mode;
  std::optional<std::uint64_t> sim_seed;
  std::uint64_t seed_value = 0;

  auto* sim_run = sim_cmd->add_subcommand("run", "run a scenario and write outputs");
  sim_run->add_option("--config", config, "scenario JSON (defaults when omitted)");
  sim_run->add_option("--out-dir", out_dir, "output directory");
  auto* seed_opt_run = sim_run->add_option("--seed", seed_value, "seed override");
  sim_run->add_option("--mode", mode, "vad mode: dsp|ground-truth");

  auto* sim_compare = sim_cmd->add_subcommand("compare", "per-policy capture rates");
  sim_compare->add_option("--config", config, "scenario JSON (defaults when omitted)");
  auto* seed_opt_cmp = sim_compare->add_option("--seed", seed_value, "seed override");
  sim_compare->add_option("--mode", mode, "vad mode: dsp|ground-truth");

  // metrics
  auto* metrics = app.add_subcommand("metrics", "recompute study metrics from logs");
  std::string logs_dir, annotations_path;
  metrics->add_option("--logs", logs_dir, "directory of log files")->required();
  metrics->add_option("--annotations", annotations_path, "annotation CSV");

  // logparse
  auto* logparse = app.add_subcommand("logparse", "parse and validate log files");
  std::vector<std::string> parse_files;
  logparse->add_option("files", parse_files, "log files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (seed_opt_run->count() || seed_opt_cmp->count()) sim_seed = seed_value;

  try {
    if (train->parsed()) {
      return cmd_vad_train(speech_wavs, noise_wavs, synth_seconds, model_path, vad_seed);
    }
    if (eval->parsed()) {
      return cmd_vad_eval(speech_wavs, noise_wavs, synth_seconds, model_path, vad_seed);
    }
    if (classify->parsed()) return cmd_vad_classify(classify_wav, model_path);
    if (sim_run->parsed()) return cmd_sim_run(config, sim_seed, mode, out_dir);
    if (sim_compare->parsed()) return cmd_sim_compare(config, sim_seed, mode);
    if (metrics->parsed()) return cmd_metrics(logs_dir, annotations_path);
    if (logparse->parsed()) return cmd_logparse(parse_files);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cerr << "error: no command\n";
  return 2;
}
