// tools/cli/cli.cpp

// Copyright 2026  The mvae Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mvae/baseline.hpp"
#include "mvae/error.hpp"
#include "mvae/mcem.hpp"
#include "mvae/metrics.hpp"
#include "mvae/model.hpp"
#include "mvae/nn.hpp"
#include "mvae/reconstruct.hpp"
#include "mvae/simulate.hpp"
#include "mvae/stft.hpp"
#include "mvae/threads.hpp"
#include "mvae/wav.hpp"

namespace mvae::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Suffixes for --help: where a default comes from.
constexpr const char* kStandard = " [standard setting]";
constexpr const char* kChoice = " [implementation choice]";

constexpr const char* kVersion = "0.1.0";

std::string Tag(const std::string& text, const char* tag) { return text + tag; }

struct StftOptions {
  int window = 1024;
  int hop = 256;

  void Add(CLI::App* app) {
    app->add_option("--window", window, Tag("STFT window length in samples (64 ms at 16 kHz)", kStandard))
        ->capture_default_str();
    app->add_option("--hop", hop, Tag("STFT hop in samples (75% overlap)", kStandard))->capture_default_str();
  }

  StftConfig Config(int sample_rate) const {
    StftConfig cfg;
    cfg.sample_rate = sample_rate;
    cfg.window_length = window;
    cfg.hop = hop;
    cfg.Validate();
    return cfg;
  }
};

struct EnhanceOptions {
  std::string input;
  std::string weights;
  std::string output;
  int em_iters = 50;
  int mh_iters = 40;
  int burn_in = 30;
  double eps2 = 0.01;
  int kb = 10;
  std::uint64_t seed = 0;
  int recon_iters = 100;
  int recon_burn_in = 50;
  StftOptions stft;
};

struct BaselineOptions {
  std::string input;
  std::string dictionary;
  std::string output;
  int iters = 50;
  int kb = 10;
  int ks = 0;
  std::uint64_t seed = 0;
  StftOptions stft;
};

struct EvaluateOptions {
  std::vector<std::string> reference;
  std::vector<std::string> estimate;
  std::vector<std::string> mixture;
  std::string report;
  std::string csv;
};

struct PretrainOptions {
  std::vector<std::string> corpus;
  int ks = 10;
  std::string out;
  int iters = 500;
  double tolerance = 1e-6;
  std::uint64_t seed = 0;
  StftOptions stft;
};

struct InitVaeOptions {
  std::string out;
  int latent = 16;
  int bins = 513;
  std::vector<int> hidden = {128};
  std::uint64_t seed = 0;
};

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os << text;
  if (!text.empty() && text.back() != '\n') os << '\n';
  if (!os) throw IoError("failed writing " + path.string());
}

void PrepareOutputDir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
}

Waveform ReadMixture(const std::string& path) {
  Waveform w = ReadWav(path);
  if (w.num_channels() > kMaxChannels) {
    throw ConfigError(path + ": " + std::to_string(w.num_channels()) + " channels, at most " +
                      std::to_string(kMaxChannels) + " are supported");
  }
  return w;
}

json MatrixJson(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> row(m.cols());
    for (Eigen::Index j = 0; j < m.cols(); ++j) row[j] = m(i, j);
    rows.push_back(row);
  }
  return rows;
}

json StftJson(const StftConfig& cfg) {
  return {{"sample_rate", cfg.sample_rate}, {"window_length", cfg.window_length}, {"hop", cfg.hop},
          {"window", "sine"}};
}

int Enhance(const EnhanceOptions& o, std::ostream& out) {
  McemConfig cfg;
  cfg.em_iterations = o.em_iters;
  cfg.sampler.iterations = o.mh_iters;
  cfg.sampler.burn_in = o.burn_in;
  cfg.sampler.proposal_variance = o.eps2;
  cfg.noise_rank = o.kb;
  cfg.seed = o.seed;
  cfg.Validate();
  SamplerConfig recon = ReconstructionSampler();
  recon.iterations = o.recon_iters;
  recon.burn_in = o.recon_burn_in;
  recon.proposal_variance = o.eps2;
  recon.Validate();

  const Waveform input = ReadMixture(o.input);
  const StftConfig stft = o.stft.Config(input.sample_rate);
  const Vae vae(LoadVaeWeights(o.weights));
  if (vae.spectrum_dim() != stft.num_bins()) {
    throw ConfigError("network " + o.weights + " expects " + std::to_string(vae.spectrum_dim()) +
                      " frequency bins but the STFT gives " + std::to_string(stft.num_bins()));
  }
  const fs::path dir(o.output);
  PrepareOutputDir(dir);
  const MultichannelStft x = Analyze(input, stft);

  std::ofstream log(dir / "log.jsonl", std::ios::trunc);
  if (!log) throw IoError("cannot open " + (dir / "log.jsonl").string() + " for writing");
  const McemResult result = RunMcem(x, vae, cfg, [&log](const IterationRecord& r) {
    log << ToJsonLine(r) << '\n';
    log.flush();
  });
  if (!log) throw IoError("failed writing " + (dir / "log.jsonl").string());

  FrameRngs rngs(cfg.seed, kReconstructionStream, x.frames());
  const EnhancementResult images = WienerEstimate(x, result.params, vae, result.chain, recon, rngs, stft);
  WriteWav(dir / "speech.wav", images.speech_wav);
  WriteWav(dir / "noise.wav", images.noise_wav);
  SaveParams(result.params, dir / "params.json");

  json meta = {
      {"command", "enhance"},
      {"version", kVersion},
      {"input", o.input},
      {"weights", o.weights},
      {"seed", o.seed},
      {"stft", StftJson(stft)},
      {"mcem",
       {{"em_iterations", cfg.em_iterations},
        {"mh_iterations", cfg.sampler.iterations},
        {"burn_in", cfg.sampler.burn_in},
        {"proposal_variance", cfg.sampler.proposal_variance},
        {"noise_rank", cfg.noise_rank}}},
      {"reconstruction",
       {{"mh_iterations", recon.iterations},
        {"burn_in", recon.burn_in},
        {"proposal_variance", recon.proposal_variance}}},
      {"channels", x.channels()},
      {"bins", x.bins()},
      {"frames", x.frames()},
      {"samples", input.num_samples()},
      {"final_cost", result.history.empty() ? json(nullptr) : json(result.history.back().cost)},
      {"outputs", {"speech.wav", "noise.wav", "params.json", "log.jsonl"}}};
  WriteText(dir / "metadata.json", meta.dump(2));
  out << "enhanced " << o.input << " -> " << dir.string() << " (" << cfg.em_iterations
      << " EM iterations)\n";
  return 0;
}

int EnhanceBaseline(const BaselineOptions& o, std::ostream& out) {
  BaselineConfig cfg;
  cfg.iterations = o.iters;
  cfg.noise_rank = o.kb;
  cfg.seed = o.seed;
  cfg.Validate();
  const Waveform input = ReadMixture(o.input);
  const StftConfig stft = o.stft.Config(input.sample_rate);
  const SpeechDictionary dict = LoadSpeechDictionary(o.dictionary);
  if (o.ks > 0 && o.ks != dict.rank()) {
    throw ConfigError("--ks " + std::to_string(o.ks) + " does not match the rank " +
                      std::to_string(dict.rank()) + " of " + o.dictionary);
  }
  if (dict.bins() != stft.num_bins()) {
    throw ConfigError("dictionary " + o.dictionary + " has " + std::to_string(dict.bins()) +
                      " frequency bins but the STFT gives " + std::to_string(stft.num_bins()));
  }
  const fs::path dir(o.output);
  PrepareOutputDir(dir);
  const MultichannelStft x = Analyze(input, stft);

  std::ofstream log(dir / "log.jsonl", std::ios::trunc);
  if (!log) throw IoError("cannot open " + (dir / "log.jsonl").string() + " for writing");
  const double initial = BaselineCost(x, dict, InitialBaselineParams(x, dict, cfg));
  log << json{{"iteration", 0}, {"cost", initial}}.dump() << '\n';
  const BaselineResult result = RunBaseline(x, dict, cfg, stft, [&log](const BaselineRecord& r) {
    log << json{{"iteration", r.iteration}, {"cost", r.cost}}.dump() << '\n';
    log.flush();
  });
  if (!log) throw IoError("failed writing " + (dir / "log.jsonl").string());

  WriteWav(dir / "speech.wav", result.images.speech_wav);
  WriteWav(dir / "noise.wav", result.images.noise_wav);
  json params = json::parse(ParamsToJson(result.params.model));
  params["speech_act"] = MatrixJson(result.params.speech_act);
  WriteText(dir / "params.json", params.dump());
  json meta = {{"command", "enhance-baseline"},
               {"version", kVersion},
               {"input", o.input},
               {"dictionary", o.dictionary},
               {"seed", o.seed},
               {"stft", StftJson(stft)},
               {"iterations", cfg.iterations},
               {"noise_rank", cfg.noise_rank},
               {"speech_rank", dict.rank()},
               {"channels", x.channels()},
               {"bins", x.bins()},
               {"frames", x.frames()},
               {"samples", input.num_samples()},
               {"final_cost", result.history.empty() ? initial : result.history.back().cost},
               {"outputs", {"speech.wav", "noise.wav", "params.json", "log.jsonl"}}};
  WriteText(dir / "metadata.json", meta.dump(2));
  out << "enhanced " << o.input << " -> " << dir.string() << " (baseline, " << cfg.iterations
      << " iterations)\n";
  return 0;
}

int Simulate(const std::string& manifest, std::ostream& out) {
  const std::vector<ManifestItem> items = LoadManifest(manifest);
  for (const ManifestItem& item : items) {
    const double doa = SimulateItem(item);
    out << json{{"mixture", item.mixture_path.string()}, {"doa", doa}, {"snr_db", item.spec.snr_db}}.dump()
        << '\n';
  }
  return 0;
}

int Evaluate(const EvaluateOptions& o, std::ostream& out) {
  if (o.reference.size() != o.estimate.size()) {
    throw ConfigError("need as many --estimate files as --reference files");
  }
  if (!o.mixture.empty() && o.mixture.size() != o.reference.size()) {
    throw ConfigError("need as many --mixture files as --reference files");
  }
  std::vector<NamedReport> reports;
  for (std::size_t k = 0; k < o.reference.size(); ++k) {
    const Waveform ref = ReadWav(o.reference[k]);
    const Waveform est = ReadWav(o.estimate[k]);
    if (o.mixture.empty()) {
      reports.push_back({o.estimate[k], mvae::Evaluate(ref, est)});
    } else {
      const Waveform mix = ReadWav(o.mixture[k]);
      reports.push_back({o.estimate[k], mvae::Evaluate(ref, est, &mix)});
    }
  }
  const std::string report = ReportsToJson(reports);
  if (o.report.empty()) {
    out << report << '\n';
  } else {
    WriteText(o.report, report);
  }
  if (!o.csv.empty()) WriteText(o.csv, ReportsToCsv(reports));
  return 0;
}

std::vector<fs::path> CorpusFiles(const std::vector<std::string>& entries) {
  std::vector<fs::path> files;
  for (const std::string& e : entries) {
    const fs::path p(e);
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& d : fs::recursive_directory_iterator(p)) {
        if (d.is_regular_file() && d.path().extension() == ".wav") found.push_back(d.path());
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else if (fs::exists(p)) {
      files.push_back(p);
    } else {
      throw IoError("corpus entry " + e + " does not exist");
    }
  }
  return files;
}

int PretrainNmf(const PretrainOptions& o, std::ostream& out) {
  const std::vector<fs::path> files = CorpusFiles(o.corpus);
  if (files.empty()) throw ConfigError("pretrain-nmf: the corpus contains no .wav files");
  std::vector<std::vector<double>> columns;
  int bins = 0;
  for (const fs::path& f : files) {
    const Waveform w = ReadWav(f);
    const StftConfig stft = o.stft.Config(w.sample_rate);
    const MultichannelStft s = Analyze(w, stft);
    const std::vector<double> p = ChannelMeanPower(s);
    bins = s.bins();
    for (int n = 0; n < s.frames(); ++n) {
      std::vector<double> col(bins);
      for (int k = 0; k < bins; ++k) col[k] = p[static_cast<std::size_t>(k) * s.frames() + n];
      columns.push_back(std::move(col));
    }
  }
  Eigen::MatrixXd power(bins, static_cast<Eigen::Index>(columns.size()));
  for (std::size_t n = 0; n < columns.size(); ++n) {
    for (int k = 0; k < bins; ++k) power(k, static_cast<Eigen::Index>(n)) = columns[n][k];
  }
  PretrainConfig cfg;
  cfg.rank = o.ks;
  cfg.max_iterations = o.iters;
  cfg.tolerance = o.tolerance;
  cfg.seed = o.seed;
  const PretrainResult result = PretrainDictionary(power, cfg);
  SaveSpeechDictionary(result.dict, o.out);
  out << json{{"dictionary", o.out},
              {"rank", result.dict.rank()},
              {"bins", result.dict.bins()},
              {"frames", power.cols()},
              {"iterations", result.cost_history.size() - 1},
              {"final_cost", result.cost_history.back()}}
             .dump()
      << '\n';
  return 0;
}

int InitVae(const InitVaeOptions& o, std::ostream& out) {
  RandomVaeOptions opts;
  opts.latent_dim = o.latent;
  opts.spectrum_dim = o.bins;
  opts.hidden = o.hidden;
  opts.seed = o.seed;
  if (o.latent < 1 || o.bins < 1) throw ConfigError("init-vae: dimensions must be positive");
  for (int h : o.hidden) {
    if (h < 1) throw ConfigError("init-vae: hidden sizes must be positive");
  }
  SaveVaeWeights(RandomVae(opts), o.out);
  out << "wrote random network " << o.out << '\n';
  return 0;
}

void AddThreads(CLI::App* app, int& threads) {
  app->add_option("--threads", threads, Tag("worker threads, 0 = all cores", kChoice))->capture_default_str();
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multichannel speech enhancement with a VAE speech prior and NMF noise model"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  int threads = 0;

  EnhanceOptions enh;
  CLI::App* enhance = app.add_subcommand("enhance", "MCEM inference and Wiener reconstruction");
  enhance->add_option("--input", enh.input, "noisy multichannel WAV")->required();
  enhance->add_option("--weights", enh.weights, "VAE weight container")->required();
  enhance->add_option("--output", enh.output, "output directory")->required();
  enhance->add_option("--em-iters", enh.em_iters, Tag("EM iterations", kStandard))->capture_default_str();
  enhance->add_option("--mh-iters", enh.mh_iters, Tag("MH iterations per E-step", kStandard))
      ->capture_default_str();
  enhance->add_option("--burn-in", enh.burn_in, Tag("discarded MH samples per E-step", kStandard))
      ->capture_default_str();
  enhance->add_option("--eps2", enh.eps2, Tag("random-walk proposal variance", kStandard))
      ->capture_default_str();
  enhance->add_option("--kb", enh.kb, Tag("noise NMF rank", kStandard))->capture_default_str();
  enhance->add_option("--seed", enh.seed, Tag("random seed", kChoice))->capture_default_str();
  enhance->add_option("--recon-iters", enh.recon_iters, Tag("MH iterations for reconstruction", kChoice))
      ->capture_default_str();
  enhance->add_option("--recon-burn-in", enh.recon_burn_in, Tag("discarded reconstruction samples", kChoice))
      ->capture_default_str();
  enh.stft.Add(enhance);
  AddThreads(enhance, threads);

  BaselineOptions base;
  CLI::App* baseline = app.add_subcommand("enhance-baseline", "supervised speech NMF baseline");
  baseline->add_option("--input", base.input, "noisy multichannel WAV")->required();
  baseline->add_option("--dictionary", base.dictionary, "speech NMF dictionary container")->required();
  baseline->add_option("--output", base.output, "output directory")->required();
  baseline->add_option("--iters", base.iters, Tag("iterations", kStandard))->capture_default_str();
  baseline->add_option("--kb", base.kb, Tag("noise NMF rank", kStandard))->capture_default_str();
  baseline->add_option("--ks", base.ks, "expected speech dictionary rank (0 = take it from the file)");
  baseline->add_option("--seed", base.seed, Tag("random seed", kChoice))->capture_default_str();
  base.stft.Add(baseline);
  AddThreads(baseline, threads);

  std::string manifest;
  CLI::App* simulate = app.add_subcommand("simulate", "create stereo mixtures from a JSON manifest");
  simulate->add_option("--manifest", manifest, "JSON list of mixture items")->required();
  AddThreads(simulate, threads);

  EvaluateOptions ev;
  CLI::App* evaluate = app.add_subcommand("evaluate", "SI-SDR report");
  evaluate->add_option("--reference", ev.reference, "reference WAV(s)")->required();
  evaluate->add_option("--estimate", ev.estimate, "estimate WAV(s), one per reference")->required();
  evaluate->add_option("--mixture", ev.mixture, "unprocessed mixture WAV(s) for the input score");
  evaluate->add_option("--report", ev.report, "JSON report path (default: stdout)");
  evaluate->add_option("--csv", ev.csv, "CSV report path");
  AddThreads(evaluate, threads);

  PretrainOptions pre;
  CLI::App* pretrain = app.add_subcommand("pretrain-nmf", "learn a speech NMF dictionary (IS divergence)");
  pretrain->add_option("--corpus", pre.corpus, "clean speech WAV files or directories")->required();
  pretrain->add_option("--ks", pre.ks, Tag("dictionary rank", kChoice))->capture_default_str();
  pretrain->add_option("--out", pre.out, "dictionary container to write")->required();
  pretrain->add_option("--iters", pre.iters, Tag("maximum multiplicative updates", kChoice))
      ->capture_default_str();
  pretrain->add_option("--tolerance", pre.tolerance, Tag("relative cost change to stop at", kChoice))
      ->capture_default_str();
  pretrain->add_option("--seed", pre.seed, Tag("random seed", kChoice))->capture_default_str();
  pre.stft.Add(pretrain);
  AddThreads(pretrain, threads);

  InitVaeOptions iv;
  CLI::App* init = app.add_subcommand("init-vae", "write a randomly initialized network (for smoke runs)");
  init->add_option("--out", iv.out, "weight container to write")->required();
  init->add_option("--latent", iv.latent, Tag("latent dimension", kChoice))->capture_default_str();
  init->add_option("--bins", iv.bins, Tag("spectrum dimension F", kStandard))->capture_default_str();
  init->add_option("--hidden", iv.hidden, Tag("hidden layer widths", kChoice))->capture_default_str();
  init->add_option("--seed", iv.seed, Tag("random seed", kChoice))->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : static_cast<int>(ExitCode::kConfig);
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    SetThreadCount(threads);
    if (enhance->parsed()) return Enhance(enh, out);
    if (baseline->parsed()) return EnhanceBaseline(base, out);
    if (simulate->parsed()) return Simulate(manifest, out);
    if (evaluate->parsed()) return Evaluate(ev, out);
    if (pretrain->parsed()) return PretrainNmf(pre, out);
    if (init->parsed()) return InitVae(iv, out);
  } catch (const std::exception& e) {
    err << "mvae " << name << ": error: " << e.what() << '\n';
    return static_cast<int>(ExitCodeFor(e));
  }
  return static_cast<int>(ExitCode::kConfig);
}

}  // namespace mvae::cli
