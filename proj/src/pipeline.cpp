// Copyright 2026 The cepnet Authors
// SPDX-License-Identifier: Apache-2.0

#include "cepnet/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <string>

#include "cepnet/cepstral.hpp"
#include "cepnet/errors.hpp"
#include "cepnet/trainer.hpp"

namespace cepnet::pipeline {
namespace {

StructureId effective_structure(const EnhanceOptions& opts) {
  return opts.mode == Mode::kCnnTime ? StructureId::kTime : opts.structure;
}

std::vector<double> run_cnn(const AudioSignal& coded, const EnhanceOptions& opts,
                            const cnn::CnnModel& model) {
  const StructureId sid = effective_structure(opts);
  const trainer::Domain domain =
      opts.mode == Mode::kCnnTime ? trainer::Domain::kTime : trainer::Domain::kCepstral;
  const std::size_t want = trainer::feature_len(sid, domain, coded.sample_rate_hz);
  if (model.config.input_len != want) {
    throw ConfigError("model L=" + std::to_string(model.config.input_len) +
                      " does not fit structure " + std::string(structure_name(sid)) +
                      " at " + std::to_string(coded.sample_rate_hz) + " Hz (needs L=" +
                      std::to_string(want) + ")");
  }
  const FrameworkStructure& s = structure(sid);
  const FrameGeometry g = geometry(s, coded.sample_rate_hz);
  const cepstral::CepstralConfig cc = cepstral::config_for_frame_length(g.processing_len);

  FrameSequence seq = analyze(coded, s);
  cnn::Workspace ws(model.config);
  for (auto& frame : seq.frames) {
    if (domain == trainer::Domain::kTime) {
      const auto y = cnn::forward(model, frame, ws);
      std::copy(y.begin(), y.end(), frame.begin());
      continue;
    }
    cepstral::CepstralFrame cf = cepstral::analyze_frame(frame, cc);
    const auto env = cnn::forward(model, cf.c_env, ws);
    cf.c_env.assign(env.begin(), env.end());
    if (opts.c0_floor) cf.c_env = cepstral::c0_floor(cf.c_env, cc);
    const std::vector<double> out = cepstral::synthesize_frame(cf, cc);
    std::copy_n(out.begin(), frame.size(), frame.begin());
  }
  AudioSignal rec = reconstruct(seq);
  return {rec.samples.begin() + static_cast<std::ptrdiff_t>(g.delay),
          rec.samples.begin() + static_cast<std::ptrdiff_t>(g.delay + coded.size())};
}

std::vector<double> run_postfilter(const AudioSignal& coded, const EnhanceOptions& opts,
                                   std::span<const std::uint8_t> codewords) {
  postfilter::PostfilterConfig cfg = opts.postfilter;
  cfg.law = opts.law;
  const std::size_t d = cfg.delay();
  // Flush the filter with trailing zeros so every input sample comes out.
  AudioSignal padded = coded;
  padded.samples.resize(coded.size() + d, 0.0);
  std::vector<std::uint8_t> codes;
  if (!codewords.empty()) {
    codes.assign(codewords.begin(), codewords.end());
    codes.resize(padded.size(), g711::encode(0.0, opts.law));
  }
  const AudioSignal y = postfilter::apply(padded, cfg, codes);
  return {y.samples.begin() + static_cast<std::ptrdiff_t>(d), y.samples.end()};
}

}  // namespace

Mode parse_mode(std::string_view name) {
  if (name == "time") return Mode::kCnnTime;
  if (name == "cepstral") return Mode::kCnnCepstral;
  if (name == "postfilter" || name == "baseline") return Mode::kBaselinePostfilter;
  throw ArgumentError("unknown mode '" + std::string(name) + "' (time|cepstral|postfilter)");
}

std::string_view mode_name(Mode m) {
  switch (m) {
    case Mode::kCnnTime: return "time";
    case Mode::kCnnCepstral: return "cepstral";
    case Mode::kBaselinePostfilter: return "postfilter";
  }
  return "?";
}

std::size_t delay_samples(const EnhanceOptions& opts, int sample_rate_hz) {
  if (opts.mode == Mode::kBaselinePostfilter) return opts.postfilter.delay();
  return geometry(structure(effective_structure(opts)), sample_rate_hz).delay;
}

AudioSignal enhance(const AudioSignal& coded, const EnhanceOptions& opts,
                    const cnn::CnnModel* model) {
  if (!is_supported_rate(coded.sample_rate_hz)) {
    throw ArgumentError("enhance: unsupported sample rate " +
                        std::to_string(coded.sample_rate_hz));
  }
  if (opts.mode == Mode::kBaselinePostfilter && coded.sample_rate_hz != 8000) {
    throw ArgumentError("enhance: the postfilter runs on 8 kHz G.711 speech only");
  }
  if (opts.constrain && coded.sample_rate_hz != 8000) {
    throw ArgumentError("enhance: the quantization constraint needs 8 kHz G.711 input");
  }
  if (opts.mode != Mode::kBaselinePostfilter && model == nullptr) {
    throw ConfigError("enhance: CNN mode without a model");
  }

  // G.711 is memoryless, so re-encoding the decoded input restores the
  // transmitted codewords.
  std::vector<std::uint8_t> codewords;
  if (opts.constrain) codewords = g711::encode(coded.samples, opts.law);

  AudioSignal out;
  out.sample_rate_hz = coded.sample_rate_hz;
  if (coded.empty()) return out;
  if (opts.mode == Mode::kBaselinePostfilter && !opts.align) {
    // The postfilter is causal already; it constrains against the delayed
    // codewords itself.
    postfilter::PostfilterConfig cfg = opts.postfilter;
    cfg.law = opts.law;
    return postfilter::apply(coded, cfg, codewords);
  }
  out.samples = opts.mode == Mode::kBaselinePostfilter
                    ? run_postfilter(coded, opts, codewords)
                    : run_cnn(coded, opts, *model);
  if (opts.constrain) out = g711::constrain(out, codewords, opts.law);

  if (!opts.align) {
    const std::size_t d = std::min(delay_samples(opts, coded.sample_rate_hz), out.size());
    out.samples.insert(out.samples.begin(), d, 0.0);
    out.samples.resize(coded.size());
  }
  clamp_to_pcm_range(out.samples);
  return out;
}

AudioSignal enhance(const EnhanceJob& job) {
  const AudioSignal coded = read_wav(job.input);
  std::optional<cnn::CnnModel> model;
  if (job.options.mode != Mode::kBaselinePostfilter) {
    if (job.model.empty()) throw ConfigError("enhance: CNN mode needs --model");
    model = cnn::load(job.model);
  }
  AudioSignal out = enhance(coded, job.options, model ? &*model : nullptr);
  if (!job.output.empty()) write_wav(out, job.output);
  return out;
}

std::vector<std::filesystem::path> list_wavs(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw IoError("not a directory: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == ".wav") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

MakePairsReport make_pairs(const std::filesystem::path& clean_dir,
                           const std::filesystem::path& coded_dir, g711::Law law,
                           bool keep_codewords) {
  MakePairsReport report;
  std::filesystem::create_directories(coded_dir);
  for (const auto& path : list_wavs(clean_dir)) {
    const AudioSignal clean = read_wav(path);
    if (clean.sample_rate_hz != 8000) {
      report.skipped.push_back(path);
      continue;
    }
    const auto codes = g711::encode(clean.samples, law);
    AudioSignal coded;
    coded.sample_rate_hz = clean.sample_rate_hz;
    coded.samples = g711::decode(codes, law);
    const auto target = coded_dir / path.filename();
    write_wav(coded, target);
    if (keep_codewords) {
      auto raw = target;
      raw.replace_extension(".g711");
      std::ofstream out(raw, std::ios::binary);
      out.write(reinterpret_cast<const char*>(codes.data()),
                static_cast<std::streamsize>(codes.size()));
      if (!out) throw IoError("cannot write " + raw.string());
    }
    report.written.push_back(target);
  }
  return report;
}

cnn::CnnModel identity_model(const cnn::CnnConfig& cfg) {
  if (cfg.feature_maps < 2) throw ArgumentError("identity_model needs F >= 2");
  cnn::CnnModel m = cnn::CnnModel::zeros(cfg);
  const std::size_t n = cfg.kernel_len;
  const std::size_t centre = (n - 1) / 2;
  const std::size_t f = cfg.feature_maps;
  auto tap = [&](std::size_t layer, std::size_t out, std::size_t in, double v) {
    const std::size_t in_maps = m.slots[layer].shape.in_maps;
    m.weights(layer)[out * n * in_maps + centre * in_maps + in] = v;
  };
  tap(0, 0, 0, 1.0);
  tap(0, 1, 0, -1.0);
  for (std::size_t c = 0; c < f; ++c) tap(1, c, c, 1.0);
  // Each half passes three leaky units; the negative part shrinks by slope^3.
  const double a = cfg.leaky_slope;
  const double g = 1.0 / (1.0 + a * a * a);
  tap(9, 0, 0, g);
  tap(9, 0, 1, -g);
  return m;
}

}  // namespace cepnet::pipeline
