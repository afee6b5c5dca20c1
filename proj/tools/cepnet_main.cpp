// Copyright 2026 The cepnet Authors
// SPDX-License-Identifier: Apache-2.0

// cepnet: postprocessing for G.711-coded speech.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cepnet/audio_io.hpp"
#include "cepnet/cnn.hpp"
#include "cepnet/errors.hpp"
#include "cepnet/framing.hpp"
#include "cepnet/g711.hpp"
#include "cepnet/metrics.hpp"
#include "cepnet/pipeline.hpp"
#include "cepnet/postfilter.hpp"
#include "cepnet/speech_synth.hpp"
#include "cepnet/trainer.hpp"

namespace {

using namespace cepnet;
using json = nlohmann::json;

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitModel = 4;

json finite_or_string(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : "-inf";
}

std::vector<std::uint8_t> read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("cannot write " + path);
}

struct PostfilterFlags {
  double beta = 0.98;
  double gmin_db = -10.0;
  void add(CLI::App* app) {
    app->add_option("--beta", beta, "decision-directed smoothing (0,1)")->capture_default_str();
    app->add_option("--gmin-db", gmin_db, "gain floor in dB (<= 0)")->capture_default_str();
  }
  postfilter::PostfilterConfig config(g711::Law law) const {
    postfilter::PostfilterConfig cfg;
    cfg.beta = beta;
    cfg.gain_min = std::pow(10.0, gmin_db / 20.0);
    cfg.law = law;
    cfg.validate();
    return cfg;
  }
};

void print_report(const metrics::MetricsReport& r, const std::string& metric, bool as_json) {
  if (as_json) {
    json j;
    if (metric == "all" || metric == "lsd") j["mean_lsd_db"] = r.mean_lsd_db;
    if (metric == "all" || metric == "ssdr-seg") j["ssdr_seg_db"] = r.ssdr_seg_db;
    if (metric == "all" || metric == "ssdr") j["ssdr_db"] = finite_or_string(r.ssdr_db);
    j["active_frame_count"] = r.active_frame_count;
    j["frame_count"] = r.frame_count;
    std::cout << j.dump(2) << '\n';
    return;
  }
  if (metric == "all" || metric == "lsd") std::printf("mean_lsd_db    %.4f\n", r.mean_lsd_db);
  if (metric == "all" || metric == "ssdr-seg") std::printf("ssdr_seg_db    %.4f\n", r.ssdr_seg_db);
  if (metric == "all" || metric == "ssdr") std::printf("ssdr_db        %.4f\n", r.ssdr_db);
  std::printf("active_frames  %zu / %zu\n", r.active_frame_count, r.frame_count);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cepnet: enhancement of G.711-coded speech"};
  app.require_subcommand(1);

  std::string law_name = "alaw";
  std::string structure_name_arg = "s3";
  std::string in_path, out_path, model_path;

  // enhance
  auto* enh = app.add_subcommand("enhance", "postprocess a coded WAV");
  std::string mode_arg = "cepstral";
  bool constrain = false, c0 = false, align = false;
  PostfilterFlags enh_pf;
  enh->add_option("--in,input", in_path, "coded WAV")->required();
  enh->add_option("--out", out_path, "enhanced WAV")->required();
  enh->add_option("--mode", mode_arg, "time | cepstral | postfilter")->capture_default_str();
  enh->add_option("--model", model_path, "model file (CNN modes)");
  enh->add_option("--structure", structure_name_arg, "s1..s6 (cepstral mode)")->capture_default_str();
  enh->add_option("--law", law_name, "alaw | ulaw")->capture_default_str();
  enh->add_flag("--constrain", constrain, "clamp to the codeword quantization intervals");
  enh->add_flag("--c0-floor", c0, "push low-energy frames further down");
  enh->add_flag("--align", align, "remove the algorithmic delay from the output");
  enh_pf.add(enh);

  // train
  auto* tr = app.add_subcommand("train", "train a CNN on clean/coded WAV pairs");
  std::string clean_dir, coded_dir, val_clean_dir, val_coded_dir, domain_arg = "cepstral",
                                                                  log_path;
  std::uint64_t seed = 1;
  std::size_t max_epochs = 100, kernel = 6, maps = 22;
  double val_fraction = 0.1;
  tr->add_option("--clean-dir", clean_dir)->required();
  tr->add_option("--coded-dir", coded_dir)->required();
  tr->add_option("--val-clean-dir", val_clean_dir, "separate validation pairs");
  tr->add_option("--val-coded-dir", val_coded_dir);
  tr->add_option("--val-fraction", val_fraction, "share of files held out when no validation dirs are given")
      ->capture_default_str();
  tr->add_option("--structure", structure_name_arg)->capture_default_str();
  tr->add_option("--domain", domain_arg, "time | cepstral")->capture_default_str();
  tr->add_option("--out", out_path, "model file")->required();
  tr->add_option("--seed", seed)->capture_default_str();
  tr->add_option("--max-epochs", max_epochs)->capture_default_str();
  tr->add_option("--kernel", kernel, "N")->capture_default_str();
  tr->add_option("--maps", maps, "F")->capture_default_str();
  tr->add_option("--log", log_path, "per-epoch CSV (default: stdout)");

  // eval
  auto* ev = app.add_subcommand("eval", "compare a processed WAV with its reference");
  std::string ref_path, deg_path, metric = "all";
  bool as_json = false;
  double vad_threshold = 0.1;
  ev->add_option("--ref", ref_path)->required();
  ev->add_option("--deg", deg_path)->required();
  ev->add_option("--metric", metric)
      ->check(CLI::IsMember({"lsd", "ssdr-seg", "ssdr", "all"}))
      ->capture_default_str();
  ev->add_option("--vad-threshold", vad_threshold)->capture_default_str();
  ev->add_flag("--json", as_json);

  // g711
  auto* genc = app.add_subcommand("g711-encode", "WAV (8 kHz) to raw codewords");
  genc->add_option("--in,input", in_path)->required();
  genc->add_option("--out", out_path)->required();
  genc->add_option("--law", law_name)->capture_default_str();
  auto* gdec = app.add_subcommand("g711-decode", "raw codewords to WAV (8 kHz)");
  gdec->add_option("--in,input", in_path)->required();
  gdec->add_option("--out", out_path)->required();
  gdec->add_option("--law", law_name)->capture_default_str();

  // postfilter
  auto* pf = app.add_subcommand("postfilter", "baseline Wiener postfilter");
  PostfilterFlags pf_flags;
  pf->add_option("--in,input", in_path)->required();
  pf->add_option("--out", out_path)->required();
  pf->add_option("--law", law_name)->capture_default_str();
  pf->add_flag("--constrain", constrain);
  pf->add_flag("--align", align, "remove the 2 ms delay from the output");
  pf_flags.add(pf);

  // make-pairs
  auto* mp = app.add_subcommand("make-pairs", "G.711 encode+decode a directory of clean WAVs");
  bool keep_codes = false;
  mp->add_option("--clean-dir", clean_dir)->required();
  mp->add_option("--coded-dir,--out", coded_dir)->required();
  mp->add_option("--law", law_name)->capture_default_str();
  mp->add_flag("--keep-codewords", keep_codes, "also write <name>.g711 codeword streams");

  // info
  auto* inf = app.add_subcommand("info", "model configuration and complexity");
  inf->add_option("model", model_path)->required();
  inf->add_flag("--json", as_json);

  // synth
  auto* sy = app.add_subcommand("synth", "write deterministic speech-like test material");
  double seconds = 10.0;
  int rate = 8000;
  std::size_t count = 1;
  sy->add_option("--out", out_path, "WAV file, or directory with --count > 1")->required();
  sy->add_option("--seconds", seconds)->capture_default_str();
  sy->add_option("--rate", rate)->capture_default_str();
  sy->add_option("--seed", seed)->capture_default_str();
  sy->add_option("--count", count)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    const g711::Law law = g711::parse_law(law_name);

    if (*enh) {
      pipeline::EnhanceJob job;
      job.input = in_path;
      job.output = out_path;
      job.model = model_path;
      job.options.mode = pipeline::parse_mode(mode_arg);
      job.options.structure = parse_structure(structure_name_arg);
      job.options.law = law;
      job.options.constrain = constrain;
      job.options.c0_floor = c0;
      job.options.align = align;
      job.options.postfilter = enh_pf.config(law);
      pipeline::enhance(job);
      return 0;
    }

    if (*tr) {
      const StructureId sid = parse_structure(structure_name_arg);
      const trainer::Domain domain = trainer::parse_domain(domain_arg);
      auto clean = pipeline::list_wavs(clean_dir);
      std::vector<std::filesystem::path> coded;
      for (const auto& p : clean) coded.push_back(std::filesystem::path(coded_dir) / p.filename());
      std::vector<std::filesystem::path> vclean, vcoded;
      if (!val_clean_dir.empty()) {
        if (val_coded_dir.empty()) throw ArgumentError("--val-clean-dir needs --val-coded-dir");
        vclean = pipeline::list_wavs(val_clean_dir);
        for (const auto& p : vclean) vcoded.push_back(std::filesystem::path(val_coded_dir) / p.filename());
      } else {
        if (clean.size() < 2) throw DataError("need at least two files to hold one out for validation");
        if (!(val_fraction > 0.0 && val_fraction < 1.0)) throw ArgumentError("--val-fraction must lie in (0, 1)");
        auto held = static_cast<std::size_t>(std::ceil(val_fraction * clean.size()));
        held = std::min(held, clean.size() - 1);
        vclean.assign(clean.end() - static_cast<std::ptrdiff_t>(held), clean.end());
        vcoded.assign(coded.end() - static_cast<std::ptrdiff_t>(held), coded.end());
        clean.resize(clean.size() - held);
        coded.resize(coded.size() - held);
      }
      const auto train_set = trainer::prepare_dataset(clean, coded, sid, domain);
      auto val_set = trainer::prepare_dataset(vclean, vcoded, sid, domain);

      cnn::CnnConfig cfg;
      cfg.input_len = train_set.feature_len();
      cfg.kernel_len = kernel;
      cfg.feature_maps = maps;
      cfg.seed = seed;
      trainer::TrainSchedule sched;
      sched.seed = seed;
      sched.max_epochs = max_epochs;

      std::ofstream log_file;
      std::ostream* log = &std::cout;
      if (!log_path.empty()) {
        log_file.open(log_path);
        if (!log_file) throw IoError("cannot write " + log_path);
        log = &log_file;
      }
      *log << "epoch,train_mse,val_mse,lr\n";
      log->precision(10);
      trainer::TrainHooks hooks;
      hooks.on_epoch = [&](const trainer::EpochRecord& r) {
        *log << r.epoch << ',' << r.train_mse << ',' << r.val_mse << ',' << r.lr << std::endl;
      };
      std::fprintf(stderr, "training on %zu frames, validating on %zu (L=%zu)\n",
                   train_set.size(), val_set.size(), cfg.input_len);
      const auto result = trainer::train(train_set, val_set, cfg, sched, hooks);
      cnn::save(result.model, out_path);
      std::fprintf(stderr, "best epoch %zu, val mse %.6g -> %s\n", result.best_epoch,
                   result.best_val_mse, out_path.c_str());
      return 0;
    }

    if (*ev) {
      const AudioSignal ref = read_wav(ref_path);
      const AudioSignal deg = read_wav(deg_path);
      auto cfg = metrics::MetricsConfig::for_rate(ref.sample_rate_hz);
      cfg.vad_threshold = vad_threshold;
      print_report(metrics::evaluate(ref, deg, cfg), metric, as_json);
      return 0;
    }

    if (*genc) {
      const AudioSignal s = read_wav(in_path);
      if (s.sample_rate_hz != 8000) throw ArgumentError("G.711 input must be 8 kHz");
      write_bytes(out_path, g711::encode(s.samples, law));
      return 0;
    }

    if (*gdec) {
      const auto codes = read_bytes(in_path);
      AudioSignal s;
      s.sample_rate_hz = 8000;
      s.samples = g711::decode(codes, law);
      write_wav(s, out_path);
      return 0;
    }

    if (*pf) {
      pipeline::EnhanceOptions opts;
      opts.mode = pipeline::Mode::kBaselinePostfilter;
      opts.law = law;
      opts.constrain = constrain;
      opts.align = align;
      opts.postfilter = pf_flags.config(law);
      write_wav(pipeline::enhance(read_wav(in_path), opts), out_path);
      return 0;
    }

    if (*mp) {
      const auto report = pipeline::make_pairs(clean_dir, coded_dir, law, keep_codes);
      for (const auto& p : report.skipped) {
        std::fprintf(stderr, "warning: skipped %s (not 8 kHz)\n", p.string().c_str());
      }
      std::printf("%zu pairs written to %s\n", report.written.size(), coded_dir.c_str());
      return 0;
    }

    if (*inf) {
      const cnn::CnnModel m = cnn::load(model_path);
      const auto& c = m.config;
      const auto params = cnn::param_count(c);
      const auto macs = cnn::macs_per_frame(c);
      if (as_json) {
        json j;
        j["input_len"] = c.input_len;
        j["kernel_len"] = c.kernel_len;
        j["feature_maps"] = c.feature_maps;
        j["leaky_slope"] = c.leaky_slope;
        j["param_count"] = params;
        j["macs_per_frame"] = macs;
        j["mips_per_shift_ms"] = {{"5", cnn::mips(c, 200.0)},  {"10", cnn::mips(c, 100.0)},
                                  {"16", cnn::mips(c, 62.5)},  {"20", cnn::mips(c, 50.0)}};
        std::cout << j.dump(2) << '\n';
      } else {
        std::printf("L=%zu N=%zu F=%zu leaky_slope=%g\n", c.input_len, c.kernel_len,
                    c.feature_maps, c.leaky_slope);
        std::printf("param_count     %llu\n", static_cast<unsigned long long>(params));
        std::printf("macs_per_frame  %llu\n", static_cast<unsigned long long>(macs));
        for (double shift : {5.0, 10.0, 16.0, 20.0}) {
          std::printf("MIPS @ %2.0f ms shift  %.4g\n", shift, cnn::mips(c, 1000.0 / shift));
        }
      }
      return 0;
    }

    if (*sy) {
      if (count <= 1) {
        synth::SynthConfig cfg;
        cfg.seconds = seconds;
        cfg.sample_rate_hz = rate;
        cfg.seed = seed;
        write_wav(synth::generate(cfg), out_path);
        return 0;
      }
      std::filesystem::create_directories(out_path);
      const auto files = synth::corpus(count, seconds, rate, seed);
      for (std::size_t i = 0; i < files.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "synth_%04zu.wav", i);
        write_wav(files[i], std::filesystem::path(out_path) / name);
      }
      return 0;
    }
  } catch (const ArgumentError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const ModelError& e) {
    std::fprintf(stderr, "model error: %s\n", e.what());
    return kExitModel;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "model error: %s\n", e.what());
    return kExitModel;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  }
  return kExitUsage;
}
