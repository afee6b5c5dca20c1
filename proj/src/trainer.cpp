// Copyright 2026 The cepnet Authors
// SPDX-License-Identifier: Apache-2.0

#include "cepnet/trainer.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <string>

#include "cepnet/cepstral.hpp"
#include "cepnet/errors.hpp"

namespace cepnet::trainer {
namespace {

std::vector<double> features(std::span<const double> frame, Domain d,
                             const cepstral::CepstralConfig& cc) {
  if (d == Domain::kTime) return {frame.begin(), frame.end()};
  return cepstral::analyze_frame(frame, cc).c_env;
}

void compute_norm(Dataset& ds) {
  const std::size_t len = ds.feature_len();
  std::vector<double> mean(len, 0.0);
  std::vector<double> sq(len, 0.0);
  for (const auto& x : ds.inputs) {
    for (std::size_t i = 0; i < len; ++i) mean[i] += x[i];
  }
  const double n = static_cast<double>(ds.size());
  for (double& m : mean) m /= n;
  for (const auto& x : ds.inputs) {
    for (std::size_t i = 0; i < len; ++i) sq[i] += (x[i] - mean[i]) * (x[i] - mean[i]);
  }
  ds.norm_mean = mean;
  ds.norm_std.assign(len, 1.0);
  for (std::size_t i = 0; i < len; ++i) {
    const double sd = std::sqrt(sq[i] / n);
    if (sd > 1e-9) ds.norm_std[i] = sd;
  }
}

}  // namespace

Domain parse_domain(std::string_view name) {
  if (name == "time") return Domain::kTime;
  if (name == "cepstral") return Domain::kCepstral;
  throw ArgumentError("unknown domain '" + std::string(name) + "' (time|cepstral)");
}

std::string_view domain_name(Domain d) {
  return d == Domain::kTime ? "time" : "cepstral";
}

std::size_t feature_len(StructureId s, Domain d, int sample_rate_hz) {
  const FrameGeometry g = geometry(structure(s), sample_rate_hz);
  if (d == Domain::kTime) {
    if (s != StructureId::kTime) {
      throw ArgumentError("time-domain processing uses the 'time' structure");
    }
    return g.processing_len;
  }
  if (s == StructureId::kTime) {
    throw ArgumentError("cepstral processing needs one of s1..s6");
  }
  return cepstral::config_for_frame_length(g.processing_len).env_count();
}

std::vector<std::size_t> active_frames(const AudioSignal& clean,
                                       const FrameworkStructure& s, double threshold) {
  std::vector<std::size_t> active;
  const std::size_t n = clean.size();
  if (n == 0) return active;
  double file_power = 0.0;
  for (double v : clean.samples) file_power += v * v;
  file_power /= static_cast<double>(n);
  if (file_power <= 0.0) return active;

  const FrameGeometry g = geometry(s, clean.sample_rate_hz);
  const std::size_t count = (n + g.delay + g.shift - 1) / g.shift;
  for (std::size_t i = 0; i < count; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < g.window_len; ++j) {
      const std::size_t p = i * g.shift + j;
      if (p < g.lead_pad || p - g.lead_pad >= n) continue;
      const double v = clean.samples[p - g.lead_pad];
      acc += v * v;
    }
    if (acc / static_cast<double>(g.window_len) / file_power > threshold) {
      active.push_back(i);
    }
  }
  return active;
}

Dataset prepare_dataset(std::span<const AudioSignal> clean,
                        std::span<const AudioSignal> coded, StructureId s, Domain d,
                        const DatasetConfig& cfg) {
  if (clean.size() != coded.size()) {
    throw ArgumentError("prepare_dataset: clean and coded file counts differ");
  }
  if (clean.empty()) throw DataError("prepare_dataset: no files");
  Dataset ds;
  ds.domain = d;
  ds.structure = s;
  ds.sample_rate_hz = clean.front().sample_rate_hz;
  const std::size_t len = feature_len(s, d, ds.sample_rate_hz);
  const FrameworkStructure& fs = structure(s);
  const cepstral::CepstralConfig cc = cepstral::config_for_frame_length(
      geometry(fs, ds.sample_rate_hz).processing_len);

  for (std::size_t f = 0; f < clean.size(); ++f) {
    if (clean[f].sample_rate_hz != ds.sample_rate_hz ||
        coded[f].sample_rate_hz != ds.sample_rate_hz) {
      throw ArgumentError("prepare_dataset: mixed sample rates");
    }
    if (clean[f].size() != coded[f].size()) {
      throw ArgumentError("prepare_dataset: file pair " + std::to_string(f) +
                          " is not aligned (lengths differ)");
    }
    const auto active = active_frames(clean[f], fs, cfg.vad_threshold);
    if (active.empty()) continue;
    const FrameSequence cs = analyze(clean[f], fs);
    const FrameSequence ks = analyze(coded[f], fs);
    for (std::size_t i : active) {
      ds.inputs.push_back(features(ks.frames[i], d, cc));
      ds.targets.push_back(features(cs.frames[i], d, cc));
    }
  }
  if (ds.inputs.empty()) throw DataError("prepare_dataset: no active speech frames");
  for (const auto& x : ds.inputs) {
    if (x.size() != len) throw DataError("prepare_dataset: feature length mismatch");
  }
  compute_norm(ds);
  return ds;
}

Dataset prepare_dataset(std::span<const std::filesystem::path> clean,
                        std::span<const std::filesystem::path> coded, StructureId s,
                        Domain d, const DatasetConfig& cfg) {
  std::vector<AudioSignal> a, b;
  for (const auto& p : clean) a.push_back(read_wav(p));
  for (const auto& p : coded) b.push_back(read_wav(p));
  return prepare_dataset(a, b, s, d, cfg);
}

void TrainSchedule::validate() const {
  if (!(lr0 > 0.0) || minibatch == 0 || halve_patience == 0 || stop_patience == 0 ||
      max_epochs == 0) {
    throw ArgumentError("train schedule values must be positive");
  }
}

double evaluate_mse(const cnn::CnnModel& model, const Dataset& data) {
  if (data.size() == 0) throw DataError("evaluate_mse: empty dataset");
  cnn::Workspace ws(model.config);
  double acc = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto y = cnn::forward(model, data.inputs[i], ws);
    double e = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) {
      const double d = y[k] - data.targets[i][k];
      e += d * d;
    }
    acc += e / static_cast<double>(y.size());
  }
  return acc / static_cast<double>(data.size());
}

TrainResult train(const Dataset& train_set, const Dataset& val_set,
                  const cnn::CnnConfig& config, const TrainSchedule& schedule,
                  const TrainHooks& hooks) {
  schedule.validate();
  config.validate();
  if (train_set.size() == 0) throw DataError("train: empty training set");
  if (!hooks.validation && val_set.size() == 0) throw DataError("train: empty validation set");
  if (train_set.feature_len() != config.input_len) {
    throw ConfigError("train: dataset feature length " +
                      std::to_string(train_set.feature_len()) + " != model L " +
                      std::to_string(config.input_len));
  }
  if (train_set.size() < schedule.minibatch) {
    throw DataError("train: fewer frames than one minibatch");
  }

  cnn::CnnModel model = cnn::CnnModel::initialize(config);
  model.norm_mean = train_set.norm_mean;
  model.norm_std = train_set.norm_std;
  model.round_to_storage();

  cnn::AdamState adam = cnn::AdamState::for_model(model, schedule.lr0);
  cnn::Workspace ws(config);
  std::vector<double> grad(model.params.size());
  std::vector<std::size_t> order(train_set.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 shuffle_rng(schedule.seed);

  TrainResult result;
  result.model = model;
  double best = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;
  std::size_t since_halving = 0;
  const std::size_t batches = train_set.size() / schedule.minibatch;
  const double scale = 1.0 / static_cast<double>(schedule.minibatch);

  for (std::size_t epoch = 1; epoch <= schedule.max_epochs; ++epoch) {
    // Fisher-Yates with raw engine output keeps the order library-independent.
    for (std::size_t i = order.size() - 1; i > 0; --i) {
      std::swap(order[i], order[shuffle_rng() % (i + 1)]);
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.lr = adam.lr;
    double loss_sum = 0.0;
    for (std::size_t b = 0; b < batches; ++b) {
      std::fill(grad.begin(), grad.end(), 0.0);
      double batch_loss = 0.0;
      for (std::size_t j = 0; j < schedule.minibatch; ++j) {
        const std::size_t idx = order[b * schedule.minibatch + j];
        try {
          batch_loss += cnn::accumulate_gradients(model, train_set.inputs[idx],
                                                  train_set.targets[idx], ws, grad);
        } catch (const ModelError&) {
          throw TrainingError("train: network output diverged in epoch " +
                              std::to_string(epoch) + " (lr " + std::to_string(adam.lr) + ")");
        }
      }
      batch_loss *= scale;
      if (!std::isfinite(batch_loss)) {
        throw TrainingError("train: non-finite loss in epoch " + std::to_string(epoch) +
                            ", minibatch " + std::to_string(b + 1) +
                            " (lr " + std::to_string(adam.lr) + ")");
      }
      for (double& g : grad) g *= scale;
      cnn::adam_step(adam, model, grad);
      loss_sum += batch_loss;
      ++rec.updates;
    }
    rec.train_mse = loss_sum / static_cast<double>(batches);
    // Score the checkpoint exactly as it would be stored.
    cnn::CnnModel snapshot = model;
    snapshot.round_to_storage();
    rec.val_mse = hooks.validation ? hooks.validation(snapshot, epoch)
                                   : evaluate_mse(snapshot, val_set);
    if (!std::isfinite(rec.val_mse)) {
      throw TrainingError("train: non-finite validation MSE in epoch " +
                          std::to_string(epoch));
    }

    if (rec.val_mse < best) {
      best = rec.val_mse;
      rec.improved = true;
      since_best = 0;
      since_halving = 0;
      result.model = std::move(snapshot);
      result.best_epoch = epoch;
      result.best_val_mse = rec.val_mse;
    } else {
      ++since_best;
      ++since_halving;
    }
    const bool stop = since_best >= schedule.stop_patience;
    if (!stop && since_halving >= schedule.halve_patience) {
      adam.lr *= 0.5;
      since_halving = 0;
      rec.lr_halved = true;
    }
    result.log.push_back(rec);
    if (hooks.on_epoch) hooks.on_epoch(rec);
    if (stop) break;
  }
  return result;
}

void write_log_csv(std::span<const EpochRecord> log, std::ostream& out) {
  out << "epoch,train_mse,val_mse,lr\n";
  out.precision(10);
  for (const auto& r : log) {
    out << r.epoch << ',' << r.train_mse << ',' << r.val_mse << ',' << r.lr << '\n';
  }
}

}  // namespace cepnet::trainer
