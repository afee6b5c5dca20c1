// Copyright 2026 The cepnet Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CEPNET_TRAINER_HPP_
#define CEPNET_TRAINER_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "cepnet/audio_io.hpp"
#include "cepnet/cnn.hpp"
#include "cepnet/framing.hpp"

namespace cepnet::trainer {

enum class Domain { kTime, kCepstral };
Domain parse_domain(std::string_view name);  // time | cepstral
std::string_view domain_name(Domain d);

struct DatasetConfig {
  double vad_threshold = 0.1;
};

struct Dataset {
  std::vector<std::vector<double>> inputs;   // coded features, length L
  std::vector<std::vector<double>> targets;  // clean features, length L
  Domain domain = Domain::kCepstral;
  StructureId structure = StructureId::kS3;
  int sample_rate_hz = 8000;
  std::vector<double> norm_mean;  // over inputs
  std::vector<double> norm_std;

  std::size_t size() const { return inputs.size(); }
  std::size_t feature_len() const { return inputs.empty() ? 0 : inputs.front().size(); }
};

// Feature length the network sees for a structure, domain and rate.
std::size_t feature_len(StructureId s, Domain d, int sample_rate_hz);

// Indices of the frames of `s` whose raw (unwindowed) mean square over the
// file mean square exceeds the threshold.
std::vector<std::size_t> active_frames(const AudioSignal& clean,
                                       const FrameworkStructure& s, double threshold);

// Time-domain datasets require StructureId::kTime.
Dataset prepare_dataset(std::span<const AudioSignal> clean,
                        std::span<const AudioSignal> coded, StructureId s, Domain d,
                        const DatasetConfig& cfg = {});
Dataset prepare_dataset(std::span<const std::filesystem::path> clean,
                        std::span<const std::filesystem::path> coded, StructureId s,
                        Domain d, const DatasetConfig& cfg = {});

struct TrainSchedule {
  double lr0 = 5e-4;
  std::size_t minibatch = 16;
  std::size_t halve_patience = 2;
  std::size_t stop_patience = 16;
  std::size_t max_epochs = 100;
  std::uint64_t seed = 1;
  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_mse = 0.0;
  double val_mse = 0.0;
  double lr = 0.0;        // rate used during this epoch
  std::size_t updates = 0;
  bool improved = false;
  bool lr_halved = false;  // the rate was halved after this epoch
};

struct TrainHooks {
  // Replaces the validation MSE computation (epoch is 1-based).
  std::function<double(const cnn::CnnModel&, std::size_t epoch)> validation;
  std::function<void(const EpochRecord&)> on_epoch;
};

struct TrainResult {
  cnn::CnnModel model;  // best validation checkpoint, float32-rounded
  std::vector<EpochRecord> log;
  std::size_t best_epoch = 0;
  double best_val_mse = 0.0;
};

// Mean squared error of the model over a dataset, raw targets.
double evaluate_mse(const cnn::CnnModel& model, const Dataset& data);

// The model config's input_len must match the dataset; its seed drives the
// initialization, schedule.seed the shuffling. Throws TrainingError on a
// non-finite loss.
TrainResult train(const Dataset& train_set, const Dataset& val_set,
                  const cnn::CnnConfig& config, const TrainSchedule& schedule,
                  const TrainHooks& hooks = {});

// CSV with header epoch,train_mse,val_mse,lr.
void write_log_csv(std::span<const EpochRecord> log, std::ostream& out);

}  // namespace cepnet::trainer

#endif  // CEPNET_TRAINER_HPP_
