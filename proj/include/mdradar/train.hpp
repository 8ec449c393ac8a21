#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "mdradar/cnn.hpp"

namespace mdradar {

/// One labeled image (borrowed pixels; datasets own the storage).
struct Sample {
  const MdsImage* image = nullptr;
  int label = 0;
};

struct EpochStats {
  Eigen::Index epoch = 0;  // absolute, 0-based
  double train_loss = 0, train_accuracy = 0;
  double val_loss = 0, val_accuracy = 0;
};

/// Seeded-shuffle minibatch training with Adam. Epoch e's shuffle stream is
/// derived from (config.seed, e), so a run resumed from a checkpoint at an
/// epoch boundary reproduces the uninterrupted run bit for bit. Returns one
/// stats entry per epoch trained.
std::vector<EpochStats> train(CnnModel<float>& model, AdamState<float>& adam,
                              const std::vector<Sample>& train_set,
                              const std::vector<Sample>& validation_set,
                              const TrainConfig& config, Eigen::Index start_epoch = 0);

struct Evaluation {
  Eigen::MatrixXi confusion;  // row = true class, col = predicted
  double accuracy = 0;
  double mean_loss = 0;
};

/// Confusion matrix and total accuracy over a labeled set.
Evaluation evaluate(const CnnModel<float>& model, const std::vector<Sample>& samples);

/// Accounting seam: confusion[r][c] = count of class-r samples predicted c.
Evaluation evaluate_predictions(const std::vector<int>& labels, const std::vector<int>& predictions,
                                int class_count);

/// Checkpoint: model weights, Adam state and epoch counter; round-trips bit
/// for bit (magic "MDSCNN1\0", little-endian float32 payload).
struct Checkpoint {
  CnnModel<float> model;
  AdamState<float> adam;
  Eigen::Index epochs_completed = 0;
};

void save_model(const std::filesystem::path& path, const CnnModel<float>& model,
                const AdamState<float>& adam, Eigen::Index epochs_completed);
Checkpoint load_model(const std::filesystem::path& path);

/// One JSON object per epoch (the data behind training-curve plots).
void write_history_jsonl(const std::filesystem::path& path, const std::vector<EpochStats>& history,
                         bool append = false);

}  // namespace mdradar
