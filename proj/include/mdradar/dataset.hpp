#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mdradar/mds.hpp"
#include "mdradar/train.hpp"

namespace mdradar {

enum class Split { Train, Validation, Test };
std::string to_string(Split split);

/// STFT profile a class is extracted with (slow-time dwell and window).
struct StftProfile {
  Eigen::Index chirps = 256;
  Eigen::Index window_len = 16;
};
inline StftProfile inspire_profile() { return {256, 16}; }
inline StftProfile spark_profile() { return {1024, 32}; }

/// One of the five classes: a drone target plus profile, or a pure-noise
/// class that differs from its sibling only by profile.
struct ClassSpec {
  std::string name;
  enum class Kind { Drone, Noise } kind = Kind::Noise;
  std::optional<TargetSpec> target;
  StftProfile profile;
  double range_jitter_m = 10.0;       // uniform +/- jitter per sample
  double rotation_jitter_frac = 0.05; // uniform +/- fraction per sample
};

/// Three drones (two deliberately similar) and two noise classes.
std::vector<ClassSpec> default_classes();

struct DatasetCounts {
  Eigen::Index per_class = 0;
  Eigen::Index train = 0, validation = 0, test = 0;  // totals over all classes
};
/// 80/20 train/validation split of per_class images per class, plus an
/// independently seeded test set of half that size per class.
DatasetCounts plan_counts(Eigen::Index per_class, Eigen::Index class_count);

/// One generated image plus everything needed to regenerate it.
struct DatasetEntry {
  Eigen::Index class_index = 0;
  Split split = Split::Train;
  Eigen::Index index_in_split = 0;
  std::uint64_t cube_seed = 0;
  double range_m = 0;        // jittered value actually used (0 for noise)
  double rotation_hz = 0;
  Eigen::Index target_bin = 0;
  MdsImage image;
};

struct LabeledDataset {
  PipelineKind pipeline = PipelineKind::Proposed;
  std::uint64_t seed = 0;
  RadarConfig base_config;
  LeakageSpec leakage;
  double thermal_noise_power = 0;
  std::vector<ClassSpec> classes;
  Eigen::Index per_class = 0;
  std::vector<DatasetEntry> entries;

  std::vector<Sample> samples(Split split) const;
};

/// Range gate applied when auto-selecting a drone's bin: keeps the leakage's
/// own range cell (which survives DC removal through its slow-time phase
/// noise) out of the argmax.
inline constexpr double kMinSelectionRangeM = 25.0;

/// Fixed bin used for the noise classes (middle of the interpretable band).
Eigen::Index noise_class_bin(const RadarConfig& config);

/// Generates the full dataset for one pipeline. Cube seeds depend only on
/// (seed, class, split, index), so conventional/proposed runs with the same
/// seed process identical cubes.
LabeledDataset generate(const std::vector<ClassSpec>& classes, Eigen::Index per_class,
                        PipelineKind pipeline, std::uint64_t seed,
                        const RadarConfig& base_config = RadarConfig{},
                        const LeakageSpec& leakage = LeakageSpec{},
                        double thermal_noise_power = 1e-5);

/// Directory layout <class>/<split>/<index>.ppm plus manifest.json.
void write_dataset(const std::filesystem::path& dir, const LabeledDataset& dataset);
/// Reloads images + manifest written by write_dataset.
LabeledDataset load_dataset(const std::filesystem::path& dir);
/// Re-runs generation from a manifest; output is byte-identical.
LabeledDataset regenerate_from_manifest(const std::filesystem::path& manifest_file);

std::string manifest_json(const LabeledDataset& dataset);

/// Per-class precision/recall plus total accuracy from a confusion matrix.
struct MetricsReport {
  std::vector<double> precision, recall;
  double accuracy = 0;
};
MetricsReport metrics_report(const Eigen::MatrixXi& confusion);
std::string metrics_to_json(const MetricsReport& report, const Eigen::MatrixXi& confusion);
std::string metrics_to_table(const MetricsReport& report, const Eigen::MatrixXi& confusion,
                             const std::vector<std::string>& class_names);

}  // namespace mdradar
