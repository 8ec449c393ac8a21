#include "mdradar/dataset.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "mdradar/error.hpp"
#include "mdradar/io.hpp"
#include "mdradar/threading.hpp"

namespace mdradar {

using nlohmann::json;

std::string to_string(Split split) {
  switch (split) {
    case Split::Train: return "train";
    case Split::Validation: return "validation";
    case Split::Test: return "test";
  }
  return "?";
}

namespace {
Split split_from_string(const std::string& s) {
  if (s == "train") return Split::Train;
  if (s == "validation") return Split::Validation;
  if (s == "test") return Split::Test;
  throw FormatError("unknown split: " + s);
}
}  // namespace

std::vector<ClassSpec> default_classes() {
  // Two quad drones with 2-blade props (8 effective blades), told apart only
  // by rotation rate and blade length, one smaller drone on the long-dwell
  // profile, and the two pure-noise classes.
  TargetSpec drone_a;
  drone_a.range_m = 100.0;
  drone_a.amplitude = 0.003;
  drone_a.blade_count = 8;
  drone_a.blade_length_m = 0.22;
  drone_a.rotation_hz = 90.0;
  drone_a.scatterers_per_blade = 6;

  TargetSpec drone_b = drone_a;
  drone_b.blade_length_m = 0.15;
  drone_b.rotation_hz = 115.0;

  TargetSpec drone_c = drone_a;
  drone_c.blade_length_m = 0.06;
  drone_c.rotation_hz = 150.0;
  drone_c.scatterers_per_blade = 3;

  std::vector<ClassSpec> classes(5);
  classes[0] = {"drone_a", ClassSpec::Kind::Drone, drone_a, inspire_profile()};
  classes[1] = {"drone_b", ClassSpec::Kind::Drone, drone_b, inspire_profile()};
  classes[2] = {"drone_c", ClassSpec::Kind::Drone, drone_c, spark_profile()};
  classes[3] = {"noise_1", ClassSpec::Kind::Noise, std::nullopt, inspire_profile()};
  classes[4] = {"noise_2", ClassSpec::Kind::Noise, std::nullopt, spark_profile()};
  return classes;
}

DatasetCounts plan_counts(Eigen::Index per_class, Eigen::Index class_count) {
  DatasetCounts counts;
  counts.per_class = per_class;
  const Eigen::Index train_pc = per_class * 4 / 5;
  counts.train = train_pc * class_count;
  counts.validation = (per_class - train_pc) * class_count;
  counts.test = (per_class / 2) * class_count;
  return counts;
}

Eigen::Index noise_class_bin(const RadarConfig& config) {
  return config.range_fft_len / 4;
}

std::vector<Sample> LabeledDataset::samples(Split split) const {
  std::vector<Sample> out;
  for (const auto& entry : entries)
    if (entry.split == split) out.push_back({&entry.image, static_cast<int>(entry.class_index)});
  return out;
}

namespace {

RadarConfig config_for_class(const RadarConfig& base, const ClassSpec& cls) {
  RadarConfig cfg = base;
  cfg.chirps_per_image = cls.profile.chirps;
  cfg.stft_window_len = cls.profile.window_len;
  cfg.stft_overlap = cls.profile.window_len - cfg.stft_hop;
  cfg.validate();
  return cfg;
}

std::uint64_t sample_seed(std::uint64_t seed, Eigen::Index class_index, Split split,
                          Eigen::Index index) {
  const std::uint64_t split_code = split == Split::Train ? 0 : split == Split::Validation ? 1 : 2;
  return Rng::derive(seed, {200 + split_code, static_cast<std::uint64_t>(class_index),
                            static_cast<std::uint64_t>(index)})
      .next_u64();
}

DatasetEntry generate_entry(const LabeledDataset& ds, Eigen::Index class_index, Split split,
                            Eigen::Index index) {
  const ClassSpec& cls = ds.classes[static_cast<std::size_t>(class_index)];
  const RadarConfig cfg = config_for_class(ds.base_config, cls);

  DatasetEntry entry;
  entry.class_index = class_index;
  entry.split = split;
  entry.index_in_split = index;
  entry.cube_seed = sample_seed(ds.seed, class_index, split, index);

  std::vector<TargetSpec> targets;
  if (cls.kind == ClassSpec::Kind::Drone) {
    TargetSpec target = *cls.target;
    Rng jitter = Rng::derive(entry.cube_seed, {5});
    target.range_m += jitter.uniform(-cls.range_jitter_m, cls.range_jitter_m);
    target.rotation_hz *= 1.0 + jitter.uniform(-cls.rotation_jitter_frac, cls.rotation_jitter_frac);
    entry.range_m = target.range_m;
    entry.rotation_hz = target.rotation_hz;
    targets.push_back(target);
  }

  const IqCube cube =
      synthesize_cube(cfg, ds.leakage, targets, ds.thermal_noise_power, entry.cube_seed);
  const RangeSlowTimeMap map = remove_dc(build_map(cube, cfg, ds.pipeline));
  if (cls.kind == ClassSpec::Kind::Drone) {
    const double min_beat = beat_frequency_for_range(kMinSelectionRangeM, cfg);
    const auto min_bin = static_cast<Eigen::Index>(
        std::ceil(min_beat * static_cast<double>(cfg.range_fft_len) / cfg.sample_rate_hz));
    entry.target_bin = select_target_bin(map, min_bin);
  } else {
    entry.target_bin = noise_class_bin(cfg);
  }
  entry.image = render_image(stft_at_bin(map, entry.target_bin, cfg), cfg);
  entry.image.label = cls.name;
  entry.image.meta = {ds.pipeline, entry.cube_seed, entry.target_bin};
  return entry;
}

}  // namespace

LabeledDataset generate(const std::vector<ClassSpec>& classes, Eigen::Index per_class,
                        PipelineKind pipeline, std::uint64_t seed, const RadarConfig& base_config,
                        const LeakageSpec& leakage, double thermal_noise_power) {
  if (per_class < 5) throw std::invalid_argument("generate: per_class must be >= 5");
  if (classes.empty()) throw std::invalid_argument("generate: no classes");

  LabeledDataset ds;
  ds.pipeline = pipeline;
  ds.seed = seed;
  ds.base_config = base_config;
  ds.leakage = leakage;
  ds.thermal_noise_power = thermal_noise_power;
  ds.classes = classes;
  ds.per_class = per_class;

  const Eigen::Index train_pc = per_class * 4 / 5;
  const Eigen::Index val_pc = per_class - train_pc;
  const Eigen::Index test_pc = per_class / 2;

  struct Slot {
    Eigen::Index class_index;
    Split split;
    Eigen::Index index;
  };
  std::vector<Slot> slots;
  for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(classes.size()); ++c) {
    for (Eigen::Index i = 0; i < train_pc; ++i) slots.push_back({c, Split::Train, i});
    for (Eigen::Index i = 0; i < val_pc; ++i) slots.push_back({c, Split::Validation, i});
    for (Eigen::Index i = 0; i < test_pc; ++i) slots.push_back({c, Split::Test, i});
  }

  ds.entries.resize(slots.size());
  parallel_for(slots.size(), [&](std::size_t i) {
    ds.entries[i] = generate_entry(ds, slots[i].class_index, slots[i].split, slots[i].index);
  });
  return ds;
}

namespace {

json leakage_to_json(const LeakageSpec& leakage) {
  json profile = json::array();
  for (const auto& [f, db] : leakage.phase_noise_profile) profile.push_back({f, db});
  return {{"beat_frequency_hz", leakage.beat_frequency_hz},
          {"amplitude", leakage.amplitude},
          {"phase_noise_profile", profile},
          {"initial_phase_rad", leakage.initial_phase_rad}};
}

LeakageSpec leakage_from_json(const json& j) {
  LeakageSpec leakage;
  leakage.beat_frequency_hz = j.at("beat_frequency_hz").get<double>();
  leakage.amplitude = j.at("amplitude").get<double>();
  leakage.initial_phase_rad = j.at("initial_phase_rad").get<double>();
  leakage.phase_noise_profile.clear();
  for (const auto& pair : j.at("phase_noise_profile"))
    leakage.phase_noise_profile.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
  return leakage;
}

json target_to_json(const TargetSpec& t) {
  return {{"range_m", t.range_m},
          {"amplitude", t.amplitude},
          {"body_velocity_mps", t.body_velocity_mps},
          {"blade_count", t.blade_count},
          {"blade_length_m", t.blade_length_m},
          {"rotation_hz", t.rotation_hz},
          {"scatterers_per_blade", t.scatterers_per_blade}};
}

TargetSpec target_from_json(const json& j) {
  TargetSpec t;
  t.range_m = j.at("range_m").get<double>();
  t.amplitude = j.at("amplitude").get<double>();
  t.body_velocity_mps = j.at("body_velocity_mps").get<double>();
  t.blade_count = j.at("blade_count").get<int>();
  t.blade_length_m = j.at("blade_length_m").get<double>();
  t.rotation_hz = j.at("rotation_hz").get<double>();
  t.scatterers_per_blade = j.at("scatterers_per_blade").get<int>();
  return t;
}

json class_to_json(const ClassSpec& cls) {
  json j = {{"name", cls.name},
            {"kind", cls.kind == ClassSpec::Kind::Drone ? "drone" : "noise"},
            {"profile", {{"chirps", cls.profile.chirps}, {"window_len", cls.profile.window_len}}},
            {"range_jitter_m", cls.range_jitter_m},
            {"rotation_jitter_frac", cls.rotation_jitter_frac}};
  if (cls.target) j["target"] = target_to_json(*cls.target);
  return j;
}

ClassSpec class_from_json(const json& j) {
  ClassSpec cls;
  cls.name = j.at("name").get<std::string>();
  cls.kind = j.at("kind").get<std::string>() == "drone" ? ClassSpec::Kind::Drone
                                                        : ClassSpec::Kind::Noise;
  cls.profile.chirps = j.at("profile").at("chirps").get<Eigen::Index>();
  cls.profile.window_len = j.at("profile").at("window_len").get<Eigen::Index>();
  cls.range_jitter_m = j.at("range_jitter_m").get<double>();
  cls.rotation_jitter_frac = j.at("rotation_jitter_frac").get<double>();
  if (j.contains("target")) cls.target = target_from_json(j.at("target"));
  return cls;
}

std::string entry_file_name(const LabeledDataset& ds, const DatasetEntry& entry) {
  std::ostringstream name;
  name << ds.classes[entry.class_index].name << '/' << to_string(entry.split) << '/'
       << entry.index_in_split << ".ppm";
  return name.str();
}

}  // namespace

std::string manifest_json(const LabeledDataset& ds) {
  json manifest;
  manifest["format_version"] = 1;
  manifest["pipeline"] = to_string(ds.pipeline);
  manifest["seed"] = ds.seed;
  manifest["per_class"] = ds.per_class;
  manifest["thermal_noise_power"] = ds.thermal_noise_power;
  manifest["base_config"] = ds.base_config.to_key_values();
  manifest["leakage"] = leakage_to_json(ds.leakage);
  manifest["classes"] = json::array();
  for (const auto& cls : ds.classes) manifest["classes"].push_back(class_to_json(cls));
  const DatasetCounts counts = plan_counts(ds.per_class, static_cast<Eigen::Index>(ds.classes.size()));
  manifest["counts"] = {{"train", counts.train},
                        {"validation", counts.validation},
                        {"test", counts.test}};
  manifest["entries"] = json::array();
  for (const auto& entry : ds.entries) {
    manifest["entries"].push_back({{"class", ds.classes[entry.class_index].name},
                                   {"class_index", entry.class_index},
                                   {"split", to_string(entry.split)},
                                   {"index", entry.index_in_split},
                                   {"cube_seed", entry.cube_seed},
                                   {"range_m", entry.range_m},
                                   {"rotation_hz", entry.rotation_hz},
                                   {"target_bin", entry.target_bin},
                                   {"file", entry_file_name(ds, entry)}});
  }
  return manifest.dump(2);
}

void write_dataset(const std::filesystem::path& dir, const LabeledDataset& ds) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  for (const auto& cls : ds.classes)
    for (const char* split : {"train", "validation", "test"})
      fs::create_directories(dir / cls.name / split);
  for (const auto& entry : ds.entries)
    write_mds_image(dir / entry_file_name(ds, entry), entry.image);
  std::ofstream out(dir / "manifest.json");
  if (!out) throw FormatError("cannot write manifest in " + dir.string());
  out << manifest_json(ds) << '\n';
}

namespace {

LabeledDataset dataset_header_from_manifest(const std::filesystem::path& manifest_file,
                                            json& manifest) {
  std::ifstream in(manifest_file);
  if (!in) throw FormatError("cannot open " + manifest_file.string());
  try {
    manifest = json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(manifest_file.string() + ": " + e.what());
  }
  LabeledDataset ds;
  ds.pipeline = pipeline_from_string(manifest.at("pipeline").get<std::string>());
  ds.seed = manifest.at("seed").get<std::uint64_t>();
  ds.per_class = manifest.at("per_class").get<Eigen::Index>();
  ds.thermal_noise_power = manifest.at("thermal_noise_power").get<double>();
  ds.base_config = RadarConfig::from_key_values(
      manifest.at("base_config").get<std::map<std::string, std::string>>());
  ds.leakage = leakage_from_json(manifest.at("leakage"));
  for (const auto& j : manifest.at("classes")) ds.classes.push_back(class_from_json(j));
  return ds;
}

}  // namespace

LabeledDataset load_dataset(const std::filesystem::path& dir) {
  json manifest;
  LabeledDataset ds = dataset_header_from_manifest(dir / "manifest.json", manifest);
  for (const auto& j : manifest.at("entries")) {
    DatasetEntry entry;
    entry.class_index = j.at("class_index").get<Eigen::Index>();
    entry.split = split_from_string(j.at("split").get<std::string>());
    entry.index_in_split = j.at("index").get<Eigen::Index>();
    entry.cube_seed = j.at("cube_seed").get<std::uint64_t>();
    entry.range_m = j.at("range_m").get<double>();
    entry.rotation_hz = j.at("rotation_hz").get<double>();
    entry.target_bin = j.at("target_bin").get<Eigen::Index>();
    Eigen::Index w = 0, h = 0;
    entry.image.pixels = read_ppm(dir / j.at("file").get<std::string>(), w, h);
    if (w != h) throw FormatError("dataset image is not square");
    entry.image.size = w;
    entry.image.label = ds.classes[entry.class_index].name;
    entry.image.meta = {ds.pipeline, entry.cube_seed, entry.target_bin};
    ds.entries.push_back(std::move(entry));
  }
  return ds;
}

LabeledDataset regenerate_from_manifest(const std::filesystem::path& manifest_file) {
  json manifest;
  const LabeledDataset header = dataset_header_from_manifest(manifest_file, manifest);
  return generate(header.classes, header.per_class, header.pipeline, header.seed,
                  header.base_config, header.leakage, header.thermal_noise_power);
}

MetricsReport metrics_report(const Eigen::MatrixXi& confusion) {
  if (confusion.rows() != confusion.cols() || confusion.rows() == 0)
    throw std::invalid_argument("metrics_report: confusion matrix must be square");
  MetricsReport report;
  const Eigen::Index n = confusion.rows();
  report.precision.resize(n);
  report.recall.resize(n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const int col_sum = confusion.col(c).sum();
    const int row_sum = confusion.row(c).sum();
    report.precision[c] = col_sum > 0 ? static_cast<double>(confusion(c, c)) / col_sum : 0.0;
    report.recall[c] = row_sum > 0 ? static_cast<double>(confusion(c, c)) / row_sum : 0.0;
  }
  const int total = confusion.sum();
  report.accuracy = total > 0 ? static_cast<double>(confusion.trace()) / total : 0.0;
  return report;
}

std::string metrics_to_json(const MetricsReport& report, const Eigen::MatrixXi& confusion) {
  json j;
  j["accuracy"] = report.accuracy;
  j["precision"] = report.precision;
  j["recall"] = report.recall;
  json rows = json::array();
  for (Eigen::Index r = 0; r < confusion.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < confusion.cols(); ++c) row.push_back(confusion(r, c));
    rows.push_back(row);
  }
  j["confusion"] = rows;
  return j.dump(2);
}

std::string metrics_to_table(const MetricsReport& report, const Eigen::MatrixXi& confusion,
                             const std::vector<std::string>& class_names) {
  std::ostringstream out;
  out << "class            precision  recall\n";
  for (Eigen::Index c = 0; c < confusion.rows(); ++c) {
    const std::string name =
        c < static_cast<Eigen::Index>(class_names.size()) ? class_names[c] : std::to_string(c);
    out << name;
    for (std::size_t pad = name.size(); pad < 17; ++pad) out << ' ';
    char buf[64];
    std::snprintf(buf, sizeof buf, "%9.4f %7.4f\n", report.precision[c], report.recall[c]);
    out << buf;
  }
  out << "total accuracy: " << report.accuracy << "\n\nconfusion (rows = truth):\n";
  for (Eigen::Index r = 0; r < confusion.rows(); ++r) {
    for (Eigen::Index c = 0; c < confusion.cols(); ++c) {
      char buf[16];
      std::snprintf(buf, sizeof buf, "%6d", confusion(r, c));
      out << buf;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace mdradar
