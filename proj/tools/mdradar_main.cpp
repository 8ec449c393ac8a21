#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "mdradar/aspc.hpp"
#include "mdradar/dataset.hpp"
#include "mdradar/error.hpp"
#include "mdradar/io.hpp"
#include "mdradar/mds.hpp"
#include "mdradar/train.hpp"

namespace fs = std::filesystem;
using namespace mdradar;

namespace {

// "key=value,key=value" target description, e.g.
// "range=100,amplitude=0.003,blades=8,blade_length=0.22,rotation=90,scatterers=6"
TargetSpec parse_target_spec(const std::string& text) {
  TargetSpec target;
  target.amplitude = 0.01;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw CLI::ValidationError("--target", "expected key=value, got '" + item + "'");
    const std::string key = item.substr(0, eq);
    const double value = std::stod(item.substr(eq + 1));
    if (key == "range") target.range_m = value;
    else if (key == "amplitude") target.amplitude = value;
    else if (key == "velocity") target.body_velocity_mps = value;
    else if (key == "blades") target.blade_count = static_cast<int>(value);
    else if (key == "blade_length") target.blade_length_m = value;
    else if (key == "rotation") target.rotation_hz = value;
    else if (key == "scatterers") target.scatterers_per_blade = static_cast<int>(value);
    else throw CLI::ValidationError("--target", "unknown key '" + key + "'");
  }
  return target;
}

// "none", "default", or "f1:db1,f2:db2,..."
std::vector<std::pair<double, double>> parse_phase_noise(const std::string& text) {
  if (text == "default") return LeakageSpec::default_phase_noise_profile();
  if (text == "none") return {};
  std::vector<std::pair<double, double>> profile;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos)
      throw CLI::ValidationError("--phase-noise", "expected offset:dBc, got '" + item + "'");
    profile.emplace_back(std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
  }
  return profile;
}

void dump_spectra_csv(const fs::path& file, const RangeSlowTimeMap& map,
                      const RadarConfig& config) {
  std::ofstream out(file);
  if (!out) throw FormatError("cannot write " + file.string());
  out << "bin,frequency_hz,power_db\n";
  for (Eigen::Index k = 0; k < map.data.rows(); ++k) {
    const double power = map.data.row(k).squaredNorm() / static_cast<double>(map.data.cols());
    const double db = 10.0 * std::log10(power + 1e-300);
    char line[96];
    std::snprintf(line, sizeof line, "%lld,%.17g,%.17g\n", static_cast<long long>(k),
                  static_cast<double>(k) * config.sample_rate_hz / config.range_fft_len, db);
    out << line;
  }
}

struct CommonOptions {
  std::string config_file;
  std::uint64_t seed = 0;
  std::string pipeline = "proposed";
};

RadarConfig load_config_or_default(const std::string& file) {
  if (file.empty()) {
    RadarConfig cfg;
    cfg.validate();
    return cfg;
  }
  return RadarConfig::load(file);
}

int run(int argc, char** argv) {
  CLI::App app{"FMCW micro-Doppler signature extraction and drone classification"};
  app.require_subcommand(1);

  CommonOptions common;

  // simulate -------------------------------------------------------------
  auto* simulate = app.add_subcommand("simulate", "synthesize a beat-signal cube file");
  std::string sim_out = "cube.iq";
  std::vector<std::string> sim_targets;
  double leak_freq = LeakageSpec{}.beat_frequency_hz;
  double leak_amp = LeakageSpec{}.amplitude;
  double leak_phase = LeakageSpec{}.initial_phase_rad;
  std::string phase_noise = "default";
  double noise_power = 1e-5;
  simulate->add_option("--config", common.config_file, "radar config file (key=value)");
  simulate->add_option("--seed", common.seed, "random seed");
  simulate->add_option("--out", sim_out, "output cube path")->capture_default_str();
  simulate->add_option("--target", sim_targets,
                       "target spec key=value[,key=value...] (repeatable); keys: range, "
                       "amplitude, velocity, blades, blade_length, rotation, scatterers");
  simulate->add_option("--leakage-freq", leak_freq, "leakage beat frequency [Hz]")->capture_default_str();
  simulate->add_option("--leakage-amplitude", leak_amp, "leakage amplitude (0 disables)")->capture_default_str();
  simulate->add_option("--leakage-phase", leak_phase, "leakage initial phase [rad]")->capture_default_str();
  simulate->add_option("--phase-noise", phase_noise, "'default', 'none', or f:dBc[,f:dBc...]")->capture_default_str();
  simulate->add_option("--noise-power", noise_power, "complex white noise power per sample")->capture_default_str();

  // extract ---------------------------------------------------------------
  auto* extract = app.add_subcommand("extract", "cube file -> MDS image (plus optional spectra)");
  std::string ext_in, ext_out = "mds_out";
  bool dump_spectra = false;
  long long ext_bin = -1;
  double min_range = kMinSelectionRangeM;
  extract->add_option("--in", ext_in, "input cube file")->required();
  extract->add_option("--pipeline", common.pipeline, "conventional|proposed")->capture_default_str();
  extract->add_option("--out", ext_out, "output directory")->capture_default_str();
  extract->add_option("--target-bin", ext_bin, "range bin override (-1 = auto-select)");
  extract->add_option("--min-range", min_range, "range gate [m] for bin auto-selection")->capture_default_str();
  extract->add_flag("--dump-spectra", dump_spectra, "write pre/post range spectra as CSV");

  // dataset ---------------------------------------------------------------
  auto* dataset_cmd = app.add_subcommand("dataset", "generate a labeled MDS dataset");
  std::string ds_out = "dataset";
  Eigen::Index per_class = 700;
  double ds_noise_power = 1e-5;
  dataset_cmd->add_option("--config", common.config_file, "base radar config file");
  dataset_cmd->add_option("--seed", common.seed, "dataset seed");
  dataset_cmd->add_option("--pipeline", common.pipeline, "conventional|proposed")->capture_default_str();
  dataset_cmd->add_option("--out", ds_out, "output directory")->capture_default_str();
  dataset_cmd->add_option("--per-class", per_class, "train+validation images per class")->capture_default_str();
  dataset_cmd->add_option("--noise-power", ds_noise_power, "thermal noise power")->capture_default_str();

  // train -----------------------------------------------------------------
  auto* train_cmd = app.add_subcommand("train", "train the light CNN on a dataset directory");
  std::string tr_data, tr_model = "model.ckpt", tr_history = "history.jsonl", tr_resume;
  TrainConfig train_config;
  train_cmd->add_option("--data", tr_data, "dataset directory")->required();
  train_cmd->add_option("--out", tr_model, "checkpoint output path")->capture_default_str();
  train_cmd->add_option("--history", tr_history, "per-epoch metrics JSONL path")->capture_default_str();
  train_cmd->add_option("--epochs", train_config.epochs, "training epochs")->capture_default_str();
  train_cmd->add_option("--batch", train_config.batch_size, "batch size")->capture_default_str();
  train_cmd->add_option("--lr", train_config.learning_rate, "Adam learning rate")->capture_default_str();
  train_cmd->add_option("--seed", train_config.seed, "shuffle/init seed");
  train_cmd->add_option("--resume", tr_resume, "checkpoint to resume from");

  // eval ------------------------------------------------------------------
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on a dataset's test split");
  std::string ev_data, ev_model, ev_out = "metrics.json";
  eval_cmd->add_option("--data", ev_data, "dataset directory")->required();
  eval_cmd->add_option("--model", ev_model, "checkpoint path")->required();
  eval_cmd->add_option("--out", ev_out, "metrics JSON output path")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  if (simulate->parsed()) {
    RadarConfig config = load_config_or_default(common.config_file);
    LeakageSpec leakage;
    leakage.beat_frequency_hz = leak_freq;
    leakage.amplitude = leak_amp;
    leakage.initial_phase_rad = leak_phase;
    leakage.phase_noise_profile = parse_phase_noise(phase_noise);
    std::vector<TargetSpec> targets;
    for (const auto& text : sim_targets) targets.push_back(parse_target_spec(text));
    const IqCube cube = synthesize_cube(config, leakage, targets, noise_power, common.seed);
    write_cube(sim_out, cube);
    std::cout << "wrote " << sim_out << " (" << cube.samples_per_chirp() << " x "
              << cube.chirp_count() << " samples)\n";
    return 0;
  }

  if (extract->parsed()) {
    const PipelineKind pipeline = pipeline_from_string(common.pipeline);
    const IqCube cube = read_cube(ext_in);
    const RadarConfig& config = cube.config;
    fs::create_directories(ext_out);
    const RangeSlowTimeMap map = remove_dc(build_map(cube, config, pipeline));
    Eigen::Index bin;
    if (ext_bin >= 0) {
      bin = ext_bin;
    } else {
      const double min_beat = beat_frequency_for_range(min_range, config);
      const auto min_bin = static_cast<Eigen::Index>(
          std::ceil(min_beat * static_cast<double>(config.range_fft_len) / config.sample_rate_hz));
      bin = select_target_bin(map, min_bin);
    }
    MdsImage image = render_image(stft_at_bin(map, bin, config), config);
    image.label = "extracted";
    image.meta = {pipeline, 0, bin};
    write_mds_image(fs::path(ext_out) / "mds.ppm", image);
    if (dump_spectra) {
      dump_spectra_csv(fs::path(ext_out) / "pre_spc_spectrum.csv",
                       build_map(cube, config, PipelineKind::Conventional), config);
      dump_spectra_csv(fs::path(ext_out) / "post_spc_spectrum.csv",
                       build_map(cube, config, PipelineKind::Proposed), config);
    }
    std::cout << "target bin " << bin << ", image " << (fs::path(ext_out) / "mds.ppm").string()
              << '\n';
    return 0;
  }

  if (dataset_cmd->parsed()) {
    const PipelineKind pipeline = pipeline_from_string(common.pipeline);
    RadarConfig config = load_config_or_default(common.config_file);
    const LabeledDataset ds = generate(default_classes(), per_class, pipeline, common.seed,
                                       config, LeakageSpec{}, ds_noise_power);
    write_dataset(ds_out, ds);
    const DatasetCounts counts = plan_counts(per_class, static_cast<Eigen::Index>(ds.classes.size()));
    std::cout << "wrote " << ds.entries.size() << " images to " << ds_out << " (train "
              << counts.train << ", validation " << counts.validation << ", test " << counts.test
              << ")\n";
    return 0;
  }

  if (train_cmd->parsed()) {
    const LabeledDataset ds = load_dataset(tr_data);
    const std::vector<Sample> train_set = ds.samples(Split::Train);
    const std::vector<Sample> val_set = ds.samples(Split::Validation);
    CnnModel<float> model;
    AdamState<float> adam;
    Eigen::Index start_epoch = 0;
    if (!tr_resume.empty()) {
      Checkpoint ckpt = load_model(tr_resume);
      model = std::move(ckpt.model);
      adam = std::move(ckpt.adam);
      start_epoch = ckpt.epochs_completed;
    } else {
      model = make_light_cnn<float>(train_config.seed);
      adam = AdamState<float>::zeros_like(model);
    }
    const auto history = train(model, adam, train_set, val_set, train_config, start_epoch);
    save_model(tr_model, model, adam, train_config.epochs);
    write_history_jsonl(tr_history, history, !tr_resume.empty());
    if (!history.empty())
      std::cout << "epoch " << history.back().epoch << ": train_acc "
                << history.back().train_accuracy << ", val_acc " << history.back().val_accuracy
                << '\n';
    std::cout << "wrote " << tr_model << '\n';
    return 0;
  }

  if (eval_cmd->parsed()) {
    const LabeledDataset ds = load_dataset(ev_data);
    const std::vector<Sample> test_set = ds.samples(Split::Test);
    const Checkpoint ckpt = load_model(ev_model);
    const Evaluation eval = evaluate(ckpt.model, test_set);
    const MetricsReport report = metrics_report(eval.confusion);
    std::ofstream out(ev_out);
    if (!out) throw FormatError("cannot write " + ev_out);
    out << metrics_to_json(report, eval.confusion) << '\n';
    std::vector<std::string> names;
    for (const auto& cls : ds.classes) names.push_back(cls.name);
    std::cout << metrics_to_table(report, eval.confusion, names);
    return 0;
  }

  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
