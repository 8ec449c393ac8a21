#include "mdradar/radar_config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "mdradar/error.hpp"

namespace mdradar {

namespace {

std::string format_double(double v) {
  // 17 significant digits: lossless double round-trip.
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': bad number '" + v + "'");
  }
}

Eigen::Index parse_index(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    long long i = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return static_cast<Eigen::Index>(i);
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': bad integer '" + v + "'");
  }
}

}  // namespace

void RadarConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("RadarConfig: " + msg); };
  if (sample_rate_hz <= 0) fail("sample_rate_hz must be positive");
  if (samples_per_chirp <= 0) fail("samples_per_chirp must be positive");
  if (sweep_period_s <= 0) fail("sweep_period_s must be positive");
  if (sweep_bandwidth_hz <= 0) fail("sweep_bandwidth_hz must be positive");
  if (rf_carrier_hz < 0) fail("rf_carrier_hz must be nonnegative");
  if (samples_per_chirp > nfft_leakage) fail("samples_per_chirp must not exceed nfft_leakage");
  if (samples_per_chirp > range_fft_len) fail("samples_per_chirp must not exceed range_fft_len");
  if (stft_hop < 1) fail("stft_hop must be >= 1");
  if (stft_overlap != stft_window_len - stft_hop) fail("stft_overlap must equal stft_window_len - stft_hop");
  if (stft_window_len < 1) fail("stft_window_len must be >= 1");
  if (stft_window_len > image_size) fail("stft_window_len must not exceed image_size");
  if (chirps_per_image < 2) fail("chirps_per_image must be >= 2");
  if (image_size < 2) fail("image_size must be >= 2");
  if (dynamic_range_db <= 0) fail("dynamic_range_db must be positive");
  const double samples = sweep_period_s * sample_rate_hz;
  if (std::abs(samples - static_cast<double>(samples_per_chirp)) > 1.0)
    fail("sweep_period_s * sample_rate_hz must equal samples_per_chirp within one sample");
}

double RadarConfig::max_unambiguous_range_m() const {
  // Beat frequencies are interpreted up to F_s/2 (500 m at defaults).
  return 0.5 * sample_rate_hz * kSpeedOfLightMps * sweep_period_s / (2.0 * sweep_bandwidth_hz);
}

Eigen::Index RadarConfig::stft_frame_count(Eigen::Index chirps) const {
  if (stft_window_len > chirps) throw std::invalid_argument("STFT window longer than slow-time axis");
  return (chirps - stft_window_len) / stft_hop + 1;
}

std::map<std::string, std::string> RadarConfig::to_key_values() const {
  std::map<std::string, std::string> kv;
  kv["sample_rate_hz"] = format_double(sample_rate_hz);
  kv["samples_per_chirp"] = std::to_string(samples_per_chirp);
  kv["sweep_period_s"] = format_double(sweep_period_s);
  kv["sweep_bandwidth_hz"] = format_double(sweep_bandwidth_hz);
  kv["carrier_offset_hz"] = format_double(carrier_offset_hz);
  kv["rf_carrier_hz"] = format_double(rf_carrier_hz);
  kv["nfft_leakage"] = std::to_string(nfft_leakage);
  kv["chirps_per_image"] = std::to_string(chirps_per_image);
  kv["fast_time_window"] = to_string(fast_time_window);
  kv["slow_time_window"] = to_string(slow_time_window);
  kv["stft_window_len"] = std::to_string(stft_window_len);
  kv["stft_overlap"] = std::to_string(stft_overlap);
  kv["stft_hop"] = std::to_string(stft_hop);
  kv["range_fft_len"] = std::to_string(range_fft_len);
  kv["image_size"] = std::to_string(image_size);
  kv["dynamic_range_db"] = format_double(dynamic_range_db);
  return kv;
}

RadarConfig RadarConfig::from_key_values(const std::map<std::string, std::string>& kv) {
  RadarConfig cfg;
  for (const auto& [key, value] : kv) {
    if (key == "sample_rate_hz") cfg.sample_rate_hz = parse_double(key, value);
    else if (key == "samples_per_chirp") cfg.samples_per_chirp = parse_index(key, value);
    else if (key == "sweep_period_s") cfg.sweep_period_s = parse_double(key, value);
    else if (key == "sweep_bandwidth_hz") cfg.sweep_bandwidth_hz = parse_double(key, value);
    else if (key == "carrier_offset_hz") cfg.carrier_offset_hz = parse_double(key, value);
    else if (key == "rf_carrier_hz") cfg.rf_carrier_hz = parse_double(key, value);
    else if (key == "nfft_leakage") cfg.nfft_leakage = parse_index(key, value);
    else if (key == "chirps_per_image") cfg.chirps_per_image = parse_index(key, value);
    else if (key == "fast_time_window") cfg.fast_time_window = window_kind_from_string(value);
    else if (key == "slow_time_window") cfg.slow_time_window = window_kind_from_string(value);
    else if (key == "stft_window_len") cfg.stft_window_len = parse_index(key, value);
    else if (key == "stft_overlap") cfg.stft_overlap = parse_index(key, value);
    else if (key == "stft_hop") cfg.stft_hop = parse_index(key, value);
    else if (key == "range_fft_len") cfg.range_fft_len = parse_index(key, value);
    else if (key == "image_size") cfg.image_size = parse_index(key, value);
    else if (key == "dynamic_range_db") cfg.dynamic_range_db = parse_double(key, value);
    else throw std::invalid_argument("unknown config key: " + key);
  }
  cfg.validate();
  return cfg;
}

RadarConfig RadarConfig::load(const std::filesystem::path& file) {
  return from_key_values(read_key_value_file(file));
}

void RadarConfig::save(const std::filesystem::path& file) const {
  write_key_value_file(file, to_key_values());
}

std::map<std::string, std::string> read_key_value_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw FormatError("cannot open " + file.string());
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw FormatError(file.string() + ":" + std::to_string(lineno) + ": expected key=value");
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

void write_key_value_file(const std::filesystem::path& file,
                          const std::map<std::string, std::string>& kv) {
  std::ofstream out(file);
  if (!out) throw FormatError("cannot write " + file.string());
  for (const auto& [key, value] : kv) out << key << '=' << value << '\n';
}

}  // namespace mdradar
