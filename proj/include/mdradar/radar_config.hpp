#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <map>
#include <string>

#include "mdradar/dsp.hpp"

namespace mdradar {

/// Propagation speed convention used throughout; the round value keeps the
/// 500 m <-> 2.5 MHz default pairing exact (0.07% off the SI value).
inline constexpr double kSpeedOfLightMps = 3.0e8;

/// Single source of truth for a run: sampling and sweep parameters, leakage
/// search length, map/STFT geometry and rendering knobs.
struct RadarConfig {
  double sample_rate_hz = 5e6;
  Eigen::Index samples_per_chirp = 1000;
  double sweep_period_s = 200e-6;
  double sweep_bandwidth_hz = 150e6;
  double carrier_offset_hz = 0.0;          // final IF carrier
  double rf_carrier_hz = 14.35e9;          // RF frequency at sweep start
  Eigen::Index nfft_leakage = 1 << 19;
  Eigen::Index chirps_per_image = 256;
  WindowKind fast_time_window = WindowKind::Hann;
  WindowKind slow_time_window = WindowKind::Hann;
  Eigen::Index stft_window_len = 16;
  Eigen::Index stft_overlap = 15;
  Eigen::Index stft_hop = 1;
  Eigen::Index range_fft_len = 1024;
  Eigen::Index image_size = 128;
  double dynamic_range_db = 40.0;

  /// Throws std::invalid_argument when any structural invariant is broken.
  void validate() const;

  double range_resolution_m() const { return kSpeedOfLightMps / (2.0 * sweep_bandwidth_hz); }
  double max_unambiguous_range_m() const;
  double prf_hz() const { return 1.0 / sweep_period_s; }
  Eigen::Index stft_frame_count(Eigen::Index chirps) const;

  /// Flat key=value text round-trip. Unknown keys are rejected.
  static RadarConfig from_key_values(const std::map<std::string, std::string>& kv);
  std::map<std::string, std::string> to_key_values() const;
  static RadarConfig load(const std::filesystem::path& file);
  void save(const std::filesystem::path& file) const;
};

/// Parses "key=value" lines (blank lines and '#' comments allowed).
std::map<std::string, std::string> read_key_value_file(const std::filesystem::path& file);
void write_key_value_file(const std::filesystem::path& file,
                          const std::map<std::string, std::string>& kv);

}  // namespace mdradar
