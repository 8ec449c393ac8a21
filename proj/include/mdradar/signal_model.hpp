#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "mdradar/radar_config.hpp"
#include "mdradar/rng.hpp"

namespace mdradar {

/// Complex beat-signal samples, fast time (rows, index n) by slow time
/// (columns, index m). Chirps are back-to-back: absolute time of sample
/// (n, m) is m*T + n/F_s.
struct IqCube {
  Eigen::MatrixXcd data;
  RadarConfig config;

  Eigen::Index samples_per_chirp() const { return data.rows(); }
  Eigen::Index chirp_count() const { return data.cols(); }
};

/// Transmit-to-receive coupling path: a dominant beat tone whose phase noise
/// sets the visible noise floor.
struct LeakageSpec {
  double beat_frequency_hz = 40e3;
  double amplitude = 1.0;  // 0 disables the leakage path
  /// Piecewise log-linear SSB phase-noise PSD, (offset_hz, dBc_per_hz),
  /// offsets strictly increasing. Empty = noiseless oscillator.
  std::vector<std::pair<double, double>> phase_noise_profile = default_phase_noise_profile();
  double initial_phase_rad = 0.3;

  static std::vector<std::pair<double, double>> default_phase_noise_profile() {
    return {{1e3, -60.0}, {1e4, -70.0}, {1e5, -90.0}, {1e6, -110.0}};
  }
  void validate() const;
};

/// Point or rotating-blade scatterer group. blade_count == 0 means a single
/// static point; otherwise blade_count blades with scatterers_per_blade
/// points each rotate at rotation_hz, plus a hub point at full amplitude
/// (each blade scatterer carries amplitude / scatterers_per_blade).
struct TargetSpec {
  double range_m = 100.0;
  double amplitude = 0.01;
  double body_velocity_mps = 0.0;
  int blade_count = 0;
  double blade_length_m = 0.0;
  double rotation_hz = 0.0;
  int scatterers_per_blade = 0;

  void validate(const RadarConfig& config) const;
};

/// f_beat = 2 * R * BW / (c * T), plus the configured IF carrier offset.
double beat_frequency_for_range(double range_m, const RadarConfig& config);

/// Real phase-noise sample stream at F_s shaped to the given SSB PSD profile.
Eigen::VectorXd phase_noise_series(const std::vector<std::pair<double, double>>& profile,
                                   Eigen::Index count, double sample_rate_hz, Rng& rng);

/// Builds the full beat-signal cube: leakage tone with coherent phase noise,
/// target scatterer tones, and complex white noise of the given power per
/// sample. Identical arguments (including seed) give bit-identical cubes.
IqCube synthesize_cube(const RadarConfig& config, const LeakageSpec& leakage,
                       const std::vector<TargetSpec>& targets, double thermal_noise_power,
                       std::uint64_t seed);

/// Receiver imbalance stimulus: I' = I, Q' = gain * (Q cos(skew) + I sin(skew)).
IqCube apply_iq_imbalance(const IqCube& cube, double gain_ratio, double phase_skew_rad);
Eigen::VectorXcd apply_iq_imbalance(const Eigen::VectorXcd& chirp, double gain_ratio,
                                    double phase_skew_rad);

}  // namespace mdradar
