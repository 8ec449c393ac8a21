#include "mdradar/signal_model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mdradar/dsp.hpp"

namespace mdradar {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

Eigen::Index next_pow2(Eigen::Index n) {
  Eigen::Index p = 1;
  while (p < n) p <<= 1;
  return p;
}

/// SSB phase-noise level in dBc/Hz at offset f, piecewise log-linear between
/// profile points, clamped flat outside them.
double psd_dbc_at(const std::vector<std::pair<double, double>>& profile, double offset_hz) {
  if (offset_hz <= profile.front().first) return profile.front().second;
  if (offset_hz >= profile.back().first) return profile.back().second;
  for (std::size_t i = 1; i < profile.size(); ++i) {
    if (offset_hz <= profile[i].first) {
      const double lf0 = std::log10(profile[i - 1].first);
      const double lf1 = std::log10(profile[i].first);
      const double t = (std::log10(offset_hz) - lf0) / (lf1 - lf0);
      return profile[i - 1].second + t * (profile[i].second - profile[i - 1].second);
    }
  }
  return profile.back().second;
}
}  // namespace

void LeakageSpec::validate() const {
  if (amplitude < 0) throw std::invalid_argument("LeakageSpec: amplitude must be nonnegative");
  if (beat_frequency_hz < 0) throw std::invalid_argument("LeakageSpec: beat frequency must be nonnegative");
  for (std::size_t i = 0; i < phase_noise_profile.size(); ++i) {
    if (phase_noise_profile[i].first <= 0)
      throw std::invalid_argument("LeakageSpec: PSD offsets must be positive");
    if (i > 0 && phase_noise_profile[i].first <= phase_noise_profile[i - 1].first)
      throw std::invalid_argument("LeakageSpec: PSD offsets must be strictly increasing");
  }
}

void TargetSpec::validate(const RadarConfig& config) const {
  if (amplitude < 0) throw std::invalid_argument("TargetSpec: amplitude must be nonnegative");
  if (range_m < 0) throw std::invalid_argument("TargetSpec: range must be nonnegative");
  if (range_m >= config.max_unambiguous_range_m())
    throw std::invalid_argument("TargetSpec: range beyond max unambiguous range");
  if (blade_count < 0) throw std::invalid_argument("TargetSpec: blade_count must be nonnegative");
  if (blade_count > 0) {
    if (scatterers_per_blade < 1)
      throw std::invalid_argument("TargetSpec: rotating target needs scatterers_per_blade >= 1");
    if (blade_length_m <= 0)
      throw std::invalid_argument("TargetSpec: rotating target needs positive blade_length_m");
  }
}

double beat_frequency_for_range(double range_m, const RadarConfig& config) {
  if (range_m < 0) throw std::invalid_argument("range must be nonnegative");
  return 2.0 * range_m * config.sweep_bandwidth_hz /
             (kSpeedOfLightMps * config.sweep_period_s) +
         config.carrier_offset_hz;
}

Eigen::VectorXd phase_noise_series(const std::vector<std::pair<double, double>>& profile,
                                   Eigen::Index count, double sample_rate_hz, Rng& rng) {
  if (count <= 0) return Eigen::VectorXd();
  if (profile.empty()) return Eigen::VectorXd::Zero(count);

  const Eigen::Index nfft = next_pow2(count);
  Eigen::VectorXcd white(nfft);
  for (Eigen::Index i = 0; i < nfft; ++i) white[i] = std::complex<double>(rng.normal(), 0.0);

  Eigen::VectorXcd spectrum = fft_forward(white, nfft);
  // |H(f)|^2 = S_phi(f) * F_s / 2 shapes unit-variance white noise (one-sided
  // PSD 2/F_s) to S_phi; S_phi = 2 * 10^(dBc/10). Zero-phase symmetric filter
  // keeps the output real.
  spectrum[0] = 0.0;
  for (Eigen::Index k = 1; k <= nfft / 2; ++k) {
    const double f = static_cast<double>(k) * sample_rate_hz / static_cast<double>(nfft);
    const double s_phi = 2.0 * std::pow(10.0, psd_dbc_at(profile, f) / 10.0);
    const double h = std::sqrt(s_phi * sample_rate_hz / 2.0);
    spectrum[k] *= h;
    if (k != nfft / 2) spectrum[nfft - k] *= h;
  }
  Eigen::VectorXcd shaped = fft_inverse(spectrum);
  return shaped.head(count).real();
}

IqCube synthesize_cube(const RadarConfig& config, const LeakageSpec& leakage,
                       const std::vector<TargetSpec>& targets, double thermal_noise_power,
                       std::uint64_t seed) {
  config.validate();
  leakage.validate();
  for (const auto& t : targets) t.validate(config);
  if (thermal_noise_power < 0)
    throw std::invalid_argument("thermal noise power must be nonnegative");

  const Eigen::Index n_fast = config.samples_per_chirp;
  const Eigen::Index n_slow = config.chirps_per_image;
  Eigen::ArrayXXd re = Eigen::ArrayXXd::Zero(n_fast, n_slow);
  Eigen::ArrayXXd im = Eigen::ArrayXXd::Zero(n_fast, n_slow);

  const Eigen::ArrayXd fast_time =
      Eigen::ArrayXd::LinSpaced(n_fast, 0.0, static_cast<double>(n_fast - 1)) /
      config.sample_rate_hz;

  // Leakage tone: identical beat phase every chirp (static coupling path),
  // perturbed by one phase-noise stream coherent across the whole cube.
  if (leakage.amplitude > 0.0) {
    Rng pn_rng = Rng::derive(seed, {1});
    Eigen::VectorXd pn;
    if (!leakage.phase_noise_profile.empty())
      pn = phase_noise_series(leakage.phase_noise_profile, n_fast * n_slow,
                              config.sample_rate_hz, pn_rng);
    const double f_leak = leakage.beat_frequency_hz + config.carrier_offset_hz;
    const Eigen::ArrayXd base_phase = kTwoPi * f_leak * fast_time + leakage.initial_phase_rad;
    for (Eigen::Index m = 0; m < n_slow; ++m) {
      Eigen::ArrayXd phase = base_phase;
      if (pn.size() > 0) phase += pn.segment(m * n_fast, n_fast).array();
      re.col(m) += leakage.amplitude * phase.cos();
      im.col(m) += leakage.amplitude * phase.sin();
    }
  }

  // Target scatterers: beat tone at f_b(R(t)) with the RF phase term
  // -4*pi*f_rf*R/c carrying the micro-Doppler.
  const double beat_per_meter =
      2.0 * config.sweep_bandwidth_hz / (kSpeedOfLightMps * config.sweep_period_s);
  const double rf_phase_per_meter = -2.0 * kTwoPi * config.rf_carrier_hz / kSpeedOfLightMps * 2.0;
  for (std::size_t ti = 0; ti < targets.size(); ++ti) {
    const TargetSpec& target = targets[ti];
    if (target.amplitude <= 0.0) continue;
    Rng target_rng = Rng::derive(seed, {2, ti});
    const double init_angle = target_rng.uniform(0.0, kTwoPi);

    struct Scatterer {
      double radius;
      double angle0;
      double amplitude;
    };
    std::vector<Scatterer> scatterers;
    scatterers.push_back({0.0, 0.0, target.amplitude});  // hub / body
    for (int b = 0; b < target.blade_count; ++b) {
      const double blade_angle = init_angle + kTwoPi * b / target.blade_count;
      for (int s = 1; s <= target.scatterers_per_blade; ++s) {
        const double radius = target.blade_length_m * s / target.scatterers_per_blade;
        scatterers.push_back({radius, blade_angle,
                              target.amplitude / target.scatterers_per_blade});
      }
    }

    const double omega = kTwoPi * target.rotation_hz;
    Eigen::ArrayXd range(n_fast), phase(n_fast);
    for (Eigen::Index m = 0; m < n_slow; ++m) {
      const double t0 = static_cast<double>(m) * config.sweep_period_s;
      const Eigen::ArrayXd t_abs = fast_time + t0;
      const Eigen::ArrayXd body_range = target.range_m + target.body_velocity_mps * t_abs;
      for (const Scatterer& sc : scatterers) {
        if (sc.radius == 0.0) {
          range = body_range;
        } else {
          range = body_range + sc.radius * (omega * t_abs + sc.angle0).cos();
        }
        phase = kTwoPi * (beat_per_meter * range + config.carrier_offset_hz) * fast_time +
                rf_phase_per_meter * range;
        re.col(m) += sc.amplitude * phase.cos();
        im.col(m) += sc.amplitude * phase.sin();
      }
    }
  }

  // Complex white noise, column-major fill order (fixed for determinism).
  if (thermal_noise_power > 0.0) {
    Rng noise_rng = Rng::derive(seed, {3});
    const double sigma = std::sqrt(thermal_noise_power / 2.0);
    for (Eigen::Index m = 0; m < n_slow; ++m) {
      for (Eigen::Index n = 0; n < n_fast; ++n) {
        re(n, m) += sigma * noise_rng.normal();
        im(n, m) += sigma * noise_rng.normal();
      }
    }
  }

  IqCube cube;
  cube.config = config;
  cube.data.resize(n_fast, n_slow);
  cube.data.real() = re.matrix();
  cube.data.imag() = im.matrix();
  return cube;
}

Eigen::VectorXcd apply_iq_imbalance(const Eigen::VectorXcd& chirp, double gain_ratio,
                                    double phase_skew_rad) {
  if (gain_ratio <= 0) throw std::invalid_argument("gain_ratio must be positive");
  const double c = std::cos(phase_skew_rad);
  const double s = std::sin(phase_skew_rad);
  Eigen::VectorXcd out(chirp.size());
  for (Eigen::Index i = 0; i < chirp.size(); ++i) {
    const double in_phase = chirp[i].real();
    const double quadrature = chirp[i].imag();
    out[i] = {in_phase, gain_ratio * (quadrature * c + in_phase * s)};
  }
  return out;
}

IqCube apply_iq_imbalance(const IqCube& cube, double gain_ratio, double phase_skew_rad) {
  IqCube out;
  out.config = cube.config;
  out.data.resize(cube.data.rows(), cube.data.cols());
  for (Eigen::Index m = 0; m < cube.data.cols(); ++m)
    out.data.col(m) = apply_iq_imbalance(Eigen::VectorXcd(cube.data.col(m)), gain_ratio,
                                         phase_skew_rad);
  return out;
}

}  // namespace mdradar
