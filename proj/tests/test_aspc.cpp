#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "mdradar/aspc.hpp"
#include "mdradar/dsp.hpp"
#include "mdradar/error.hpp"
#include "mdradar/signal_model.hpp"
#include "support/oracles.hpp"

using namespace mdradar;

namespace {

RadarConfig default_config() {
  RadarConfig cfg;
  cfg.chirps_per_image = 8;
  cfg.stft_window_len = 8;
  cfg.stft_overlap = 7;
  cfg.validate();
  return cfg;
}

RadarConfig desk_config(Eigen::Index chirps = 8) {
  RadarConfig cfg = default_config();
  cfg.chirps_per_image = chirps;
  cfg.nfft_leakage = 1 << 16;
  cfg.validate();
  return cfg;
}

/// Image-to-carrier amplitude ratio of a distorted +freq tone, measured on an
/// exact DFT grid (no padding, no window, integer cycles).
double image_ratio(const Eigen::VectorXcd& signal, Eigen::Index carrier_bin) {
  const Eigen::VectorXcd spec = oracles::naive_dft(signal, signal.size());
  return std::abs(spec[signal.size() - carrier_bin]) / std::abs(spec[carrier_bin]);
}

}  // namespace

TEST_CASE("correct_iq_imbalance leaves balanced tones untouched") {
  const double fs = 5e6;
  const Eigen::VectorXcd tone = oracles::tone(2.0, 78e3, 0.7, fs, 1000);
  const Eigen::VectorXcd out = correct_iq_imbalance(tone);
  CHECK((out - tone).cwiseAbs().maxCoeff() < 1e-6 * 2.0);
  const Eigen::VectorXcd zeros = Eigen::VectorXcd::Zero(100);
  CHECK(correct_iq_imbalance(zeros).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("correct_iq_imbalance recovers 30+ dB of image rejection") {
  const double fs = 5e6;
  const Eigen::Index n = 1024, k = 120;
  const Eigen::VectorXcd tone = oracles::tone(1.0, k * fs / n, 1.1, fs, n);

  for (auto [gain, skew_deg] : {std::pair{1.2, 0.0}, std::pair{1.0, 5.0}}) {
    const double skew = skew_deg * std::numbers::pi / 180.0;
    const Eigen::VectorXcd distorted = apply_iq_imbalance(tone, gain, skew);
    const Eigen::VectorXcd corrected = correct_iq_imbalance(distorted);
    const double before = image_ratio(distorted, k);
    const double after = image_ratio(corrected, k);
    CHECK(20.0 * std::log10(before / after) >= 30.0);
  }
}

TEST_CASE("find_leakage_bin: on-grid, dominance, off-grid, empty") {
  const RadarConfig cfg = default_config();
  const double fs = cfg.sample_rate_hz;
  const double nfft = static_cast<double>(cfg.nfft_leakage);

  SUBCASE("tone exactly on bin 8192 of 2^19") {
    const double freq = 8192.0 * fs / nfft;
    const Eigen::VectorXcd x = oracles::tone(1.0, freq, 0.2, fs, cfg.samples_per_chirp);
    CHECK(find_leakage_bin(x, cfg.nfft_leakage) == 8192);
  }
  SUBCASE("leakage 60 dB above a target still wins") {
    const double leak_freq = 8192.0 * fs / nfft;
    Eigen::VectorXcd x = oracles::tone(1.0, leak_freq, 0.2, fs, cfg.samples_per_chirp);
    x += oracles::tone(1e-3, 500e3, 1.3, fs, cfg.samples_per_chirp);
    // coarse brute-force cross-check of the winning region
    const Eigen::VectorXd hann = make_window(WindowKind::Hann, x.size());
    const Eigen::VectorXcd coarse = oracles::naive_dft(
        Eigen::VectorXcd(hann.asDiagonal() * x), 8192);
    CHECK(std::abs(oracles::peak_bin(coarse) * fs / 8192 - leak_freq) < 2 * fs / 8192);
    CHECK(find_leakage_bin(x, cfg.nfft_leakage) == 8192);
  }
  SUBCASE("off-grid 100 kHz lands within one fine bin") {
    const Eigen::VectorXcd x = oracles::tone(1.0, 100e3, -0.4, fs, cfg.samples_per_chirp);
    const auto expected = static_cast<Eigen::Index>(std::lround(100e3 * nfft / fs));
    CHECK(std::abs(find_leakage_bin(x, cfg.nfft_leakage) - expected) <= 1);
  }
  SUBCASE("all-zero chirp raises NumericError") {
    CHECK_THROWS_AS(find_leakage_bin(Eigen::VectorXcd::Zero(1000), cfg.nfft_leakage),
                    NumericError);
  }
}

TEST_CASE("estimate_leakage recovers frequency and phase") {
  const RadarConfig cfg = default_config();
  const double fs = cfg.sample_rate_hz;

  SUBCASE("on-grid tone, phase pi/4") {
    const double freq = 10486.0 * fs / static_cast<double>(cfg.nfft_leakage);
    const double phase = std::numbers::pi / 4;
    const Eigen::VectorXcd x = oracles::tone(1.0, freq, phase, fs, cfg.samples_per_chirp);
    const LeakageEstimate est = estimate_leakage(x, cfg);
    CHECK(est.bin_index == 10486);
    CHECK(std::abs(est.frequency_hz - freq) <= 1e-9 * freq);
    CHECK(std::abs(est.phase_rad - phase) < 1e-2);
  }
  SUBCASE("constant chirp estimates DC at phase 0") {
    const Eigen::VectorXcd x = Eigen::VectorXcd::Constant(cfg.samples_per_chirp, {1.0, 0.0});
    const LeakageEstimate est = estimate_leakage(x, cfg);
    CHECK(est.bin_index == 0);
    CHECK(est.frequency_hz == 0.0);
    CHECK(std::abs(est.phase_rad) < 1e-9);
  }
  SUBCASE("negative phase") {
    const double freq = 4200.0 * fs / static_cast<double>(cfg.nfft_leakage);
    const double phase = -std::numbers::pi / 3;
    const Eigen::VectorXcd x = oracles::tone(0.5, freq, phase, fs, cfg.samples_per_chirp);
    const LeakageEstimate est = estimate_leakage(x, cfg);
    CHECK(std::abs(est.phase_rad - phase) < 1e-2);
  }
}

TEST_CASE("apply_spc: self-mixing and phase flips") {
  const RadarConfig cfg = default_config();
  const double fs = cfg.sample_rate_hz;
  const double freq = 8192.0 * fs / static_cast<double>(cfg.nfft_leakage);
  const double phase = 0.9;
  const Eigen::VectorXcd x = oracles::tone(1.0, freq, phase, fs, cfg.samples_per_chirp);

  LeakageEstimate est;
  est.bin_index = 8192;
  est.frequency_hz = freq;
  est.phase_rad = phase;
  const SpcChirp z = apply_spc(x, est, cfg);
  CHECK((z.samples.array() - 1.0).abs().maxCoeff() < 1e-12);

  est.phase_rad = phase - std::numbers::pi;
  const SpcChirp z_flipped = apply_spc(x, est, cfg);
  CHECK((z_flipped.samples.array() + 1.0).abs().maxCoeff() < 1e-12);
}

TEST_CASE("apply_spc shifts a target tone to the beat-frequency difference") {
  const RadarConfig cfg = default_config();
  const double fs = cfg.sample_rate_hz;
  const double leak_freq = 8192.0 * fs / static_cast<double>(cfg.nfft_leakage);  // 78.125 kHz
  const double target_freq = 500e3;
  Eigen::VectorXcd x = oracles::tone(1.0, leak_freq, 0.3, fs, cfg.samples_per_chirp);
  x += oracles::tone(0.01, target_freq, -0.8, fs, cfg.samples_per_chirp);

  const SpcChirp z = process_chirp(x, cfg);
  const Eigen::Index nfft = 4096;
  // Hann before the oracle transform, otherwise the mixed-to-DC leakage's
  // zero-padding skirts bury the -46 dB target
  const Eigen::VectorXd hann = make_window(WindowKind::Hann, z.samples.size());
  const Eigen::VectorXcd spec = oracles::naive_dft(
      Eigen::VectorXd((hann.array() * z.samples.array()).matrix()), nfft);
  // strongest bin in the lower half, away from the DC main lobe
  Eigen::Index best = 0;
  double best_mag = -1;
  for (Eigen::Index k = 32; k < nfft / 2; ++k) {
    if (std::abs(spec[k]) > best_mag) {
      best_mag = std::abs(spec[k]);
      best = k;
    }
  }
  const double expected = (target_freq - leak_freq) * nfft / fs;
  CHECK(std::abs(best - expected) <= 2.0);
}

TEST_CASE("process_chirp cancels a clean on-grid leakage to below -100 dB") {
  const RadarConfig cfg = default_config();
  const double fs = cfg.sample_rate_hz;
  const double freq = 8192.0 * fs / static_cast<double>(cfg.nfft_leakage);
  const Eigen::VectorXcd x = oracles::tone(1.0, freq, 0.25, fs, cfg.samples_per_chirp);

  const SpcChirp z = process_chirp(x, cfg);
  // no zero padding: a constant maps to the DC bin only
  const Eigen::Index nfft = cfg.samples_per_chirp;
  const double pre_peak = oracles::naive_dft(x, nfft).cwiseAbs().maxCoeff();
  const Eigen::VectorXcd post = oracles::naive_dft(z.samples, nfft);
  double worst = 0.0;
  for (Eigen::Index k = 1; k < nfft; ++k) worst = std::max(worst, std::abs(post[k]));
  CHECK(20.0 * std::log10(worst / pre_peak) <= -100.0);
}

TEST_CASE("process_chirp lowers the phase-noise floor") {
  RadarConfig cfg = desk_config(2);
  cfg.nfft_leakage = 1 << 19;
  LeakageSpec leakage;  // default phase-noise profile
  const IqCube cube = synthesize_cube(cfg, leakage, {}, 0.0, 31);
  const Eigen::VectorXcd x = cube.data.col(0);
  const SpcChirp z = process_chirp(x, cfg);

  const Eigen::Index nfft = cfg.samples_per_chirp;
  const Eigen::VectorXcd pre = oracles::naive_dft(x, nfft);
  const Eigen::VectorXcd post = oracles::naive_dft(z.samples, nfft);
  const Eigen::Index leak_bin =
      static_cast<Eigen::Index>(std::lround(leakage.beat_frequency_hz * nfft / cfg.sample_rate_hz));

  double pre_noise = 0.0, post_noise = 0.0;
  for (Eigen::Index k = 0; k < nfft; ++k) {
    const Eigen::Index dist_leak = std::min(std::abs(k - leak_bin),
                                            std::abs(k - (nfft - leak_bin)));
    const Eigen::Index dist_dc = std::min(k, nfft - k);
    if (dist_leak > 10 && dist_dc > 10) {
      pre_noise += std::norm(pre[k]);
      post_noise += std::norm(post[k]);
    }
  }
  CHECK(post_noise < pre_noise);
  CHECK(10.0 * std::log10(pre_noise / post_noise) > 10.0);  // substantial, not marginal
}

TEST_CASE("process_chirp keeps target SNR at least as good as the raw chirp") {
  RadarConfig cfg = desk_config(2);
  cfg.nfft_leakage = 1 << 19;
  LeakageSpec leakage;
  TargetSpec target;
  target.range_m = 100.0;
  target.amplitude = 0.003;
  const IqCube cube = synthesize_cube(cfg, leakage, {target}, 1e-6, 77);
  const Eigen::VectorXcd x = cube.data.col(0);
  const SpcChirp z = process_chirp(x, cfg);

  const Eigen::Index nfft = 4096;
  const Eigen::VectorXd hann = make_window(WindowKind::Hann, x.size());
  const Eigen::VectorXcd pre = oracles::naive_dft(Eigen::VectorXcd(hann.asDiagonal() * x), nfft);
  const Eigen::VectorXcd post = oracles::naive_dft(
      Eigen::VectorXcd((hann.array() * z.samples.array()).matrix().cast<std::complex<double>>()),
      nfft);

  auto snr_db = [&](const Eigen::VectorXcd& spec, double target_freq) {
    const auto center = static_cast<Eigen::Index>(std::lround(target_freq * nfft / cfg.sample_rate_hz));
    double peak = 0;
    for (Eigen::Index k = center - 4; k <= center + 4; ++k) peak = std::max(peak, std::norm(spec[k]));
    std::vector<double> floor;
    for (Eigen::Index k = 16; k < nfft / 2; ++k)
      if (std::abs(k - center) > 32) floor.push_back(std::norm(spec[k]));
    std::nth_element(floor.begin(), floor.begin() + floor.size() / 2, floor.end());
    return 10.0 * std::log10(peak / floor[floor.size() / 2]);
  };

  const double raw_beat = beat_frequency_for_range(target.range_m, cfg);
  const double pre_snr = snr_db(pre, raw_beat);
  const double post_snr = snr_db(post, raw_beat - leakage.beat_frequency_hz);
  CHECK(post_snr >= pre_snr);
}

TEST_CASE("self-cancellation holds for random on-grid tones") {
  const RadarConfig cfg = default_config();
  const double fs = cfg.sample_rate_hz;
  Rng rng(404);
  // Bins span [0.01, 0.47] * NFFT. At the DC/Nyquist edges the tone's image
  // coincides with itself, the blind imbalance estimator has no circularity
  // to measure, and exact cancellation is unattainable by construction.
  const auto lo = static_cast<Eigen::Index>(0.01 * (1 << 19));
  const auto hi = static_cast<Eigen::Index>(0.47 * (1 << 19));
  for (int trial = 0; trial < 10; ++trial) {
    const auto bin = static_cast<Eigen::Index>(lo + rng.uniform_below(hi - lo));
    const double amplitude = 0.1 + rng.uniform01() * 9.9;
    const double phase = rng.uniform(-3.0, 3.0);
    const double freq = static_cast<double>(bin) * fs / static_cast<double>(cfg.nfft_leakage);
    const Eigen::VectorXcd x = oracles::tone(amplitude, freq, phase, fs, cfg.samples_per_chirp);
    const SpcChirp z = process_chirp(x, cfg);
    CHECK((z.samples.array() - amplitude).abs().maxCoeff() <= 1e-9 * amplitude);
  }
}

TEST_CASE("delay compensation: post-SPC bin = raw bin - leakage bin, five ranges") {
  RadarConfig cfg = desk_config(2);
  const Eigen::Index nfft = cfg.range_fft_len;
  const Eigen::VectorXd hann = make_window(WindowKind::Hann, cfg.samples_per_chirp);
  LeakageSpec leakage = LeakageSpec{};
  leakage.phase_noise_profile.clear();

  for (double range : {60.0, 120.0, 200.0, 320.0, 450.0}) {
    TargetSpec target;
    target.range_m = range;
    target.amplitude = 0.01;
    const IqCube cube = synthesize_cube(cfg, leakage, {target}, 0.0, 50);
    const Eigen::VectorXcd x = cube.data.col(0);

    const Eigen::VectorXcd pre = oracles::naive_dft(Eigen::VectorXcd(hann.asDiagonal() * x), nfft);
    Eigen::Index raw_bin = 0;
    double best = -1;
    for (Eigen::Index k = 20; k < nfft / 2; ++k)  // skip the leakage region
      if (std::norm(pre[k]) > best) { best = std::norm(pre[k]); raw_bin = k; }

    const SpcChirp z = process_chirp(x, cfg);
    const Eigen::VectorXcd post = oracles::naive_dft(
        Eigen::VectorXcd((hann.array() * z.samples.array()).matrix().cast<std::complex<double>>()),
        nfft);
    Eigen::Index post_bin = 0;
    best = -1;
    for (Eigen::Index k = 8; k < nfft / 2; ++k)
      if (std::norm(post[k]) > best) { best = std::norm(post[k]); post_bin = k; }

    const auto leak_bin = static_cast<Eigen::Index>(
        std::lround(leakage.beat_frequency_hz * nfft / cfg.sample_rate_hz));
    CHECK(std::abs(post_bin - (raw_bin - leak_bin)) <= 1);
  }
}

TEST_CASE("|z| never exceeds |x| pointwise (mixing is a unit-modulus rotation)") {
  const RadarConfig cfg = default_config();
  Rng rng(8);
  Eigen::VectorXcd x(cfg.samples_per_chirp);
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = {rng.normal(), rng.normal()};
  x += oracles::tone(3.0, 40e3, 0.1, cfg.sample_rate_hz, cfg.samples_per_chirp);
  const SpcChirp z = apply_spc(x, estimate_leakage(x, cfg), cfg);
  for (Eigen::Index i = 0; i < x.size(); ++i)
    CHECK(std::abs(z.samples[i]) <= std::abs(x[i]) + 1e-12);
}

TEST_CASE("leakage frequency estimates are stable across a stationary scene") {
  RadarConfig cfg = default_config();
  cfg.chirps_per_image = 16;
  cfg.validate();
  // Oscillator phase noise makes the true per-chirp leakage frequency wander
  // by hundreds of Hz (that wander is why estimation repeats every chirp);
  // estimator stability is measured against a clean oscillator plus thermal
  // noise.
  LeakageSpec leakage;
  leakage.phase_noise_profile.clear();
  const IqCube cube = synthesize_cube(cfg, leakage, {}, 1e-6, 17);
  double lo = 1e300, hi = -1e300;
  for (Eigen::Index m = 0; m < cube.chirp_count(); ++m) {
    const LeakageEstimate est = estimate_leakage(correct_iq_imbalance(cube.data.col(m)), cfg);
    lo = std::min(lo, est.frequency_hz);
    hi = std::max(hi, est.frequency_hz);
  }
  CHECK(hi - lo < 2.0 * cfg.sample_rate_hz / static_cast<double>(cfg.nfft_leakage));
}
