#include "mdradar/aspc.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mdradar/dsp.hpp"
#include "mdradar/error.hpp"

namespace mdradar {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kImbalanceDeadband = 1e-3;

double wrap_phase(double phase) {
  // (-pi, pi]
  double p = std::remainder(phase, kTwoPi);
  if (p <= -std::numbers::pi) p += kTwoPi;
  return p;
}

Eigen::VectorXcd windowed_spectrum(const Eigen::VectorXcd& chirp, Eigen::Index nfft) {
  const Eigen::VectorXd window = make_window(WindowKind::Hann, chirp.size());
  return fft_forward(window.asDiagonal() * chirp, nfft);
}
}  // namespace

Eigen::VectorXcd correct_iq_imbalance(const Eigen::VectorXcd& chirp) {
  const Eigen::Index n = chirp.size();
  if (n < 2) throw std::invalid_argument("correct_iq_imbalance: need at least 2 samples");

  // Hann-weighted moments suppress the spectral leakage of finite tones by
  // ~100 dB, which a plain mean would leave at ~1e-3.
  const Eigen::VectorXd window = make_window(WindowKind::Hann, n);
  const double wsum = window.sum();
  const Eigen::ArrayXd in_phase = chirp.real().array();
  const Eigen::ArrayXd quadrature = chirp.imag().array();
  const Eigen::ArrayXd w = window.array();
  const double mii = (w * in_phase.square()).sum() / wsum;
  const double mqq = (w * quadrature.square()).sum() / wsum;
  const double miq = (w * in_phase * quadrature).sum() / wsum;
  if (mii <= 0.0 || mqq <= 0.0) return chirp;  // degenerate rail, nothing to estimate

  const double gain = std::sqrt(mqq / mii);
  const double sin_skew = std::clamp(miq / std::sqrt(mii * mqq), -1.0, 1.0);
  const double skew = std::asin(sin_skew);
  if (std::abs(gain - 1.0) < kImbalanceDeadband && std::abs(skew) < kImbalanceDeadband)
    return chirp;
  // Estimates far outside receiver-hardware territory mean the moment
  // statistics are being driven by signal structure (e.g. tones at the
  // Nyquist/DC edges, where circularity is unobservable), not imbalance.
  if (gain < 0.25 || gain > 4.0 || std::abs(skew) > std::numbers::pi / 3.0) return chirp;

  const double cos_skew = std::cos(skew);
  Eigen::VectorXcd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double ii = in_phase[i];
    const double qq = (quadrature[i] / gain - ii * sin_skew) / cos_skew;
    out[i] = {ii, qq};
  }
  return out;
}

Eigen::Index find_leakage_bin(const Eigen::VectorXcd& chirp, Eigen::Index nfft) {
  if (chirp.size() > nfft)
    throw std::invalid_argument("find_leakage_bin: chirp longer than nfft");
  if (chirp.size() == 0 || chirp.cwiseAbs().maxCoeff() == 0.0)
    throw NumericError("find_leakage_bin: all-zero chirp, no leakage peak");

  const Eigen::VectorXcd spectrum = windowed_spectrum(chirp, nfft);
  Eigen::Index best = 0;
  double best_power = -1.0;
  for (Eigen::Index k = 0; k < nfft; ++k) {
    const double p = std::norm(spectrum[k]);
    if (p > best_power) {
      best_power = p;
      best = k;
    }
  }
  return best;
}

LeakageEstimate estimate_leakage(const Eigen::VectorXcd& chirp, const RadarConfig& config) {
  if (chirp.size() > config.nfft_leakage)
    throw std::invalid_argument("estimate_leakage: chirp longer than nfft_leakage");
  if (chirp.size() == 0 || chirp.cwiseAbs().maxCoeff() == 0.0)
    throw NumericError("estimate_leakage: all-zero chirp, no leakage peak");

  const Eigen::VectorXcd spectrum = windowed_spectrum(chirp, config.nfft_leakage);
  Eigen::Index best = 0;
  double best_power = -1.0;
  for (Eigen::Index k = 0; k < config.nfft_leakage; ++k) {
    const double p = std::norm(spectrum[k]);
    if (p > best_power) {
      best_power = p;
      best = k;
    }
  }
  LeakageEstimate est;
  est.bin_index = best;
  est.frequency_hz = static_cast<double>(best) * config.sample_rate_hz /
                     static_cast<double>(config.nfft_leakage);
  est.phase_rad = wrap_phase(std::arg(spectrum[best]));
  return est;
}

SpcChirp apply_spc(const Eigen::VectorXcd& chirp, const LeakageEstimate& estimate,
                   const RadarConfig& config) {
  if (chirp.size() != config.samples_per_chirp)
    throw std::invalid_argument("apply_spc: chirp length does not match config");

  const Eigen::ArrayXd n_over_fs =
      Eigen::ArrayXd::LinSpaced(chirp.size(), 0.0, static_cast<double>(chirp.size() - 1)) /
      config.sample_rate_hz;
  const Eigen::ArrayXd nco_phase = kTwoPi * estimate.frequency_hz * n_over_fs + estimate.phase_rad;
  SpcChirp out;
  out.estimate = estimate;
  // Re(x * conj(nco)) = I cos(phi) + Q sin(phi)
  out.samples = (chirp.real().array() * nco_phase.cos() +
                 chirp.imag().array() * nco_phase.sin())
                    .matrix();
  return out;
}

SpcChirp process_chirp(const Eigen::VectorXcd& raw_chirp, const RadarConfig& config) {
  const Eigen::VectorXcd corrected = correct_iq_imbalance(raw_chirp);
  const LeakageEstimate estimate = estimate_leakage(corrected, config);
  return apply_spc(corrected, estimate, config);
}

}  // namespace mdradar
