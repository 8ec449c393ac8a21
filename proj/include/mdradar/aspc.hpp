#pragma once

#include <Eigen/Dense>

#include "mdradar/radar_config.hpp"

namespace mdradar {

/// Leakage tone parameters recovered from one chirp's zero-padded spectrum.
struct LeakageEstimate {
  Eigen::Index bin_index = 0;   // argmax of the power spectrum
  double frequency_hz = 0.0;    // bin_index * F_s / NFFT
  double phase_rad = 0.0;       // spectrum phase at the bin, referenced to n = 0, in (-pi, pi]
};

/// One chirp after stationary-point concentration: real-valued samples plus
/// the leakage estimate that produced them.
struct SpcChirp {
  Eigen::VectorXd samples;
  LeakageEstimate estimate;
};

/// Blind receiver-imbalance correction from Hann-weighted sample moments:
/// gain = sqrt(E[Q^2]/E[I^2]), skew = asin(E[IQ]/sqrt(E[I^2]E[Q^2])), then the
/// imbalance transform is inverted. Estimates below 1e-3 leave the chirp
/// untouched (already balanced within the estimator's resolution); all-zero
/// input is returned unchanged.
Eigen::VectorXcd correct_iq_imbalance(const Eigen::VectorXcd& chirp);

/// Index of the strongest bin of the nfft-point zero-padded power spectrum
/// (fast-time Hann window applied first). Ties break toward the smaller
/// index. Throws NumericError for an all-zero chirp.
Eigen::Index find_leakage_bin(const Eigen::VectorXcd& chirp, Eigen::Index nfft);

/// Frequency and phase of the dominant (leakage) tone.
LeakageEstimate estimate_leakage(const Eigen::VectorXcd& chirp, const RadarConfig& config);

/// Mixes the chirp with the conjugate NCO at the estimated frequency/phase
/// and keeps the real part: z[n] = Re(x[n] * conj(exp(j(2 pi f n / F_s + theta)))).
SpcChirp apply_spc(const Eigen::VectorXcd& chirp, const LeakageEstimate& estimate,
                   const RadarConfig& config);

/// Full per-chirp chain: imbalance correction -> leakage estimation -> conjugate
/// mixing -> real part.
SpcChirp process_chirp(const Eigen::VectorXcd& raw_chirp, const RadarConfig& config);

}  // namespace mdradar
