#pragma once

// Brute-force reference implementations used as test oracles. These stay
// independent of the library's FFT/STFT code paths on purpose.

#include <Eigen/Dense>
#include <complex>
#include <numbers>

namespace oracles {

/// Plain O(N * nfft) DFT of x zero-padded to nfft points.
inline Eigen::VectorXcd naive_dft(const Eigen::VectorXcd& x, Eigen::Index nfft) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(nfft);
  const double step = -2.0 * std::numbers::pi / static_cast<double>(nfft);
  for (Eigen::Index k = 0; k < nfft; ++k) {
    std::complex<double> acc = 0.0;
    for (Eigen::Index n = 0; n < x.size(); ++n)
      acc += x[n] * std::polar(1.0, step * static_cast<double>(k) * static_cast<double>(n));
    out[k] = acc;
  }
  return out;
}

inline Eigen::VectorXcd naive_dft(const Eigen::VectorXd& x, Eigen::Index nfft) {
  return naive_dft(Eigen::VectorXcd(x.cast<std::complex<double>>()), nfft);
}

inline Eigen::Index peak_bin(const Eigen::VectorXcd& spectrum) {
  Eigen::Index best = 0;
  double best_power = -1.0;
  for (Eigen::Index k = 0; k < spectrum.size(); ++k) {
    if (std::norm(spectrum[k]) > best_power) {
      best_power = std::norm(spectrum[k]);
      best = k;
    }
  }
  return best;
}

inline double power_db(std::complex<double> v) { return 10.0 * std::log10(std::norm(v) + 1e-300); }

/// Windowed sliding DFT (the STFT definition, spelled out directly).
/// Returns nfft x frames with fftshifted rows (zero Doppler at nfft/2).
inline Eigen::MatrixXcd naive_stft(const Eigen::VectorXcd& series, const Eigen::VectorXd& window,
                                   Eigen::Index hop, Eigen::Index nfft) {
  const Eigen::Index win = window.size();
  const Eigen::Index frames = (series.size() - win) / hop + 1;
  Eigen::MatrixXcd out(nfft, frames);
  for (Eigen::Index f = 0; f < frames; ++f) {
    Eigen::VectorXcd segment = Eigen::VectorXcd::Zero(nfft);
    for (Eigen::Index i = 0; i < win; ++i) segment[i] = window[i] * series[f * hop + i];
    const Eigen::VectorXcd spec = naive_dft(segment, nfft);
    for (Eigen::Index k = 0; k < nfft; ++k)
      out((k + nfft / 2) % nfft, f) = spec[k];  // fftshift
  }
  return out;
}

/// Complex tone A * exp(j(2 pi f n / fs + phase)), n = 0..count-1.
inline Eigen::VectorXcd tone(double amplitude, double freq_hz, double phase_rad, double fs,
                             Eigen::Index count) {
  Eigen::VectorXcd x(count);
  for (Eigen::Index n = 0; n < count; ++n)
    x[n] = std::polar(amplitude,
                      2.0 * std::numbers::pi * freq_hz * static_cast<double>(n) / fs + phase_rad);
  return x;
}

}  // namespace oracles
