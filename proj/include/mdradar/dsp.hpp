#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>

namespace mdradar {

enum class WindowKind { Hann, Rect };

WindowKind window_kind_from_string(const std::string& name);
std::string to_string(WindowKind kind);

/// Symmetric window of length n (Hann: 0.5*(1 - cos(2*pi*k/(n-1)))).
Eigen::VectorXd make_window(WindowKind kind, Eigen::Index n);

/// Forward DFT of x zero-padded (or truncated) to nfft points, unscaled.
Eigen::VectorXcd fft_forward(const Eigen::VectorXcd& x, Eigen::Index nfft);

/// Inverse DFT, scaled by 1/N.
Eigen::VectorXcd fft_inverse(const Eigen::VectorXcd& spectrum);

/// Reorders so the zero-frequency bin sits at n/2 (even n) resp. (n-1)/2.
Eigen::VectorXcd fftshift(const Eigen::VectorXcd& x);

inline double amplitude_db(double magnitude) {
  return 20.0 * std::log10(magnitude);
}

}  // namespace mdradar
