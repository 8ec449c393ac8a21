#include "mdradar/dsp.hpp"

#include <unsupported/Eigen/FFT>
#include <numbers>
#include <stdexcept>

namespace mdradar {

WindowKind window_kind_from_string(const std::string& name) {
  if (name == "hann") return WindowKind::Hann;
  if (name == "rect") return WindowKind::Rect;
  throw std::invalid_argument("unknown window kind: " + name);
}

std::string to_string(WindowKind kind) {
  return kind == WindowKind::Hann ? "hann" : "rect";
}

Eigen::VectorXd make_window(WindowKind kind, Eigen::Index n) {
  if (n <= 0) throw std::invalid_argument("window length must be positive");
  if (kind == WindowKind::Rect || n == 1) return Eigen::VectorXd::Ones(n);
  Eigen::VectorXd w(n);
  const double step = 2.0 * std::numbers::pi / static_cast<double>(n - 1);
  for (Eigen::Index k = 0; k < n; ++k) w[k] = 0.5 * (1.0 - std::cos(step * static_cast<double>(k)));
  return w;
}

namespace {
// One plan cache per worker thread; kissfft plans are cheap and deterministic.
Eigen::FFT<double>& engine() {
  thread_local Eigen::FFT<double> fft;
  return fft;
}
}  // namespace

Eigen::VectorXcd fft_forward(const Eigen::VectorXcd& x, Eigen::Index nfft) {
  if (nfft <= 0) throw std::invalid_argument("nfft must be positive");
  Eigen::VectorXcd padded = Eigen::VectorXcd::Zero(nfft);
  const Eigen::Index n = std::min(nfft, x.size());
  padded.head(n) = x.head(n);
  Eigen::VectorXcd out(nfft);
  engine().fwd(out, padded);
  return out;
}

Eigen::VectorXcd fft_inverse(const Eigen::VectorXcd& spectrum) {
  Eigen::VectorXcd out(spectrum.size());
  engine().inv(out, spectrum);
  return out;
}

Eigen::VectorXcd fftshift(const Eigen::VectorXcd& x) {
  const Eigen::Index n = x.size();
  const Eigen::Index half = (n + 1) / 2;
  Eigen::VectorXcd out(n);
  out.head(n - half) = x.tail(n - half);
  out.tail(half) = x.head(half);
  return out;
}

}  // namespace mdradar
