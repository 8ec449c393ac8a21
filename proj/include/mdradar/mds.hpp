#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mdradar/signal_model.hpp"

namespace mdradar {

enum class PipelineKind { Conventional, Proposed };

PipelineKind pipeline_from_string(const std::string& name);
std::string to_string(PipelineKind kind);

/// Accumulated per-chirp range spectra Z[k, m]: rows are range-FFT bins,
/// columns are chirps.
struct RangeSlowTimeMap {
  Eigen::MatrixXcd data;
  PipelineKind pipeline = PipelineKind::Conventional;
};

/// 128x128x3 8-bit spectrogram sample, row-major (row, col, channel).
/// Row 0 is the most positive Doppler.
struct MdsImage {
  Eigen::Index size = 0;
  std::vector<std::uint8_t> pixels;
  std::string label;
  struct Meta {
    PipelineKind pipeline = PipelineKind::Conventional;
    std::uint64_t seed = 0;
    Eigen::Index target_bin = 0;
  } meta;
};

/// Per-chirp processing followed by the fast-time window and range FFT.
/// Proposed: A-SPC chain per chirp; conventional: imbalance correction only.
RangeSlowTimeMap build_map(const IqCube& cube, const RadarConfig& config, PipelineKind pipeline);

/// Subtracts each range bin's slow-time mean.
RangeSlowTimeMap remove_dc(const RangeSlowTimeMap& map);

/// Strongest range bin by slow-time energy over the interpretable bins
/// [min_bin, range_fft_len/2); ties toward the smaller index. Throws
/// NumericError when the band carries no energy.
Eigen::Index select_target_bin(const RangeSlowTimeMap& map, Eigen::Index min_bin = 1);

/// Sliding-window spectrogram of Z[bin, .]: Hann window of stft_window_len,
/// hop stft_hop, segments zero-padded to image_size points, fftshifted so the
/// zero-Doppler row sits at image_size/2. Columns are frames.
Eigen::MatrixXcd stft_at_bin(const RangeSlowTimeMap& map, Eigen::Index bin,
                             const RadarConfig& config);

/// Magnitude -> dB, clipped to [peak - dynamic_range_db, peak], normalized,
/// bilinearly resized to image_size x image_size and mapped through the fixed
/// five-anchor colormap. An all-zero input renders as the 0-anchor color.
MdsImage render_image(const Eigen::MatrixXcd& stft, const RadarConfig& config);

/// The pinned colormap: piecewise-linear between anchors at u = 0, .25, .5,
/// .75, 1 (dark blue, cyan, green, orange, dark red).
std::array<std::uint8_t, 3> colormap_value(double u);

/// Bilinear resize with corner alignment; exposed for the render tests.
Eigen::MatrixXd resize_bilinear(const Eigen::MatrixXd& in, Eigen::Index rows, Eigen::Index cols);

/// PPM plus a key=value sidecar (<stem>.txt) carrying label and meta.
void write_mds_image(const std::filesystem::path& ppm_path, const MdsImage& image);

}  // namespace mdradar
