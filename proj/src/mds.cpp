#include "mdradar/mds.hpp"

#include <cmath>
#include <stdexcept>

#include "mdradar/aspc.hpp"
#include "mdradar/dsp.hpp"
#include "mdradar/error.hpp"
#include "mdradar/io.hpp"
#include "mdradar/threading.hpp"

namespace mdradar {

PipelineKind pipeline_from_string(const std::string& name) {
  if (name == "conventional") return PipelineKind::Conventional;
  if (name == "proposed") return PipelineKind::Proposed;
  throw std::invalid_argument("unknown pipeline: " + name);
}

std::string to_string(PipelineKind kind) {
  return kind == PipelineKind::Conventional ? "conventional" : "proposed";
}

RangeSlowTimeMap build_map(const IqCube& cube, const RadarConfig& config, PipelineKind pipeline) {
  if (cube.samples_per_chirp() != config.samples_per_chirp)
    throw std::invalid_argument("build_map: cube fast-time length does not match config");

  const Eigen::Index n_slow = cube.chirp_count();
  const Eigen::VectorXd window = make_window(config.fast_time_window, config.samples_per_chirp);
  RangeSlowTimeMap map;
  map.pipeline = pipeline;
  map.data.resize(config.range_fft_len, n_slow);

  parallel_for(static_cast<std::size_t>(n_slow), [&](std::size_t mi) {
    const Eigen::Index m = static_cast<Eigen::Index>(mi);
    const Eigen::VectorXcd raw = cube.data.col(m);
    if (pipeline == PipelineKind::Proposed) {
      const SpcChirp chirp = process_chirp(raw, config);
      const Eigen::VectorXcd windowed =
          (window.array() * chirp.samples.array()).matrix().cast<std::complex<double>>();
      map.data.col(m) = fft_forward(windowed, config.range_fft_len);
    } else {
      const Eigen::VectorXcd corrected = correct_iq_imbalance(raw);
      map.data.col(m) = fft_forward(window.asDiagonal() * corrected, config.range_fft_len);
    }
  });
  return map;
}

RangeSlowTimeMap remove_dc(const RangeSlowTimeMap& map) {
  if (map.data.cols() < 2) throw std::invalid_argument("remove_dc: need at least 2 chirps");
  RangeSlowTimeMap out;
  out.pipeline = map.pipeline;
  out.data = map.data.colwise() - map.data.rowwise().mean();
  return out;
}

Eigen::Index select_target_bin(const RangeSlowTimeMap& map, Eigen::Index min_bin) {
  const Eigen::Index half = map.data.rows() / 2;
  if (min_bin < 1) min_bin = 1;
  if (min_bin >= half) throw std::invalid_argument("select_target_bin: empty search band");

  Eigen::Index best = -1;
  double best_energy = 0.0;
  for (Eigen::Index k = min_bin; k < half; ++k) {
    const double energy = map.data.row(k).squaredNorm();
    if (energy > best_energy) {
      best_energy = energy;
      best = k;
    }
  }
  if (best < 0) throw NumericError("select_target_bin: no energy in the interpretable band");
  return best;
}

Eigen::MatrixXcd stft_at_bin(const RangeSlowTimeMap& map, Eigen::Index bin,
                             const RadarConfig& config) {
  if (bin < 0 || bin >= map.data.rows())
    throw std::invalid_argument("stft_at_bin: bin out of range");
  const Eigen::Index n_slow = map.data.cols();
  const Eigen::Index win_len = config.stft_window_len;
  if (win_len > n_slow) throw std::invalid_argument("stft_at_bin: window longer than slow-time axis");
  const Eigen::Index nfft = config.image_size;

  const Eigen::VectorXd window = make_window(config.slow_time_window, win_len);
  const Eigen::VectorXcd series = map.data.row(bin);
  const Eigen::Index frames = (n_slow - win_len) / config.stft_hop + 1;
  Eigen::MatrixXcd out(nfft, frames);
  for (Eigen::Index f = 0; f < frames; ++f) {
    const Eigen::VectorXcd segment =
        window.asDiagonal() * series.segment(f * config.stft_hop, win_len);
    out.col(f) = fftshift(fft_forward(segment, nfft));
  }
  return out;
}

std::array<std::uint8_t, 3> colormap_value(double u) {
  // Anchors pinned so rendered images are reproducible bit for bit.
  static constexpr double anchors[5][3] = {
      {0, 0, 128},     // dark blue
      {0, 255, 255},   // cyan
      {0, 255, 0},     // green
      {255, 165, 0},   // orange
      {139, 0, 0},     // dark red
  };
  u = std::clamp(u, 0.0, 1.0);
  const double pos = u * 4.0;
  const int lo = std::min(3, static_cast<int>(pos));
  const double t = pos - lo;
  std::array<std::uint8_t, 3> rgb{};
  for (int c = 0; c < 3; ++c) {
    const double v = anchors[lo][c] + t * (anchors[lo + 1][c] - anchors[lo][c]);
    rgb[c] = static_cast<std::uint8_t>(std::lround(v));
  }
  return rgb;
}

Eigen::MatrixXd resize_bilinear(const Eigen::MatrixXd& in, Eigen::Index rows, Eigen::Index cols) {
  if (in.rows() == 0 || in.cols() == 0) throw std::invalid_argument("resize_bilinear: empty input");
  Eigen::MatrixXd out(rows, cols);
  const double row_scale =
      rows > 1 ? static_cast<double>(in.rows() - 1) / static_cast<double>(rows - 1) : 0.0;
  const double col_scale =
      cols > 1 ? static_cast<double>(in.cols() - 1) / static_cast<double>(cols - 1) : 0.0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    const double src_r = row_scale * static_cast<double>(r);
    const Eigen::Index r0 = std::min<Eigen::Index>(static_cast<Eigen::Index>(src_r), in.rows() - 1);
    const Eigen::Index r1 = std::min<Eigen::Index>(r0 + 1, in.rows() - 1);
    const double fr = src_r - static_cast<double>(r0);
    for (Eigen::Index c = 0; c < cols; ++c) {
      const double src_c = col_scale * static_cast<double>(c);
      const Eigen::Index c0 =
          std::min<Eigen::Index>(static_cast<Eigen::Index>(src_c), in.cols() - 1);
      const Eigen::Index c1 = std::min<Eigen::Index>(c0 + 1, in.cols() - 1);
      const double fc = src_c - static_cast<double>(c0);
      out(r, c) = (1 - fr) * ((1 - fc) * in(r0, c0) + fc * in(r0, c1)) +
                  fr * ((1 - fc) * in(r1, c0) + fc * in(r1, c1));
    }
  }
  return out;
}

MdsImage render_image(const Eigen::MatrixXcd& stft, const RadarConfig& config) {
  if (stft.rows() == 0 || stft.cols() == 0)
    throw std::invalid_argument("render_image: empty STFT");

  const Eigen::MatrixXd magnitude = stft.cwiseAbs();
  const double peak = magnitude.maxCoeff();
  Eigen::MatrixXd unit(stft.rows(), stft.cols());
  if (peak <= 0.0) {
    unit.setZero();  // peak pinned to a 0 dB floor: uniform lowest color
  } else {
    const double peak_db = amplitude_db(peak);
    const double floor_db = peak_db - config.dynamic_range_db;
    for (Eigen::Index r = 0; r < stft.rows(); ++r) {
      for (Eigen::Index c = 0; c < stft.cols(); ++c) {
        const double mag = magnitude(r, c);
        const double db = mag > 0.0 ? amplitude_db(mag) : floor_db;
        unit(r, c) = std::clamp((db - floor_db) / config.dynamic_range_db, 0.0, 1.0);
      }
    }
  }

  const Eigen::MatrixXd resized = resize_bilinear(unit, config.image_size, config.image_size);
  MdsImage image;
  image.size = config.image_size;
  image.pixels.resize(static_cast<std::size_t>(config.image_size) * config.image_size * 3);
  for (Eigen::Index r = 0; r < config.image_size; ++r) {
    // flip vertically: row 0 shows the most positive Doppler
    const Eigen::Index src_row = config.image_size - 1 - r;
    for (Eigen::Index c = 0; c < config.image_size; ++c) {
      const auto rgb = colormap_value(resized(src_row, c));
      const std::size_t base = 3 * static_cast<std::size_t>(r * config.image_size + c);
      image.pixels[base] = rgb[0];
      image.pixels[base + 1] = rgb[1];
      image.pixels[base + 2] = rgb[2];
    }
  }
  return image;
}

void write_mds_image(const std::filesystem::path& ppm_path, const MdsImage& image) {
  write_ppm(ppm_path, image.size, image.size, image.pixels);
  std::filesystem::path sidecar = ppm_path;
  sidecar.replace_extension(".txt");
  std::map<std::string, std::string> kv;
  kv["label"] = image.label;
  kv["pipeline"] = to_string(image.meta.pipeline);
  kv["seed"] = std::to_string(image.meta.seed);
  kv["target_bin"] = std::to_string(image.meta.target_bin);
  write_key_value_file(sidecar, kv);
}

}  // namespace mdradar
