#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "mdradar/signal_model.hpp"

namespace mdradar {

/// Cube file: magic "MDSIQ1\0", u32 samples_per_chirp, u32 chirp count
/// (little endian), then float32 I,Q pairs in n-major order (n outermost).
/// The radar config is written next to it as <path>.cfg (key=value text).
void write_cube(const std::filesystem::path& path, const IqCube& cube);
IqCube read_cube(const std::filesystem::path& path);

/// Binary PPM (P6, maxval 255), pixels row-major (row, col, channel).
void write_ppm(const std::filesystem::path& path, Eigen::Index width, Eigen::Index height,
               const std::vector<std::uint8_t>& rgb);
std::vector<std::uint8_t> read_ppm(const std::filesystem::path& path, Eigen::Index& width,
                                   Eigen::Index& height);

}  // namespace mdradar
