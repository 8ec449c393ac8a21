#include "mdradar/io.hpp"

#include <array>
#include <cstring>
#include <fstream>

#include "mdradar/error.hpp"

namespace mdradar {

namespace {

constexpr std::array<char, 7> kCubeMagic = {'M', 'D', 'S', 'I', 'Q', '1', '\0'};

void put_u32(std::ofstream& out, std::uint32_t v) {
  std::array<unsigned char, 4> b = {static_cast<unsigned char>(v & 0xff),
                                    static_cast<unsigned char>((v >> 8) & 0xff),
                                    static_cast<unsigned char>((v >> 16) & 0xff),
                                    static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(b.data()), 4);
}

std::uint32_t get_u32(std::ifstream& in) {
  std::array<unsigned char, 4> b{};
  in.read(reinterpret_cast<char*>(b.data()), 4);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

std::filesystem::path config_sidecar(const std::filesystem::path& path) {
  std::filesystem::path p = path;
  p += ".cfg";
  return p;
}

}  // namespace

void write_cube(const std::filesystem::path& path, const IqCube& cube) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out.write(kCubeMagic.data(), kCubeMagic.size());
  put_u32(out, static_cast<std::uint32_t>(cube.samples_per_chirp()));
  put_u32(out, static_cast<std::uint32_t>(cube.chirp_count()));
  std::vector<float> row(2 * cube.chirp_count());
  for (Eigen::Index n = 0; n < cube.samples_per_chirp(); ++n) {
    for (Eigen::Index m = 0; m < cube.chirp_count(); ++m) {
      row[2 * m] = static_cast<float>(cube.data(n, m).real());
      row[2 * m + 1] = static_cast<float>(cube.data(n, m).imag());
    }
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size() * sizeof(float)));
  }
  if (!out) throw FormatError("short write to " + path.string());
  cube.config.save(config_sidecar(path));
}

IqCube read_cube(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::array<char, 7> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kCubeMagic) throw FormatError(path.string() + ": bad cube magic");
  const std::uint32_t n_fast = get_u32(in);
  const std::uint32_t n_slow = get_u32(in);
  if (!in || n_fast == 0 || n_slow == 0) throw FormatError(path.string() + ": bad cube header");

  IqCube cube;
  cube.config = RadarConfig::load(config_sidecar(path));
  if (cube.config.samples_per_chirp != static_cast<Eigen::Index>(n_fast))
    throw FormatError(path.string() + ": header disagrees with config sidecar");
  cube.data.resize(n_fast, n_slow);
  std::vector<float> row(2 * static_cast<std::size_t>(n_slow));
  for (std::uint32_t n = 0; n < n_fast; ++n) {
    in.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(row.size() * sizeof(float)));
    if (!in) throw FormatError(path.string() + ": truncated cube payload");
    for (std::uint32_t m = 0; m < n_slow; ++m)
      cube.data(n, m) = {row[2 * m], row[2 * m + 1]};
  }
  return cube;
}

void write_ppm(const std::filesystem::path& path, Eigen::Index width, Eigen::Index height,
               const std::vector<std::uint8_t>& rgb) {
  if (rgb.size() != static_cast<std::size_t>(width * height * 3))
    throw std::invalid_argument("write_ppm: pixel buffer size mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out << "P6\n" << width << ' ' << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(rgb.data()), static_cast<std::streamsize>(rgb.size()));
  if (!out) throw FormatError("short write to " + path.string());
}

std::vector<std::uint8_t> read_ppm(const std::filesystem::path& path, Eigen::Index& width,
                                   Eigen::Index& height) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::string magic;
  long w = 0, h = 0, maxval = 0;
  in >> magic >> w >> h >> maxval;
  if (magic != "P6" || w <= 0 || h <= 0 || maxval != 255)
    throw FormatError(path.string() + ": unsupported PPM header");
  in.get();  // single whitespace after maxval
  std::vector<std::uint8_t> rgb(static_cast<std::size_t>(w) * h * 3);
  in.read(reinterpret_cast<char*>(rgb.data()), static_cast<std::streamsize>(rgb.size()));
  if (!in) throw FormatError(path.string() + ": truncated PPM payload");
  width = w;
  height = h;
  return rgb;
}

}  // namespace mdradar
