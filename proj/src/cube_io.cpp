#include "samson/cube_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <vector>

namespace samson {

namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

void put_f32(std::vector<std::uint8_t>& out, float v) {
  put_u32(out, std::bit_cast<std::uint32_t>(v));
}

class Reader {
public:
  explicit Reader(const std::filesystem::path& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw IoFailure("cannot open " + path.string());
  }

  void read_exact(void* dst, std::size_t n) {
    in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n)
      throw MalformedFile("truncated file " + path_.string());
  }

  std::uint16_t u16() {
    std::uint8_t b[2];
    read_exact(b, 2);
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
  }

  std::uint32_t u32() {
    std::uint8_t b[4];
    read_exact(b, 4);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
  }

  std::uint8_t u8() {
    std::uint8_t b;
    read_exact(&b, 1);
    return b;
  }

  bool at_eof() {
    in_.peek();
    return in_.eof();
  }

private:
  std::filesystem::path path_;
  std::ifstream in_;
};

} // namespace

std::size_t cube_file_size(const ImageCube& cube) {
  std::size_t size = 8 + 2 + 4 + 4 + 2 + 3 * cube.bands.size();
  size += 4ull * cube.bands.size() * cube.width() * cube.height();
  if (!cube.meta.empty()) {
    size += 4;
    for (const auto& [k, v] : cube.meta) size += 8 + k.size() + v.size();
  }
  return size;
}

void write_cube(const ImageCube& cube, const std::filesystem::path& path) {
  validate(cube);

  std::vector<std::uint8_t> buf;
  buf.reserve(cube_file_size(cube));
  buf.insert(buf.end(), kCubeMagic, kCubeMagic + 8);
  put_u16(buf, kCubeVersion);
  put_u32(buf, static_cast<std::uint32_t>(cube.width()));
  put_u32(buf, static_cast<std::uint32_t>(cube.height()));
  put_u16(buf, static_cast<std::uint16_t>(cube.bands.size()));
  for (const auto& [b, img] : cube.bands) {
    put_u16(buf, static_cast<std::uint16_t>(b.wavelength_nm));
    buf.push_back(static_cast<std::uint8_t>(b.modality));
  }
  for (const auto& [b, img] : cube.bands)
    for (float v : img.pixels) put_f32(buf, v);
  if (!cube.meta.empty()) {
    put_u32(buf, static_cast<std::uint32_t>(cube.meta.size()));
    for (const auto& [k, v] : cube.meta) {
      put_u32(buf, static_cast<std::uint32_t>(k.size()));
      buf.insert(buf.end(), k.begin(), k.end());
      put_u32(buf, static_cast<std::uint32_t>(v.size()));
      buf.insert(buf.end(), v.begin(), v.end());
    }
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoFailure("write failed for " + path.string());
}

ImageCube read_cube(const std::filesystem::path& path) {
  Reader in(path);

  char magic[8];
  in.read_exact(magic, 8);
  if (std::memcmp(magic, kCubeMagic, 8) != 0)
    throw MalformedFile("bad magic in " + path.string());
  const std::uint16_t version = in.u16();
  if (version != kCubeVersion)
    throw MalformedFile("unsupported version " + std::to_string(version) + " in " + path.string());

  const std::uint32_t width = in.u32();
  const std::uint32_t height = in.u32();
  const std::uint16_t band_count = in.u16();
  if (width == 0 || height == 0)
    throw DimensionMismatch("zero dimensions in " + path.string());
  if (band_count == 0 || band_count > 255)
    throw MalformedFile("band count " + std::to_string(band_count) + " out of range in " +
                        path.string());

  ImageCube cube;
  cube.bands.reserve(band_count);
  for (int i = 0; i < band_count; ++i) {
    Band b;
    b.wavelength_nm = in.u16();
    b.modality = static_cast<Modality>(in.u8());
    cube.bands.emplace_back(b, Image2D());
  }

  const std::size_t plane_pixels = static_cast<std::size_t>(width) * height;
  std::vector<std::uint8_t> raw(plane_pixels * 4);
  for (auto& [b, img] : cube.bands) {
    img.width = static_cast<int>(width);
    img.height = static_cast<int>(height);
    img.pixels.resize(plane_pixels);
    in.read_exact(raw.data(), raw.size());
    for (std::size_t i = 0; i < plane_pixels; ++i) {
      const std::uint32_t bits = static_cast<std::uint32_t>(raw[4 * i]) |
                                 (static_cast<std::uint32_t>(raw[4 * i + 1]) << 8) |
                                 (static_cast<std::uint32_t>(raw[4 * i + 2]) << 16) |
                                 (static_cast<std::uint32_t>(raw[4 * i + 3]) << 24);
      const float v = std::bit_cast<float>(bits);
      if (!std::isfinite(v)) throw NonFiniteData("NaN/Inf pixel in " + path.string());
      img.pixels[i] = v;
    }
  }

  if (!in.at_eof()) {
    const std::uint32_t pairs = in.u32();
    for (std::uint32_t i = 0; i < pairs; ++i) {
      std::string key(in.u32(), '\0');
      in.read_exact(key.data(), key.size());
      std::string value(in.u32(), '\0');
      in.read_exact(value.data(), value.size());
      cube.meta.emplace(std::move(key), std::move(value));
    }
    if (!in.at_eof()) throw MalformedFile("trailing bytes after metadata in " + path.string());
  }

  validate(cube);
  return cube;
}

} // namespace samson
