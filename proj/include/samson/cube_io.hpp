#ifndef SAMSON_CUBE_IO_HPP
#define SAMSON_CUBE_IO_HPP

#include <filesystem>

#include "samson/image.hpp"

namespace samson {

// SAMSCUBE container, version 1. Little-endian throughout.
//
//   offset  size  field
//   0       8     magic "SAMSCUBE"
//   8       2     version (u16) = 1
//   10      4     width  (u32)
//   14      4     height (u32)
//   18      2     band_count (u16), 1..255
//   20      3*B   per-band records: wavelength_nm (u16), modality (u8)
//   ...           pixel payload: planar, band 0 first, each plane row-major
//                 32-bit floats
//   ...           optional metadata block: pair_count (u32), then per pair
//                 key_len (u32), key bytes, value_len (u32), value bytes
//
// The metadata block may be absent entirely; readers accept EOF right after
// the pixel payload.

inline constexpr char kCubeMagic[8] = {'S', 'A', 'M', 'S', 'C', 'U', 'B', 'E'};
inline constexpr std::uint16_t kCubeVersion = 1;

ImageCube read_cube(const std::filesystem::path& path);
void write_cube(const ImageCube& cube, const std::filesystem::path& path);

// Exact on-disk size in bytes for a cube with the given shape and metadata.
std::size_t cube_file_size(const ImageCube& cube);

} // namespace samson

#endif
