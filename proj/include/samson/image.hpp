#ifndef SAMSON_IMAGE_HPP
#define SAMSON_IMAGE_HPP

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "samson/errors.hpp"

namespace samson {

enum class Modality : std::uint8_t { Fluorescence = 0, Absorption = 1 };

// One illumination band of the instrument: two UV fluorescence LEDs and
// seven absorption LEDs.
struct Band {
  int wavelength_nm = 0;
  Modality modality = Modality::Absorption;

  bool operator==(const Band&) const = default;
};

inline constexpr int kBandCount = 9;
inline constexpr int kFluorescenceCount = 2;
inline constexpr int kAbsorptionCount = 7;

// Canonical band order: ascending wavelength.
inline constexpr std::array<int, kBandCount> kWavelengths = {385, 405, 465, 500, 520,
                                                             595, 620, 635, 660};
inline constexpr std::array<int, kFluorescenceCount> kFluorescenceWavelengths = {385, 405};
inline constexpr std::array<int, kAbsorptionCount> kAbsorptionWavelengths = {465, 500, 520, 595,
                                                                             620, 635, 660};

// Modality is determined by wavelength; throws UnknownBand for wavelengths
// outside the LED set.
Modality modality_for(int wavelength_nm);
Band canonical_band(int wavelength_nm);
bool is_known_wavelength(int wavelength_nm);

// Single-band intensity image, row-major 32-bit floats.
struct Image2D {
  int width = 0;
  int height = 0;
  std::vector<float> pixels;

  Image2D() = default;
  Image2D(int w, int h, float fill = 0.0f)
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}

  float& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  float at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::size_t pixel_count() const { return pixels.size(); }

  bool operator==(const Image2D&) const = default;
};

// Throws DimensionMismatch / NonFiniteData when the image is inconsistent.
void validate(const Image2D& img);

// A registered stack of single-band images for one field of view. Pipeline
// cubes carry all nine bands in canonical order; calibration frames reuse the
// same type with a single band.
struct ImageCube {
  std::vector<std::pair<Band, Image2D>> bands;
  std::map<std::string, std::string> meta;

  int width() const { return bands.empty() ? 0 : bands.front().second.width; }
  int height() const { return bands.empty() ? 0 : bands.front().second.height; }

  bool operator==(const ImageCube&) const = default;
};

// Structural checks shared by every cube: 1-255 bands, strictly ascending
// known wavelengths with matching modality, equal dimensions, finite data.
void validate(const ImageCube& cube);

// Additionally requires the full nine-band canonical stack.
void validate_pipeline(const ImageCube& cube);

// Plane lookup by wavelength; throws UnknownBand when absent.
const Image2D& band(const ImageCube& cube, int wavelength_nm);
Image2D& band(ImageCube& cube, int wavelength_nm);
bool has_band(const ImageCube& cube, int wavelength_nm);

// Pixelwise mean of the seven absorption planes; segmentation input.
Image2D composite_absorption(const ImageCube& cube);

// Nine-band cube of constant fill value, canonical order.
ImageCube make_pipeline_cube(int width, int height, float fill = 0.0f);

} // namespace samson

#endif
