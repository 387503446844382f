#include "samson/image.hpp"

#include <algorithm>
#include <cmath>

namespace samson {

bool is_known_wavelength(int wavelength_nm) {
  return std::find(kWavelengths.begin(), kWavelengths.end(), wavelength_nm) != kWavelengths.end();
}

Modality modality_for(int wavelength_nm) {
  for (int w : kFluorescenceWavelengths)
    if (w == wavelength_nm) return Modality::Fluorescence;
  for (int w : kAbsorptionWavelengths)
    if (w == wavelength_nm) return Modality::Absorption;
  throw UnknownBand("unknown wavelength " + std::to_string(wavelength_nm) + " nm");
}

Band canonical_band(int wavelength_nm) {
  return Band{wavelength_nm, modality_for(wavelength_nm)};
}

void validate(const Image2D& img) {
  if (img.width < 1 || img.height < 1)
    throw DimensionMismatch("image dimensions must be at least 1x1");
  if (img.pixels.size() != static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height))
    throw DimensionMismatch("pixel buffer size does not match width*height");
  for (float v : img.pixels)
    if (!std::isfinite(v)) throw NonFiniteData("image contains NaN or Inf");
}

void validate(const ImageCube& cube) {
  if (cube.bands.empty() || cube.bands.size() > 255)
    throw DimensionMismatch("cube must hold between 1 and 255 bands");
  int prev = -1;
  for (const auto& [b, img] : cube.bands) {
    if (!is_known_wavelength(b.wavelength_nm))
      throw UnknownBand("unknown wavelength " + std::to_string(b.wavelength_nm) + " nm");
    if (b.modality != modality_for(b.wavelength_nm))
      throw MalformedFile("modality does not match wavelength " + std::to_string(b.wavelength_nm));
    if (b.wavelength_nm <= prev)
      throw MalformedFile("bands must be in ascending wavelength order without duplicates");
    prev = b.wavelength_nm;
    validate(img);
    if (img.width != cube.width() || img.height != cube.height())
      throw DimensionMismatch("band planes differ in size");
  }
}

void validate_pipeline(const ImageCube& cube) {
  validate(cube);
  if (cube.bands.size() != kBandCount)
    throw DimensionMismatch("pipeline cube must hold exactly 9 bands, got " +
                            std::to_string(cube.bands.size()));
  for (int i = 0; i < kBandCount; ++i)
    if (cube.bands[i].first.wavelength_nm != kWavelengths[i])
      throw MalformedFile("pipeline cube band order is not canonical");
}

bool has_band(const ImageCube& cube, int wavelength_nm) {
  for (const auto& [b, img] : cube.bands)
    if (b.wavelength_nm == wavelength_nm) return true;
  return false;
}

const Image2D& band(const ImageCube& cube, int wavelength_nm) {
  for (const auto& [b, img] : cube.bands)
    if (b.wavelength_nm == wavelength_nm) return img;
  throw UnknownBand("cube has no band at " + std::to_string(wavelength_nm) + " nm");
}

Image2D& band(ImageCube& cube, int wavelength_nm) {
  for (auto& [b, img] : cube.bands)
    if (b.wavelength_nm == wavelength_nm) return img;
  throw UnknownBand("cube has no band at " + std::to_string(wavelength_nm) + " nm");
}

Image2D composite_absorption(const ImageCube& cube) {
  validate_pipeline(cube);
  Image2D out(cube.width(), cube.height(), 0.0f);
  for (int w : kAbsorptionWavelengths) {
    const Image2D& plane = band(cube, w);
    for (std::size_t i = 0; i < out.pixels.size(); ++i) out.pixels[i] += plane.pixels[i];
  }
  const float inv = 1.0f / static_cast<float>(kAbsorptionCount);
  for (float& v : out.pixels) v *= inv;
  return out;
}

ImageCube make_pipeline_cube(int width, int height, float fill) {
  ImageCube cube;
  cube.bands.reserve(kBandCount);
  for (int w : kWavelengths) cube.bands.emplace_back(canonical_band(w), Image2D(width, height, fill));
  return cube;
}

} // namespace samson
