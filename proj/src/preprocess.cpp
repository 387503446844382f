#include "samson/preprocess.hpp"

#include <algorithm>

namespace samson {

void validate(const CalibrationSet& cal, int width, int height) {
  if (!(cal.epsilon > 0.0f)) throw ConfigError("calibration epsilon must be positive");
  for (int w : kWavelengths) {
    auto it = cal.dark.find(w);
    if (it == cal.dark.end())
      throw MissingCalibration("missing dark frame for " + std::to_string(w) + " nm");
    if (it->second.width != width || it->second.height != height)
      throw DimensionMismatch("dark frame size mismatch at " + std::to_string(w) + " nm");
  }
  for (int w : kAbsorptionWavelengths) {
    auto it = cal.flat.find(w);
    if (it == cal.flat.end())
      throw MissingCalibration("missing flat frame for " + std::to_string(w) + " nm");
    if (it->second.width != width || it->second.height != height)
      throw DimensionMismatch("flat frame size mismatch at " + std::to_string(w) + " nm");
  }
}

Image2D flat_field_correct(const Image2D& raw, const Image2D& dark, const Image2D& flat,
                           float epsilon) {
  if (raw.width != dark.width || raw.height != dark.height || raw.width != flat.width ||
      raw.height != flat.height)
    throw DimensionMismatch("flat_field_correct: image sizes differ");
  if (!(epsilon > 0.0f)) throw ConfigError("epsilon must be positive");

  Image2D out(raw.width, raw.height);
  for (std::size_t i = 0; i < out.pixels.size(); ++i) {
    const float num = std::max(raw.pixels[i] - dark.pixels[i], 0.0f);
    const float den = std::max(flat.pixels[i] - dark.pixels[i], epsilon);
    out.pixels[i] = num / den;
  }
  return out;
}

ImageCube correct_cube(const ImageCube& raw, const CalibrationSet& cal) {
  validate_pipeline(raw);
  validate(cal, raw.width(), raw.height());

  ImageCube out;
  out.meta = raw.meta;
  out.bands.reserve(raw.bands.size());
  for (const auto& [b, img] : raw.bands) {
    const Image2D& dark = cal.dark.at(b.wavelength_nm);
    if (b.modality == Modality::Absorption) {
      out.bands.emplace_back(b, flat_field_correct(img, dark, cal.flat.at(b.wavelength_nm),
                                                   cal.epsilon));
    } else {
      Image2D plane(img.width, img.height);
      for (std::size_t i = 0; i < plane.pixels.size(); ++i)
        plane.pixels[i] = std::max(img.pixels[i] - dark.pixels[i], 0.0f);
      out.bands.emplace_back(b, std::move(plane));
    }
  }
  return out;
}

} // namespace samson
