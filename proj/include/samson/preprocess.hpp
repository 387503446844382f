#ifndef SAMSON_PREPROCESS_HPP
#define SAMSON_PREPROCESS_HPP

#include <map>

#include "samson/image.hpp"

namespace samson {

// Reference frames for flat-field correction: a dark frame per band and a
// flat (illumination-only) frame per absorption band. Fluorescence bands have
// no physically meaningful flat frame, the sample itself is the emitter.
struct CalibrationSet {
  std::map<int, Image2D> dark;
  std::map<int, Image2D> flat;
  float epsilon = 1e-6f;
};

// Throws MissingCalibration / DimensionMismatch when the set cannot correct
// a (width x height) pipeline cube.
void validate(const CalibrationSet& cal, int width, int height);

// Per-pixel (raw - dark) / max(flat - dark, epsilon), with negative
// numerators clamped to zero. Output is finite and non-negative for any
// finite input.
Image2D flat_field_correct(const Image2D& raw, const Image2D& dark, const Image2D& flat,
                           float epsilon);

// Applies flat-field correction to every absorption band and dark
// subtraction (clamped at zero) to the fluorescence bands. Band order and
// dimensions are preserved.
ImageCube correct_cube(const ImageCube& raw, const CalibrationSet& cal);

} // namespace samson

#endif
