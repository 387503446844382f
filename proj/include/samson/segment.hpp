#ifndef SAMSON_SEGMENT_HPP
#define SAMSON_SEGMENT_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "samson/image.hpp"

namespace samson {

enum class Connectivity { Four, Eight };

struct Histogram {
  int bin_count = 256;
  float min_value = 0.0f;
  float max_value = 0.0f;
  std::vector<std::uint64_t> counts;
  bool degenerate = false; // max == min: every pixel in one bin

  std::uint64_t total() const {
    std::uint64_t t = 0;
    for (std::uint64_t c : counts) t += c;
    return t;
  }
};

struct BinaryMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits; // 1 = foreground

  BinaryMask() = default;
  BinaryMask(int w, int h)
      : width(w), height(h), bits(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0) {}

  bool at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }
  void set(int x, int y, bool v) { bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }

  std::uint64_t foreground_count() const {
    std::uint64_t n = 0;
    for (std::uint8_t b : bits) n += b;
    return n;
  }
};

struct Point {
  int x = 0;
  int y = 0;
  bool operator==(const Point&) const = default;
};

// One 8- (or 4-) connected foreground region.
struct Blob {
  std::vector<Point> pixels; // scan order (y, then x)
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0; // tight bounding box, inclusive
  std::uint64_t area = 0;
  double centroid_x = 0.0;
  double centroid_y = 0.0;

  int box_width() const { return x1 - x0 + 1; }
  int box_height() const { return y1 - y0 + 1; }
};

struct SegmentationResult {
  float theta = 0.0f;
  BinaryMask mask;
  float source_min = 0.0f;
  float source_max = 0.0f;
  Histogram histogram;
  std::vector<Blob> blobs; // survivors of min-area filtering, ROI order
};

// Fixed-size multi-band crop around one blob; the classifier's input unit.
struct ROI {
  ImageCube crop;
  int blob_id = -1;
  std::optional<int> label;
};

struct SegmentParams {
  int bin_count = 256;
  std::uint64_t min_area = 20;
  int out_size = 64;
  Connectivity connectivity = Connectivity::Eight;
};

// Histogram over [min, max] of the image; bin b covers
// [min + b*w, min + (b+1)*w) with the last bin closed. A constant image puts
// every pixel in bin 0 and sets the degenerate flag.
Histogram compute_histogram(const Image2D& img, int bin_count);

// Threshold maximizing between-class variance, returned as the upper edge of
// the selected bin; ties break toward the smallest candidate. A degenerate
// histogram returns its constant value, which leaves the foreground empty
// under the strict comparison in binarize().
float otsu_threshold(const Histogram& hist);

// mask(x) = intensity(x) > theta, strictly.
BinaryMask binarize(const Image2D& img, float theta);

// Foreground partition into connected regions, ordered by bounding-box
// (y0, x0) with scan-order discovery as the tie-break.
std::vector<Blob> connected_components(const BinaryMask& mask, Connectivity connectivity);

std::vector<Blob> filter_blobs(const std::vector<Blob>& blobs, std::uint64_t min_area);

// Square window: blob box expanded to its longer side, centered on the box,
// zero-padded beyond image bounds; every band cropped over the same window
// and bilinearly resized to out_size x out_size.
ROI extract_roi(const ImageCube& cube, const Blob& blob, int out_size);

// Bilinear resample with half-pixel centers; identity when sizes match.
Image2D resize_bilinear(const Image2D& src, int out_width, int out_height);

std::pair<SegmentationResult, std::vector<ROI>> segment_cube(const ImageCube& cube,
                                                             const SegmentParams& params);

} // namespace samson

#endif
