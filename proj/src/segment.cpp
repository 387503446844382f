#include "samson/segment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace samson {

Histogram compute_histogram(const Image2D& img, int bin_count) {
  if (bin_count < 2) throw ConfigError("histogram needs at least 2 bins");
  validate(img);

  Histogram h;
  h.bin_count = bin_count;
  h.counts.assign(static_cast<std::size_t>(bin_count), 0);

  float lo = img.pixels[0], hi = img.pixels[0];
  for (float v : img.pixels) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  h.min_value = lo;
  h.max_value = hi;

  if (lo == hi) {
    h.degenerate = true;
    h.counts[0] = img.pixel_count();
    return h;
  }

  const double width = (static_cast<double>(hi) - lo) / bin_count;
  for (float v : img.pixels) {
    int idx = static_cast<int>((static_cast<double>(v) - lo) / width);
    idx = std::clamp(idx, 0, bin_count - 1); // v == max falls into the closed last bin
    ++h.counts[static_cast<std::size_t>(idx)];
  }
  return h;
}

float otsu_threshold(const Histogram& hist) {
  const std::uint64_t total = hist.total();
  if (total == 0) throw EmptyHistogram("histogram has no samples");
  if (hist.degenerate) return hist.min_value;

  // Weighted sums over bin indices; the maximizer is unchanged by the affine
  // map from bin index to intensity. sigma_b^2(t) is proportional to
  // (s0*n1 - s1*n0)^2 / (n0*n1), evaluated from exact integer tallies.
  std::int64_t total_s = 0;
  for (int i = 0; i < hist.bin_count; ++i)
    total_s += static_cast<std::int64_t>(hist.counts[static_cast<std::size_t>(i)]) * i;

  double best_sigma = -1.0;
  int best_t = -1;
  std::int64_t n0 = 0, s0 = 0;
  for (int t = 0; t + 1 < hist.bin_count; ++t) {
    n0 += static_cast<std::int64_t>(hist.counts[static_cast<std::size_t>(t)]);
    s0 += static_cast<std::int64_t>(hist.counts[static_cast<std::size_t>(t)]) * t;
    const std::int64_t n1 = static_cast<std::int64_t>(total) - n0;
    if (n0 == 0 || n1 == 0) continue;
    const std::int64_t s1 = total_s - s0;
    const double diff = static_cast<double>(s0 * n1 - s1 * n0);
    const double sigma = diff * diff / (static_cast<double>(n0) * static_cast<double>(n1));
    if (sigma > best_sigma) {
      best_sigma = sigma;
      best_t = t;
    }
  }

  if (best_t < 0 || best_sigma <= 0.0) {
    // Single populated bin: no split carries any variance, keep the
    // foreground empty.
    return hist.max_value;
  }

  const double width = (static_cast<double>(hist.max_value) - hist.min_value) / hist.bin_count;
  return static_cast<float>(hist.min_value + width * (best_t + 1));
}

BinaryMask binarize(const Image2D& img, float theta) {
  validate(img);
  BinaryMask mask(img.width, img.height);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) mask.bits[i] = img.pixels[i] > theta ? 1 : 0;
  return mask;
}

std::vector<Blob> connected_components(const BinaryMask& mask, Connectivity connectivity) {
  const int w = mask.width, h = mask.height;
  std::vector<std::int32_t> label(static_cast<std::size_t>(w) * h, -1);
  std::vector<Blob> blobs;
  std::vector<Point> stack;

  const int dx8[8] = {-1, 0, 1, -1, 1, -1, 0, 1};
  const int dy8[8] = {-1, -1, -1, 0, 0, 1, 1, 1};
  const int dx4[4] = {0, -1, 1, 0};
  const int dy4[4] = {-1, 0, 0, 1};
  const int* dx = connectivity == Connectivity::Eight ? dx8 : dx4;
  const int* dy = connectivity == Connectivity::Eight ? dy8 : dy4;
  const int ndirs = connectivity == Connectivity::Eight ? 8 : 4;

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t idx = static_cast<std::size_t>(y) * w + x;
      if (!mask.bits[idx] || label[idx] >= 0) continue;

      const std::int32_t id = static_cast<std::int32_t>(blobs.size());
      Blob blob;
      blob.x0 = blob.x1 = x;
      blob.y0 = blob.y1 = y;
      stack.clear();
      stack.push_back({x, y});
      label[idx] = id;
      while (!stack.empty()) {
        const Point p = stack.back();
        stack.pop_back();
        blob.pixels.push_back(p);
        blob.x0 = std::min(blob.x0, p.x);
        blob.x1 = std::max(blob.x1, p.x);
        blob.y0 = std::min(blob.y0, p.y);
        blob.y1 = std::max(blob.y1, p.y);
        for (int d = 0; d < ndirs; ++d) {
          const int nx = p.x + dx[d], ny = p.y + dy[d];
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          const std::size_t nidx = static_cast<std::size_t>(ny) * w + nx;
          if (!mask.bits[nidx] || label[nidx] >= 0) continue;
          label[nidx] = id;
          stack.push_back({nx, ny});
        }
      }

      std::sort(blob.pixels.begin(), blob.pixels.end(), [](const Point& a, const Point& b) {
        return a.y != b.y ? a.y < b.y : a.x < b.x;
      });
      blob.area = blob.pixels.size();
      double sx = 0.0, sy = 0.0;
      for (const Point& p : blob.pixels) {
        sx += p.x;
        sy += p.y;
      }
      blob.centroid_x = sx / static_cast<double>(blob.area);
      blob.centroid_y = sy / static_cast<double>(blob.area);
      blobs.push_back(std::move(blob));
    }
  }

  // Discovery order is scan order of the first pixel; re-order by bounding
  // box origin as the external contract requires, keeping discovery order as
  // the tie-break.
  std::stable_sort(blobs.begin(), blobs.end(), [](const Blob& a, const Blob& b) {
    return a.y0 != b.y0 ? a.y0 < b.y0 : a.x0 < b.x0;
  });
  return blobs;
}

std::vector<Blob> filter_blobs(const std::vector<Blob>& blobs, std::uint64_t min_area) {
  if (min_area < 1) throw ConfigError("min_area must be at least 1");
  std::vector<Blob> kept;
  for (const Blob& b : blobs)
    if (b.area >= min_area) kept.push_back(b);
  return kept;
}

Image2D resize_bilinear(const Image2D& src, int out_width, int out_height) {
  Image2D out(out_width, out_height);
  const double sx = static_cast<double>(src.width) / out_width;
  const double sy = static_cast<double>(src.height) / out_height;
  for (int oy = 0; oy < out_height; ++oy) {
    double fy = (oy + 0.5) * sy - 0.5;
    fy = std::clamp(fy, 0.0, static_cast<double>(src.height - 1));
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, src.height - 1);
    const double wy = fy - y0;
    for (int ox = 0; ox < out_width; ++ox) {
      double fx = (ox + 0.5) * sx - 0.5;
      fx = std::clamp(fx, 0.0, static_cast<double>(src.width - 1));
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, src.width - 1);
      const double wx = fx - x0;
      const double top = (1.0 - wx) * src.at(x0, y0) + wx * src.at(x1, y0);
      const double bot = (1.0 - wx) * src.at(x0, y1) + wx * src.at(x1, y1);
      out.at(ox, oy) = static_cast<float>((1.0 - wy) * top + wy * bot);
    }
  }
  return out;
}

ROI extract_roi(const ImageCube& cube, const Blob& blob, int out_size) {
  if (out_size < 1) throw ConfigError("out_size must be at least 1");
  const int bw = blob.box_width();
  const int bh = blob.box_height();
  const int side = std::max(bw, bh);
  const int wx0 = blob.x0 - (side - bw) / 2;
  const int wy0 = blob.y0 - (side - bh) / 2;

  ROI roi;
  roi.crop.bands.reserve(cube.bands.size());
  for (const auto& [b, img] : cube.bands) {
    Image2D window(side, side, 0.0f);
    for (int y = 0; y < side; ++y) {
      const int sy = wy0 + y;
      if (sy < 0 || sy >= img.height) continue;
      for (int x = 0; x < side; ++x) {
        const int sx = wx0 + x;
        if (sx < 0 || sx >= img.width) continue;
        window.at(x, y) = img.at(sx, sy);
      }
    }
    roi.crop.bands.emplace_back(b, side == out_size ? std::move(window)
                                                    : resize_bilinear(window, out_size, out_size));
  }
  return roi;
}

std::pair<SegmentationResult, std::vector<ROI>> segment_cube(const ImageCube& cube,
                                                             const SegmentParams& params) {
  validate_pipeline(cube);

  const Image2D composite = composite_absorption(cube);
  SegmentationResult result;
  result.histogram = compute_histogram(composite, params.bin_count);
  result.source_min = result.histogram.min_value;
  result.source_max = result.histogram.max_value;
  result.theta = otsu_threshold(result.histogram);
  result.mask = binarize(composite, result.theta);

  result.blobs = filter_blobs(connected_components(result.mask, params.connectivity),
                              params.min_area);

  std::vector<ROI> rois;
  rois.reserve(result.blobs.size());
  for (std::size_t i = 0; i < result.blobs.size(); ++i) {
    ROI roi = extract_roi(cube, result.blobs[i], params.out_size);
    roi.blob_id = static_cast<int>(i);
    rois.push_back(std::move(roi));
  }
  return {std::move(result), std::move(rois)};
}

} // namespace samson
