#include "samson/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "samson/cube_io.hpp"

namespace samson {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Disc {
  double x, y, r;
};

struct Segment {
  double x0, y0, x1, y1, half_thickness;
};

double point_segment_dist(double px, double py, const Segment& s) {
  const double dx = s.x1 - s.x0, dy = s.y1 - s.y0;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0.0 ? ((px - s.x0) * dx + (py - s.y0) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double cx = s.x0 + t * dx, cy = s.y0 + t * dy;
  return std::hypot(px - cx, py - cy);
}

// Geometry of one organism in its local (rotated) frame, drawn entirely
// before rasterization so the rng stream does not depend on the raster grid.
struct Shape {
  Morphology morphology;
  std::vector<Disc> discs;            // colony cells
  std::vector<Segment> segments;      // filaments and spines
  std::vector<std::array<double, 3>> ellipses; // center v, semi u, semi v (u-centered at 0)
  double crescent_radius = 0.0, crescent_span = 0.0, crescent_thickness = 0.0,
         crescent_shift = 0.0;
  double pose = 0.0;  // grid->local rotation
  double extent = 0.0; // conservative half-size bound

  bool contains(double gx, double gy) const {
    const double c = std::cos(pose), s = std::sin(pose);
    const double u = c * gx + s * gy;
    const double v = -s * gx + c * gy;
    for (const Disc& d : discs)
      if ((u - d.x) * (u - d.x) + (v - d.y) * (v - d.y) <= d.r * d.r) return true;
    for (const Segment& sg : segments)
      if (point_segment_dist(u, v, sg) <= sg.half_thickness) return true;
    for (const auto& e : ellipses) {
      const double eu = u / e[1];
      const double ev = (v - e[0]) / e[2];
      if (eu * eu + ev * ev <= 1.0) return true;
    }
    if (crescent_radius > 0.0) {
      const double vv = v + crescent_shift;
      const double r = std::hypot(u, vv);
      if (std::abs(r - crescent_radius) <= crescent_thickness * 0.5 &&
          std::abs(std::atan2(u, vv)) <= crescent_span)
        return true;
    }
    return false;
  }
};

void add_cluster(Shape& shape, double size, double semi_minor_ratio) {
  const double a = size * kClusterSemiMajor;
  const double b = size * semi_minor_ratio;
  const double d = kClusterSpacing * b;
  for (int i = 0; i < static_cast<int>(kClusterCells); ++i) {
    const double vc = (i - (kClusterCells - 1.0) / 2.0) * d;
    shape.ellipses.push_back({vc, a, b});
    shape.extent = std::max(shape.extent, std::abs(vc) + std::max(a, b));
  }
}

void add_walk(Shape& shape, Rng& rng, double length, double thickness, double wiggle) {
  const int nseg = 6;
  const double step = length / nseg;
  double heading = 0.0; // pose already randomizes the global direction
  std::vector<std::array<double, 2>> pts{{0.0, 0.0}};
  for (int i = 0; i < nseg; ++i) {
    if (i > 0) heading += rng.normal(0.0, wiggle);
    const auto& p = pts.back();
    pts.push_back({p[0] + step * std::cos(heading), p[1] + step * std::sin(heading)});
  }
  double cx = 0.0, cy = 0.0;
  double lo_x = pts[0][0], hi_x = pts[0][0], lo_y = pts[0][1], hi_y = pts[0][1];
  for (const auto& p : pts) {
    lo_x = std::min(lo_x, p[0]);
    hi_x = std::max(hi_x, p[0]);
    lo_y = std::min(lo_y, p[1]);
    hi_y = std::max(hi_y, p[1]);
  }
  cx = (lo_x + hi_x) / 2.0;
  cy = (lo_y + hi_y) / 2.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    shape.segments.push_back({pts[i][0] - cx, pts[i][1] - cy, pts[i + 1][0] - cx,
                              pts[i + 1][1] - cy, thickness * 0.5});
  }
  for (const auto& p : pts)
    shape.extent = std::max(shape.extent,
                            std::max(std::abs(p[0] - cx), std::abs(p[1] - cy)) + thickness);
}

Shape draw_shape(const ClassSpec& spec, Rng& rng) {
  Shape shape;
  shape.morphology = spec.morphology;
  const double size = rng.uniform(spec.size_min, spec.size_max);
  shape.pose = rng.uniform(0.0, 2.0 * kPi);

  switch (spec.morphology) {
    case Morphology::ColonyOfSmallSpheres: {
      const int cells = static_cast<int>(rng.uniform_int(10, 22));
      shape.discs.push_back({0.0, 0.0, rng.uniform(0.085, 0.14) * size});
      for (int i = 1; i < cells; ++i) {
        const Disc anchor = shape.discs[static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<std::int64_t>(shape.discs.size()) - 1))];
        const double r = rng.uniform(0.085, 0.14) * size;
        const double ang = rng.uniform(0.0, 2.0 * kPi);
        const double dist = (anchor.r + r) * rng.uniform(0.5, 0.75); // overlap keeps the chain connected
        shape.discs.push_back({anchor.x + dist * std::cos(ang), anchor.y + dist * std::sin(ang), r});
      }
      for (const Disc& d : shape.discs)
        shape.extent = std::max(shape.extent, std::hypot(d.x, d.y) + d.r);
      break;
    }
    case Morphology::ThickFilament:
      add_walk(shape, rng, size, rng.uniform(3.5, 5.5), 0.40);
      break;
    case Morphology::ThinFilament:
      add_walk(shape, rng, size, rng.uniform(1.4, 2.2), 0.55);
      break;
    case Morphology::EllipsoidCluster4:
      add_cluster(shape, size, kClusterSemiMinor);
      break;
    case Morphology::SpinyEllipsoidCluster: {
      add_cluster(shape, size, 1.0 / 5.5);
      const double a = size * kClusterSemiMajor;
      const double b = size / 5.5;
      const double vc = (kClusterCells - 1.0) / 2.0 * kClusterSpacing * b;
      const double len = rng.uniform(0.4, 0.6) * size;
      const double beta = rng.uniform(0.3, 0.7);
      for (int corner = 0; corner < 4; ++corner) {
        const double su = (corner & 1) ? a * 0.9 : -a * 0.9;
        const double sv = (corner & 2) ? vc : -vc;
        const double du = su > 0 ? std::cos(beta) : -std::cos(beta);
        const double dv = sv > 0 ? std::sin(beta) : -std::sin(beta);
        shape.segments.push_back({su, sv, su + len * du, sv + len * dv, 0.7});
        shape.extent = std::max(shape.extent, std::hypot(su + len * du, sv + len * dv) + 1.0);
      }
      break;
    }
    case Morphology::NeedleCrescent: {
      shape.crescent_radius = 0.75 * size;
      shape.crescent_span = rng.uniform(0.6, 0.95);
      shape.crescent_thickness = rng.uniform(1.6, 2.6);
      shape.crescent_shift = shape.crescent_radius * (1.0 + std::cos(shape.crescent_span)) / 2.0;
      shape.extent = shape.crescent_radius + shape.crescent_thickness;
      break;
    }
  }
  shape.extent += 1.5;
  return shape;
}

// Keeps only the largest 8-connected region of the raster mask, so every
// organism segments as exactly one blob.
void keep_largest_component(std::vector<std::uint8_t>& mask, int w, int h) {
  BinaryMask bm;
  bm.width = w;
  bm.height = h;
  bm.bits = mask;
  std::vector<Blob> parts = connected_components(bm, Connectivity::Eight);
  if (parts.size() <= 1) return;
  std::size_t best = 0;
  for (std::size_t i = 1; i < parts.size(); ++i)
    if (parts[i].area > parts[best].area) best = i;
  std::fill(mask.begin(), mask.end(), 0);
  for (const Point& p : parts[best].pixels) mask[static_cast<std::size_t>(p.y) * w + p.x] = 1;
}

std::string format_double(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

} // namespace

std::vector<ClassSpec> default_class_specs() {
  // Band order: 385F, 405F, 465, 500, 520, 595, 620, 635, 660.
  // Cyanophyta-like classes carry phycobilin-flavored absorption (strong in
  // the red bands) and weak UV fluorescence; chlorophyta-like classes the
  // reverse, as observed on the instrument.
  std::vector<ClassSpec> specs(6);
  specs[0] = {0, "CPCC300_Microcystis", Morphology::ColonyOfSmallSpheres,
              {0.06f, 0.08f, 0.45f, 0.40f, 0.38f, 0.55f, 0.72f, 0.70f, 0.66f}, 0.04f, 18.0f, 36.0f};
  specs[1] = {1, "CPCC067_Anabaena", Morphology::ThickFilament,
              {0.08f, 0.10f, 0.50f, 0.42f, 0.40f, 0.60f, 0.75f, 0.72f, 0.62f}, 0.04f, 26.0f, 48.0f};
  specs[2] = {2, "CPCC471_Pseudanabaena", Morphology::ThinFilament,
              {0.05f, 0.07f, 0.42f, 0.38f, 0.36f, 0.52f, 0.68f, 0.66f, 0.58f}, 0.04f, 24.0f, 48.0f};
  specs[3] = {3, "CPCC005_ScObliquus", Morphology::EllipsoidCluster4,
              {0.55f, 0.62f, 0.70f, 0.60f, 0.48f, 0.40f, 0.50f, 0.55f, 0.72f}, 0.04f, 14.0f, 26.0f};
  specs[4] = {4, "CPCC158_ScQuadricauda", Morphology::SpinyEllipsoidCluster,
              {0.60f, 0.66f, 0.74f, 0.64f, 0.52f, 0.44f, 0.54f, 0.58f, 0.75f}, 0.04f, 14.0f, 26.0f};
  specs[5] = {5, "CPCC366_Ankistrodesmus", Morphology::NeedleCrescent,
              {0.52f, 0.58f, 0.66f, 0.56f, 0.44f, 0.38f, 0.46f, 0.50f, 0.68f}, 0.04f, 22.0f, 40.0f};
  return specs;
}

void validate(const std::vector<ClassSpec>& specs) {
  if (specs.empty()) throw ConfigError("no class specs");
  for (const ClassSpec& s : specs)
    for (float v : s.spectral_signature)
      if (v < 0.0f || v > 1.0f) throw ConfigError("signature mean outside [0,1] in " + s.name);
  float cyan_max = 0.0f, chloro_min = 1.0f;
  bool any_cyan = false, any_chloro = false;
  for (const ClassSpec& s : specs) {
    for (int fb = 0; fb < kFluorescenceCount; ++fb) {
      const float v = s.spectral_signature[static_cast<std::size_t>(fb)];
      if (s.class_id <= 2) {
        cyan_max = std::max(cyan_max, v);
        any_cyan = true;
      } else {
        chloro_min = std::min(chloro_min, v);
        any_chloro = true;
      }
    }
  }
  if (any_cyan && any_chloro && !(cyan_max < chloro_min))
    throw ConfigError("fluorescence signatures must separate phyla: classes 0-2 below 3-5");
}

RenderedOrganism render_organism(const ClassSpec& spec, Rng& rng, float noise_sigma) {
  const Shape shape = draw_shape(spec, rng);

  const int half = static_cast<int>(std::ceil(shape.extent)) + 1;
  const int grid = 2 * half + 1;
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(grid) * grid, 0);
  for (int y = 0; y < grid; ++y)
    for (int x = 0; x < grid; ++x)
      if (shape.contains(x - half, y - half)) mask[static_cast<std::size_t>(y) * grid + x] = 1;
  keep_largest_component(mask, grid, grid);

  int x0 = grid, y0 = grid, x1 = -1, y1 = -1;
  for (int y = 0; y < grid; ++y)
    for (int x = 0; x < grid; ++x)
      if (mask[static_cast<std::size_t>(y) * grid + x]) {
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
      }
  if (x1 < 0) throw PlacementFailure("organism rendered empty: " + spec.name);

  RenderedOrganism org;
  org.width = x1 - x0 + 1;
  org.height = y1 - y0 + 1;
  org.mask.assign(static_cast<std::size_t>(org.width) * org.height, 0);
  for (int y = 0; y < org.height; ++y)
    for (int x = 0; x < org.width; ++x)
      org.mask[static_cast<std::size_t>(y) * org.width + x] =
          mask[static_cast<std::size_t>(y + y0) * grid + (x + x0)];

  org.patch = make_pipeline_cube(org.width, org.height, 0.0f);

  std::array<float, kBandCount> level{};
  for (int b = 0; b < kBandCount; ++b)
    level[static_cast<std::size_t>(b)] =
        spec.spectral_signature[static_cast<std::size_t>(b)] +
        static_cast<float>(rng.normal(0.0, spec.jitter_sigma));

  for (int b = 0; b < kBandCount; ++b) {
    Image2D& plane = org.patch.bands[static_cast<std::size_t>(b)].second;
    for (int y = 0; y < org.height; ++y)
      for (int x = 0; x < org.width; ++x)
        if (org.in_mask(x, y))
          plane.at(x, y) = std::max(0.0f, level[static_cast<std::size_t>(b)] +
                                              static_cast<float>(rng.normal(0.0, noise_sigma)));
  }
  return org;
}

double blob_iou(const Blob& blob, const PlacedOrganism& truth) {
  // Both pixel lists are in scan order.
  std::size_t i = 0, j = 0, inter = 0;
  const auto less = [](const Point& a, const Point& b) {
    return a.y != b.y ? a.y < b.y : a.x < b.x;
  };
  while (i < blob.pixels.size() && j < truth.pixels.size()) {
    if (blob.pixels[i] == truth.pixels[j]) {
      ++inter;
      ++i;
      ++j;
    } else if (less(blob.pixels[i], truth.pixels[j])) {
      ++i;
    } else {
      ++j;
    }
  }
  const std::size_t uni = blob.pixels.size() + truth.pixels.size() - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<int> match_blobs(const std::vector<Blob>& blobs,
                             const std::vector<PlacedOrganism>& truth) {
  std::vector<int> result(blobs.size(), -1);
  std::vector<bool> used(truth.size(), false);
  for (std::size_t i = 0; i < blobs.size(); ++i) {
    double best = 0.5;
    int best_j = -1;
    for (std::size_t j = 0; j < truth.size(); ++j) {
      if (used[j]) continue;
      const double iou = blob_iou(blobs[i], truth[j]);
      if (iou > best) {
        best = iou;
        best_j = static_cast<int>(j);
      }
    }
    if (best_j >= 0) {
      result[i] = best_j;
      used[static_cast<std::size_t>(best_j)] = true;
    }
  }
  return result;
}

FieldSample generate_field(const std::vector<ClassSpec>& specs, const std::vector<int>& class_ids,
                           const PhantomConfig& cfg, Rng& rng) {
  validate(specs);
  float min_abs_signature = 1.0f;
  for (const ClassSpec& s : specs)
    for (int b = kFluorescenceCount; b < kBandCount; ++b)
      min_abs_signature = std::min(min_abs_signature, s.spectral_signature[static_cast<std::size_t>(b)]);
  if (!(cfg.background_absorption < min_abs_signature))
    throw ConfigError("background_absorption must sit strictly below every absorption signature");

  FieldSample field;
  field.cube = make_pipeline_cube(cfg.field_width, cfg.field_height);
  for (auto& [b, plane] : field.cube.bands) {
    const float bg = b.modality == Modality::Fluorescence ? cfg.background_fluorescence
                                                          : cfg.background_absorption;
    for (float& v : plane.pixels)
      v = std::max(0.0f, bg + static_cast<float>(rng.normal(0.0, cfg.noise_sigma)));
  }

  struct Box {
    int x0, y0, x1, y1;
  };
  std::vector<Box> placed;

  for (int class_id : class_ids) {
    if (class_id < 0 || class_id >= static_cast<int>(specs.size()))
      throw InvalidClass("class id " + std::to_string(class_id) + " out of range");
    const RenderedOrganism org =
        render_organism(specs[static_cast<std::size_t>(class_id)], rng, cfg.noise_sigma);
    if (org.width > cfg.field_width || org.height > cfg.field_height)
      throw PlacementFailure("organism larger than field");

    bool ok = false;
    for (int attempt = 0; attempt < cfg.max_placement_retries && !ok; ++attempt) {
      const int px = static_cast<int>(rng.uniform_int(0, cfg.field_width - org.width));
      const int py = static_cast<int>(rng.uniform_int(0, cfg.field_height - org.height));
      const Box candidate{px - cfg.placement_margin, py - cfg.placement_margin,
                          px + org.width - 1 + cfg.placement_margin,
                          py + org.height - 1 + cfg.placement_margin};
      bool overlaps = false;
      for (const Box& b : placed)
        if (candidate.x0 <= b.x1 && b.x0 <= candidate.x1 && candidate.y0 <= b.y1 &&
            b.y0 <= candidate.y1) {
          overlaps = true;
          break;
        }
      if (overlaps) continue;

      placed.push_back({px, py, px + org.width - 1, py + org.height - 1});
      PlacedOrganism truth;
      truth.class_id = class_id;
      truth.x0 = px;
      truth.y0 = py;
      truth.x1 = px + org.width - 1;
      truth.y1 = py + org.height - 1;
      double sx = 0.0, sy = 0.0;
      for (int y = 0; y < org.height; ++y)
        for (int x = 0; x < org.width; ++x)
          if (org.in_mask(x, y)) {
            truth.pixels.push_back({px + x, py + y});
            sx += px + x;
            sy += py + y;
            for (int b = 0; b < kBandCount; ++b)
              field.cube.bands[static_cast<std::size_t>(b)].second.at(px + x, py + y) =
                  org.patch.bands[static_cast<std::size_t>(b)].second.at(x, y);
          }
      truth.centroid_x = sx / static_cast<double>(truth.pixels.size());
      truth.centroid_y = sy / static_cast<double>(truth.pixels.size());
      field.truth.push_back(std::move(truth));
      ok = true;
    }
    if (!ok)
      throw PlacementFailure("no room left after " + std::to_string(cfg.max_placement_retries) +
                             " retries (field too crowded)");
  }
  return field;
}

FieldSample generate_field(const std::vector<ClassSpec>& specs, int organism_count,
                           const PhantomConfig& cfg, Rng& rng) {
  if (organism_count < 0) throw ConfigError("organism_count must be non-negative");
  std::vector<int> ids;
  ids.reserve(static_cast<std::size_t>(organism_count));
  for (int i = 0; i < organism_count; ++i)
    ids.push_back(static_cast<int>(rng.uniform_int(0, static_cast<std::int64_t>(specs.size()) - 1)));
  return generate_field(specs, ids, cfg, rng);
}

PhantomDataset generate_dataset(const std::vector<ClassSpec>& specs,
                                const std::vector<std::uint64_t>& per_class_counts,
                                std::uint64_t seed, const PhantomConfig& cfg) {
  validate(specs);
  if (per_class_counts.size() != specs.size())
    throw ConfigError("per_class_counts must have one entry per class");
  for (std::uint64_t c : per_class_counts)
    if (c < 1) throw ConfigError("per-class counts must be at least 1");

  std::vector<int> labels;
  for (std::size_t c = 0; c < per_class_counts.size(); ++c)
    labels.insert(labels.end(), per_class_counts[c], static_cast<int>(c));
  Rng shuffler(mix_seed(seed, 0));
  shuffler.shuffle(labels);

  PhantomDataset dataset;
  dataset.seed = seed;
  dataset.class_counts.assign(specs.size(), 0);

  const std::size_t per_field = static_cast<std::size_t>(std::max(1, cfg.organisms_per_field));
  std::size_t field_index = 0;
  for (std::size_t off = 0; off < labels.size(); off += per_field, ++field_index) {
    const std::size_t n = std::min(per_field, labels.size() - off);
    std::vector<int> chunk(labels.begin() + static_cast<std::ptrdiff_t>(off),
                           labels.begin() + static_cast<std::ptrdiff_t>(off + n));
    Rng field_rng(mix_seed(seed, field_index + 1));
    FieldSample field = generate_field(specs, chunk, cfg, field_rng);

    auto [seg, rois] = segment_cube(field.cube, cfg.segment);
    const std::vector<int> matches = match_blobs(seg.blobs, field.truth);
    for (std::size_t i = 0; i < rois.size(); ++i) {
      if (matches[i] < 0) continue; // unmatched speck, dropped
      const PlacedOrganism& truth = field.truth[static_cast<std::size_t>(matches[i])];
      const Blob& blob = seg.blobs[i];
      ROI roi = std::move(rois[i]);
      roi.label = truth.class_id;
      roi.crop.meta["source"] = "phantom:field=" + std::to_string(field_index);
      roi.crop.meta["blob_box"] = std::to_string(blob.x0) + "," + std::to_string(blob.y0) + "," +
                                  std::to_string(blob.x1) + "," + std::to_string(blob.y1);
      roi.crop.meta["centroid"] =
          format_double(blob.centroid_x, 3) + "," + format_double(blob.centroid_y, 3);
      roi.crop.meta["label"] = std::to_string(truth.class_id);
      ++dataset.class_counts[static_cast<std::size_t>(truth.class_id)];
      dataset.rois.push_back(std::move(roi));
    }
  }
  return dataset;
}

void save_dataset(const PhantomDataset& dataset, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream manifest(dir / "manifest.tsv", std::ios::trunc);
  if (!manifest) throw IoFailure("cannot write manifest in " + dir.string());
  manifest << "# samson-phantom-manifest v1 seed=" << dataset.seed << "\n";
  char name[32];
  for (std::size_t i = 0; i < dataset.rois.size(); ++i) {
    const ROI& roi = dataset.rois[i];
    std::snprintf(name, sizeof(name), "roi_%06zu.samscube", i);
    write_cube(roi.crop, dir / name);
    std::string field = "0";
    if (auto it = roi.crop.meta.find("source"); it != roi.crop.meta.end()) {
      const auto pos = it->second.find("field=");
      if (pos != std::string::npos) field = it->second.substr(pos + 6);
    }
    std::string box = "0,0,0,0";
    if (auto it = roi.crop.meta.find("blob_box"); it != roi.crop.meta.end()) box = it->second;
    manifest << name << "\t" << (roi.label ? *roi.label : -1) << "\t" << field << "\t" << box
             << "\n";
  }
  if (!manifest) throw IoFailure("manifest write failed in " + dir.string());
}

PhantomDataset load_dataset(const std::filesystem::path& dir) {
  std::ifstream manifest(dir / "manifest.tsv");
  if (!manifest) throw IoFailure("cannot open manifest in " + dir.string());

  PhantomDataset dataset;
  int max_label = -1;
  std::string line;
  while (std::getline(manifest, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("seed=");
      if (pos != std::string::npos)
        dataset.seed = std::strtoull(line.c_str() + pos + 5, nullptr, 10);
      continue;
    }
    const auto t1 = line.find('\t');
    const auto t2 = line.find('\t', t1 + 1);
    if (t1 == std::string::npos || t2 == std::string::npos)
      throw MalformedFile("bad manifest line: " + line);
    ROI roi;
    roi.crop = read_cube(dir / line.substr(0, t1));
    roi.blob_id = static_cast<int>(dataset.rois.size());
    const int label = std::stoi(line.substr(t1 + 1, t2 - t1 - 1));
    if (label >= 0) {
      roi.label = label;
      max_label = std::max(max_label, label);
    }
    dataset.rois.push_back(std::move(roi));
  }

  dataset.class_counts.assign(static_cast<std::size_t>(std::max(max_label + 1, 6)), 0);
  for (const ROI& roi : dataset.rois)
    if (roi.label) ++dataset.class_counts[static_cast<std::size_t>(*roi.label)];
  return dataset;
}

} // namespace samson
