#ifndef SAMSON_PHANTOM_HPP
#define SAMSON_PHANTOM_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "samson/image.hpp"
#include "samson/rng.hpp"
#include "samson/segment.hpp"

namespace samson {

// Coarse geometric proxies for the six cultured species: shape separates
// classes within a phylum, the spectral signature separates the phyla.
enum class Morphology {
  ColonyOfSmallSpheres, // Microcystis-like colony of small cells
  ThickFilament,        // Anabaena-like trichome
  ThinFilament,         // Pseudanabaena-like narrow trichome
  EllipsoidCluster4,    // Scenedesmus obliquus-like 4-cell coenobium
  SpinyEllipsoidCluster, // Scenedesmus quadricauda-like coenobium with spines
  NeedleCrescent        // Ankistrodesmus-like sickle needle
};

struct ClassSpec {
  int class_id = 0;
  std::string name;
  Morphology morphology = Morphology::ColonyOfSmallSpheres;
  std::array<float, kBandCount> spectral_signature{}; // canonical band order, [0,1]
  float jitter_sigma = 0.04f;   // per-organism, per-band signature jitter
  float size_min = 16.0f;       // characteristic size range in pixels
  float size_max = 32.0f;
};

// Geometry constants of the 4-cell coenobium model; the Monte-Carlo area test
// derives its closed-form expectation from these.
inline constexpr double kClusterCells = 4.0;
inline constexpr double kClusterSemiMajor = 0.5;      // a = size * kClusterSemiMajor
inline constexpr double kClusterSemiMinor = 1.0 / 6.0; // b = size * kClusterSemiMinor
inline constexpr double kClusterSpacing = 1.85;       // center distance = kClusterSpacing * b

// The six default classes, mirroring CPCC 300, 067, 471, 005, 158, 366.
std::vector<ClassSpec> default_class_specs();

// Throws ConfigError unless every cyanophyta-like class (0-2) sits strictly
// below every chlorophyta-like class (3-5) in both fluorescence bands and all
// signature means lie in [0,1].
void validate(const std::vector<ClassSpec>& specs);

struct PhantomConfig {
  int field_width = 256;
  int field_height = 256;
  float background_absorption = 0.05f;
  float background_fluorescence = 0.02f;
  float noise_sigma = 0.02f;
  int organisms_per_field = 6;
  int placement_margin = 2;   // extra spacing between organism boxes
  int max_placement_retries = 200;
  SegmentParams segment;
};

// One rendered organism: tight nine-band patch over zero background plus its
// pixel mask.
struct RenderedOrganism {
  ImageCube patch;
  std::vector<std::uint8_t> mask;
  int width = 0;
  int height = 0;

  bool in_mask(int x, int y) const { return mask[static_cast<std::size_t>(y) * width + x] != 0; }
  std::uint64_t area() const {
    std::uint64_t n = 0;
    for (std::uint8_t m : mask) n += m;
    return n;
  }
};

// Ground truth for one placed organism, in field coordinates.
struct PlacedOrganism {
  int class_id = 0;
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  double centroid_x = 0.0;
  double centroid_y = 0.0;
  std::vector<Point> pixels; // scan order
};

struct FieldSample {
  ImageCube cube;
  std::vector<PlacedOrganism> truth;
};

struct PhantomDataset {
  std::vector<ROI> rois; // labels set; provenance in crop meta
  std::vector<std::uint64_t> class_counts;
  std::uint64_t seed = 0;
};

RenderedOrganism render_organism(const ClassSpec& spec, Rng& rng, float noise_sigma = 0.02f);

// Places the given class sequence into one field without bounding-box
// overlap (rejection sampling); throws PlacementFailure when the field is too
// crowded. Background sits strictly below every absorption signature so the
// threshold stage can separate organisms.
FieldSample generate_field(const std::vector<ClassSpec>& specs, const std::vector<int>& class_ids,
                           const PhantomConfig& cfg, Rng& rng);

// Convenience: organism classes drawn uniformly from the spec set.
FieldSample generate_field(const std::vector<ClassSpec>& specs, int organism_count,
                           const PhantomConfig& cfg, Rng& rng);

// Pixel-set intersection-over-union between a segmented blob and a placed
// organism.
double blob_iou(const Blob& blob, const PlacedOrganism& truth);

// For each blob, the index of the ground-truth organism with IoU > 0.5, or -1.
std::vector<int> match_blobs(const std::vector<Blob>& blobs,
                             const std::vector<PlacedOrganism>& truth);

// Full generation path: fields are rendered, pushed through the real
// segmentation pipeline, and the recovered ROIs are labeled by ground-truth
// matching. Deterministic: field k uses the substream mix_seed(seed, k + 1).
PhantomDataset generate_dataset(const std::vector<ClassSpec>& specs,
                                const std::vector<std::uint64_t>& per_class_counts,
                                std::uint64_t seed, const PhantomConfig& cfg);

// Directory layout: one SAMSCUBE file per ROI plus a line-oriented manifest
// (path, class_id, field_index, blob box).
void save_dataset(const PhantomDataset& dataset, const std::filesystem::path& dir);
PhantomDataset load_dataset(const std::filesystem::path& dir);

} // namespace samson

#endif
