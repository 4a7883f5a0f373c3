#pragma once

// Noncoherent detectors for G(2,1) constellations. Every detector returns the
// same decision as the exhaustive GLRT, with ties going to the lowest index.

#include "blochgrass/geometry.hpp"
#include "blochgrass/kdtree.hpp"
#include "blochgrass/zopt.hpp"

#include <cstdint>
#include <memory>
#include <string_view>
#include <vector>

namespace blochgrass {

/// A received 2 x N block stored column by column.
using ReceivedBlock = std::vector<CVec2>;

struct DetectionResult {
    std::size_t index = 0;
    std::uint64_t distance_evals = 0;
    std::uint64_t comparisons = 0;
};

/// Dominant left singular vector of Y (the column itself when N = 1), from the
/// closed-form eigen-decomposition of Y Y^H. An equal spectrum yields (1, 0).
CVec2 rough_estimate(const ReceivedBlock& y);

/// argmax_i x_i^H Y Y^H x_i.
DetectionResult glrt_detect(const ReceivedBlock& y, const Constellation& x);

/// Bloch-sphere nearest-neighbour search over a KD-tree.
class NearestNeighborIndex {
  public:
    explicit NearestNeighborIndex(const Constellation& x, std::size_t leaf_size = 4);

    std::size_t size() const noexcept { return tree_.size(); }
    const KdTree3& tree() const noexcept { return tree_; }

  private:
    KdTree3 tree_;
};

DetectionResult sopt_detect(const ReceivedBlock& y, const NearestNeighborIndex& nn);

/// Azimuth cell j = floor(phi / (pi / z_max)), zero-based, clamped to 2 z_max - 1.
int zopt_region_j(double phi_z, int z_max);

/// Number of layer angles strictly below theta_z, by binary search.
int zopt_region_i(double theta_z, std::span<const double> theta, std::uint64_t* comparisons = nullptr);

/// Receiver-side data for the Z-Opt detector: only the layer angles are kept.
class ZOptDetectorState {
  public:
    ZOptDetectorState(ZOptStructure structure, std::vector<double> theta);
    explicit ZOptDetectorState(const ZOptConstellation& z);

    const ZOptStructure& structure() const noexcept { return structure_; }
    const std::vector<double>& theta() const noexcept { return theta_; }
    std::size_t count() const noexcept { return structure_.count; }

    /// Representative codeword of grid cell (i, j): the nearest codeword in
    /// azimuth on layer i (layer 1 when i = 0). Zero-based in and out except i,
    /// which counts layers below as in zopt_region_i.
    std::size_t cell_index(int i, int j) const;

    /// Azimuth offset between phi_z and that codeword, for candidate layer i_c.
    double cell_delta_phi(double phi_z, int i_c, int j) const;

    /// Same table from the realized geometry by exhaustive azimuth search,
    /// laid out as [i * 2 z_max + j] for 0 <= i <= l.
    std::vector<std::size_t> reference_table(const Constellation& x) const;

  private:
    ZOptStructure structure_;
    std::vector<double> theta_;
};

/// One-based cell formulas (J = j + 1) kept separate for direct testing.
namespace zopt_cell {
int f(int i, int J);
int g(int J);
/// One-based codeword number.
long long T(const ZOptStructure& s, int i, int J);
} // namespace zopt_cell

DetectionResult zopt_detect(const ReceivedBlock& y, const ZOptDetectorState& state);

enum class DetectorKind { Glrt, SOpt, ZOpt };

std::string_view to_string(DetectorKind k);
DetectorKind parse_detector(std::string_view s);

class Detector {
  public:
    virtual ~Detector() = default;
    virtual DetectorKind kind() const noexcept = 0;
    virtual DetectionResult detect(const ReceivedBlock& y) const = 0;
};

/// The Z-Opt detector needs `zopt`; its count must match the constellation.
std::unique_ptr<Detector> make_detector(DetectorKind kind, const Constellation& x, const ZOptDetectorState* zopt = nullptr);

} // namespace blochgrass
