#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

namespace blochgrass {

using Point3 = std::array<double, 3>;

/// Balanced 3-d tree for exact nearest-neighbour queries. Ties in squared
/// distance resolve to the lowest point index, matching the exhaustive scan.
class KdTree3 {
  public:
    struct Result {
        std::size_t index = 0;
        double dist2 = std::numeric_limits<double>::infinity();
        std::uint64_t distance_evals = 0;
        std::uint64_t comparisons = 0;
    };

    explicit KdTree3(std::vector<Point3> points, std::size_t leaf_size = 4);

    Result nearest(const Point3& q) const;
    /// Nearest point other than `exclude` (used for minimum-distance scans).
    Result nearest_excluding(const Point3& q, std::size_t exclude) const;

    std::size_t size() const noexcept { return points_.size(); }
    std::size_t leaf_size() const noexcept { return leaf_size_; }
    const std::vector<Point3>& points() const noexcept { return points_; }

  private:
    struct Node {
        std::uint32_t begin, end;
        std::int32_t left = -1, right = -1;
        int dim = 0;
        double split = 0.0;
    };

    std::int32_t build(std::uint32_t begin, std::uint32_t end);
    void search(std::int32_t node, const Point3& q, std::size_t exclude, Result& best) const;

    std::vector<Point3> points_;
    std::vector<std::uint32_t> order_;
    std::vector<Node> nodes_;
    std::size_t leaf_size_;
};

} // namespace blochgrass
