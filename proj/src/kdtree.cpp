#include "blochgrass/kdtree.hpp"

#include "blochgrass/error.hpp"

#include <algorithm>

namespace blochgrass {

KdTree3::KdTree3(std::vector<Point3> points, std::size_t leaf_size)
    : points_(std::move(points)), leaf_size_(std::max<std::size_t>(1, leaf_size)) {
    if (points_.empty()) fail(ErrorKind::InvalidInput, "kd-tree needs at least one point");
    order_.resize(points_.size());
    for (std::uint32_t i = 0; i < order_.size(); ++i) order_[i] = i;
    nodes_.reserve(2 * points_.size() / leaf_size_ + 1);
    build(0, static_cast<std::uint32_t>(points_.size()));
}

std::int32_t KdTree3::build(std::uint32_t begin, std::uint32_t end) {
    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back(Node{begin, end});
    if (end - begin <= leaf_size_) return id;

    int dim = 0;
    double widest = -1.0;
    for (int d = 0; d < 3; ++d) {
        double lo = points_[order_[begin]][d], hi = lo;
        for (auto k = begin; k < end; ++k) {
            lo = std::min(lo, points_[order_[k]][d]);
            hi = std::max(hi, points_[order_[k]][d]);
        }
        if (hi - lo > widest) {
            widest = hi - lo;
            dim = d;
        }
    }
    const auto mid = begin + (end - begin) / 2;
    // (coordinate, index) ordering keeps the layout independent of the input permutation.
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) {
                         const double pa = points_[a][dim], pb = points_[b][dim];
                         return pa < pb || (pa == pb && a < b);
                     });
    const double split = points_[order_[mid]][dim];
    const auto left = build(begin, mid);
    const auto right = build(mid, end);
    nodes_[id].dim = dim;
    nodes_[id].split = split;
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
}

void KdTree3::search(std::int32_t id, const Point3& q, std::size_t exclude, Result& best) const {
    const Node& node = nodes_[id];
    if (node.left < 0) {
        for (auto k = node.begin; k < node.end; ++k) {
            const auto idx = order_[k];
            if (idx == exclude) continue;
            const auto& p = points_[idx];
            const double dx = p[0] - q[0], dy = p[1] - q[1], dz = p[2] - q[2];
            const double d2 = dx * dx + dy * dy + dz * dz;
            ++best.distance_evals;
            ++best.comparisons;
            if (d2 < best.dist2 || (d2 == best.dist2 && idx < best.index)) {
                best.dist2 = d2;
                best.index = idx;
            }
        }
        return;
    }
    const double diff = q[node.dim] - node.split;
    ++best.comparisons;
    const auto near = diff < 0.0 ? node.left : node.right;
    const auto far = diff < 0.0 ? node.right : node.left;
    search(near, q, exclude, best);
    ++best.comparisons;
    // Equality keeps equidistant lower-index points reachable.
    if (diff * diff <= best.dist2) search(far, q, exclude, best);
}

KdTree3::Result KdTree3::nearest(const Point3& q) const {
    Result best;
    best.index = points_.size();
    search(0, q, points_.size(), best);
    return best;
}

KdTree3::Result KdTree3::nearest_excluding(const Point3& q, std::size_t exclude) const {
    if (points_.size() < 2) fail(ErrorKind::InvalidInput, "need two points to exclude one");
    Result best;
    best.index = points_.size();
    search(0, q, exclude, best);
    return best;
}

} // namespace blochgrass
