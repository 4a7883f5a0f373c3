#include "blochgrass/detectors.hpp"

#include "blochgrass/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace blochgrass {

CVec2 rough_estimate(const ReceivedBlock& y) {
    if (y.empty()) fail(ErrorKind::InvalidInput, "received block has no columns");
    if (y.size() == 1) {
        if (std::norm(y[0][0]) + std::norm(y[0][1]) == 0.0) fail(ErrorKind::Degenerate, "received block is zero");
        return y[0];
    }
    double a = 0.0, c = 0.0;
    cplx b(0.0, 0.0);
    for (const auto& col : y) {
        a += std::norm(col[0]);
        c += std::norm(col[1]);
        b += col[0] * std::conj(col[1]);
    }
    if (a + c == 0.0) fail(ErrorKind::Degenerate, "received block is zero");
    const double nb = std::norm(b);
    if (nb == 0.0) return a >= c ? CVec2{cplx(1.0), cplx(0.0)} : CVec2{cplx(0.0), cplx(1.0)};
    const double h = 0.5 * (a - c);
    const double lambda = 0.5 * (a + c) + std::sqrt(h * h + nb);
    // Two equivalent eigenvector forms; keep the better conditioned one.
    const CVec2 v1{cplx(lambda - c), std::conj(b)};
    const CVec2 v2{b, cplx(lambda - a)};
    const double n1 = std::norm(v1[0]) + std::norm(v1[1]);
    const double n2 = std::norm(v2[0]) + std::norm(v2[1]);
    const CVec2& v = n1 >= n2 ? v1 : v2;
    const double s = 1.0 / std::sqrt(std::max(n1, n2));
    return {v[0] * s, v[1] * s};
}

DetectionResult glrt_detect(const ReceivedBlock& y, const Constellation& x) {
    if (x.size() == 0) fail(ErrorKind::InvalidInput, "empty constellation");
    if (y.empty()) fail(ErrorKind::InvalidInput, "received block has no columns");
    double a = 0.0, c = 0.0;
    cplx b(0.0, 0.0);
    for (const auto& col : y) {
        a += std::norm(col[0]);
        c += std::norm(col[1]);
        b += col[0] * std::conj(col[1]);
    }
    DetectionResult r;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double x0 = x[i].c0();
        const cplx x1 = x[i].c1();
        const double metric = a * x0 * x0 + c * std::norm(x1) + 2.0 * x0 * std::real(b * x1);
        ++r.distance_evals;
        ++r.comparisons;
        if (metric > best) {
            best = metric;
            r.index = i;
        }
    }
    return r;
}

namespace {

std::vector<Point3> bloch_coords(const Constellation& x) {
    std::vector<Point3> pts;
    pts.reserve(x.size());
    for (const auto& p : x.bloch_points()) pts.push_back(p.coords());
    return pts;
}

SphericalAngles received_angles(const ReceivedBlock& y) {
    return codeword_to_bloch(normalize_received(rough_estimate(y))).second;
}

} // namespace

NearestNeighborIndex::NearestNeighborIndex(const Constellation& x, std::size_t leaf_size)
    : tree_(bloch_coords(x), leaf_size) {}

DetectionResult sopt_detect(const ReceivedBlock& y, const NearestNeighborIndex& nn) {
    const auto p = codeword_to_bloch(normalize_received(rough_estimate(y))).first;
    const auto hit = nn.tree().nearest(p.coords());
    return {hit.index, hit.distance_evals, hit.comparisons};
}

int zopt_region_j(double phi_z, int z_max) {
    if (phi_z >= kTwoPi || phi_z < 0.0) phi_z = wrap_azimuth(phi_z);
    const int j = static_cast<int>(std::floor(phi_z / (kPi / z_max)));
    return std::clamp(j, 0, 2 * z_max - 1);
}

int zopt_region_i(double theta_z, std::span<const double> theta, std::uint64_t* comparisons) {
    std::size_t lo = 0, hi = theta.size();
    std::uint64_t n = 0;
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        ++n;
        if (theta[mid] < theta_z)
            lo = mid + 1;
        else
            hi = mid;
    }
    if (comparisons) *comparisons += n;
    return static_cast<int>(lo);
}

namespace zopt_cell {

int f(int i, int J) { return ((i + (i == 0 ? 1 : 0)) - J) % 2 == 0 ? 1 : 0; }

int g(int J) {
    switch (J % 4) {
    case 1: return 1;
    case 2: return 2;
    case 3: return -1;
    default: return 0;
    }
}

long long T(const ZOptStructure& s, int i, int J) {
    const long long z = s.z_max;
    const int l = s.layers;
    const long long last = J == 2 * z ? 1 : 0;
    if (!s.half_layers()) {
        if (i == 0) return (i - last) * z + J / 2 + 1;
        if (i % 2 == 1) return (i - 1 - last) * z + J / 2 + 1;
        return (i - 1) * z + (J + 1) / 2;
    }
    long long t;
    if (i == 0 || i == 1 || i == l) {
        const long long delta = 3 * (i == 0) + (i == 1) - last - (J == 2 * z - 1 ? 1 : 0);
        t = (J + 1) / 4 + 1 + z / 2 * delta;
    } else if (i % 2 == 0) {
        t = (J + 1) / 2;
    } else {
        t = J / 2 + 1 - z * last;
    }
    // (i - 3/2) z with z even.
    return (2 * i - 3) * z / 2 + t;
}

} // namespace zopt_cell

ZOptDetectorState::ZOptDetectorState(ZOptStructure structure, std::vector<double> theta)
    : structure_(std::move(structure)), theta_(std::move(theta)) {
    if (static_cast<int>(theta_.size()) != structure_.layers)
        fail(ErrorKind::InvalidInput, "Z-Opt detector needs one angle per layer");
    for (std::size_t k = 0; k < theta_.size(); ++k)
        if (!(theta_[k] > 0.0 && theta_[k] < kPi) || (k > 0 && !(theta_[k] > theta_[k - 1])))
            fail(ErrorKind::InvalidInput, "Z-Opt layer angles must increase within (0, pi)");
}

ZOptDetectorState::ZOptDetectorState(const ZOptConstellation& z) : ZOptDetectorState(z.structure, z.theta) {}

std::size_t ZOptDetectorState::cell_index(int i, int j) const {
    return static_cast<std::size_t>(zopt_cell::T(structure_, i, j + 1) - 1);
}

double ZOptDetectorState::cell_delta_phi(double phi_z, int i_c, int j) const {
    const int J = j + 1;
    const int l = structure_.layers;
    const bool half_layer = structure_.half_layers() && (i_c == 0 || i_c == 1 || i_c == l);
    const int k = half_layer ? zopt_cell::g(J) : zopt_cell::f(i_c, J);
    return std::abs(phi_z - (J - k) * kPi / structure_.z_max);
}

std::vector<std::size_t> ZOptDetectorState::reference_table(const Constellation& x) const {
    if (x.size() != structure_.count) fail(ErrorKind::InvalidInput, "constellation size does not match the Z-Opt state");
    const int l = structure_.layers, z = structure_.z_max;
    std::vector<std::size_t> offsets;
    std::size_t acc = 0;
    for (int zm : structure_.layer_sizes) {
        offsets.push_back(acc);
        acc += static_cast<std::size_t>(zm);
    }
    std::vector<std::size_t> table;
    table.reserve(static_cast<std::size_t>((l + 1) * 2 * z));
    for (int i = 0; i <= l; ++i) {
        const int m = std::max(i, 1) - 1;
        for (int j = 0; j < 2 * z; ++j) {
            const double mid = (j + 0.5) * kPi / z;
            std::size_t best = 0;
            double best_gap = std::numeric_limits<double>::infinity();
            for (int n = 0; n < structure_.layer_sizes[m]; ++n) {
                const std::size_t idx = offsets[m] + static_cast<std::size_t>(n);
                const double phi = codeword_to_bloch(x[idx]).second.phi;
                double gap = std::abs(phi - mid);
                gap = std::min(gap, kTwoPi - gap);
                if (gap < best_gap) {
                    best_gap = gap;
                    best = idx;
                }
            }
            table.push_back(best);
        }
    }
    return table;
}

DetectionResult zopt_detect(const ReceivedBlock& y, const ZOptDetectorState& state) {
    const auto a = received_angles(y);
    const auto& s = state.structure();
    DetectionResult r;
    const int j = zopt_region_j(a.phi, s.z_max);
    const int i = zopt_region_i(a.theta, state.theta(), &r.comparisons);
    const int lo = std::max(1, i - 1), hi = std::min(i + 2, s.layers);
    double best = std::numeric_limits<double>::infinity();
    for (int ic = lo; ic <= hi; ++ic) {
        const double d = d_diagonal(state.theta()[ic - 1], a.theta, state.cell_delta_phi(a.phi, ic, j));
        const std::size_t idx = state.cell_index(ic, j);
        ++r.distance_evals;
        ++r.comparisons;
        if (d < best || (d == best && idx < r.index)) {
            best = d;
            r.index = idx;
        }
    }
    return r;
}

std::string_view to_string(DetectorKind k) {
    switch (k) {
    case DetectorKind::Glrt: return "glrt";
    case DetectorKind::SOpt: return "sopt";
    case DetectorKind::ZOpt: return "zopt";
    }
    return "glrt";
}

DetectorKind parse_detector(std::string_view s) {
    if (s == "glrt") return DetectorKind::Glrt;
    if (s == "sopt") return DetectorKind::SOpt;
    if (s == "zopt") return DetectorKind::ZOpt;
    fail(ErrorKind::InvalidConfig, "unknown detector '" + std::string(s) + "' (expected glrt, sopt or zopt)");
}

namespace {

class GlrtDetector final : public Detector {
  public:
    explicit GlrtDetector(const Constellation& x) : x_(x) {}
    DetectorKind kind() const noexcept override { return DetectorKind::Glrt; }
    DetectionResult detect(const ReceivedBlock& y) const override { return glrt_detect(y, x_); }

  private:
    Constellation x_;
};

class SOptDetector final : public Detector {
  public:
    explicit SOptDetector(const Constellation& x) : nn_(x) {}
    DetectorKind kind() const noexcept override { return DetectorKind::SOpt; }
    DetectionResult detect(const ReceivedBlock& y) const override { return sopt_detect(y, nn_); }

  private:
    NearestNeighborIndex nn_;
};

class ZOptDetector final : public Detector {
  public:
    explicit ZOptDetector(const ZOptDetectorState& s) : state_(s) {}
    DetectorKind kind() const noexcept override { return DetectorKind::ZOpt; }
    DetectionResult detect(const ReceivedBlock& y) const override { return zopt_detect(y, state_); }

  private:
    ZOptDetectorState state_;
};

} // namespace

std::unique_ptr<Detector> make_detector(DetectorKind kind, const Constellation& x, const ZOptDetectorState* zopt) {
    switch (kind) {
    case DetectorKind::Glrt: return std::make_unique<GlrtDetector>(x);
    case DetectorKind::SOpt: return std::make_unique<SOptDetector>(x);
    case DetectorKind::ZOpt:
        if (!zopt) fail(ErrorKind::InvalidInput, "the zopt detector needs a Z-Opt constellation with layer angles");
        if (zopt->count() != x.size()) {
            std::ostringstream os;
            os << "Z-Opt state describes " << zopt->count() << " codewords but the constellation has " << x.size();
            fail(ErrorKind::InvalidInput, os.str());
        }
        return std::make_unique<ZOptDetector>(*zopt);
    }
    fail(ErrorKind::InvalidInput, "unknown detector");
}

} // namespace blochgrass
