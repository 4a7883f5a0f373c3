#include "blochgrass/geometry.hpp"

#include "blochgrass/error.hpp"
#include "blochgrass/kdtree.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>

namespace blochgrass {

namespace {

double norm2(cplx a, cplx b) { return std::norm(a) + std::norm(b); }

void require_unit(double n2, const char* what) {
    if (!std::isfinite(n2) || std::abs(std::sqrt(n2) - 1.0) > kUnitTolerance) {
        std::ostringstream os;
        os << what << ": norm " << std::sqrt(n2) << " is not 1";
        fail(ErrorKind::InvalidInput, os.str());
    }
}

} // namespace

Codeword canonical_from_nonzero(cplx a, cplx b, double norm) {
    const double mag0 = std::abs(a);
    const cplx phase = mag0 > 0.0 ? std::conj(a) / mag0 : cplx(1.0, 0.0);
    return Codeword(mag0 / norm, phase * b / norm);
}

Codeword Codeword::from_unit(cplx a, cplx b) {
    const double n2 = norm2(a, b);
    require_unit(n2, "codeword");
    return canonical_from_nonzero(a, b, std::sqrt(n2));
}

BlochPoint::BlochPoint(double x, double y, double z) {
    const double n2 = x * x + y * y + z * z;
    require_unit(n2, "Bloch point");
    const double n = std::sqrt(n2);
    x_ = x / n;
    y_ = y / n;
    z_ = z / n;
}

double wrap_azimuth(double phi) {
    double w = std::fmod(phi, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    if (kTwoPi - w <= 1e-12) w = 0.0;
    return w;
}

double chordal_distance(const Codeword& a, const Codeword& b) {
    // For unit vectors 1 - |a^H b|^2 = |a0 b1 - a1 b0|^2, which avoids cancellation.
    const cplx det = a.c0() * b.c1() - a.c1() * b.c0();
    const double radicand = std::clamp(std::norm(det), 0.0, 1.0);
    return std::sqrt(radicand);
}

double chordal_distance(const CVec2& a, const CVec2& b) {
    require_unit(norm2(a[0], a[1]), "chordal_distance");
    require_unit(norm2(b[0], b[1]), "chordal_distance");
    const cplx inner = std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1];
    const double radicand = std::clamp(1.0 - std::norm(inner), 0.0, 1.0);
    return std::sqrt(radicand);
}

double euclidean_distance(const BlochPoint& p, const BlochPoint& q) {
    const double dx = p.x() - q.x(), dy = p.y() - q.y(), dz = p.z() - q.z();
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

Codeword angles_to_codeword(const SphericalAngles& a) {
    const double half = 0.5 * a.theta;
    const double s = std::sin(half);
    return Codeword::from_unit(cplx(std::cos(half), 0.0), std::polar(s, a.phi));
}

SphericalAngles bloch_to_angles(const BlochPoint& p) {
    SphericalAngles a;
    a.theta = std::acos(std::clamp(p.z(), -1.0, 1.0));
    const double rho = std::hypot(p.x(), p.y());
    a.phi = rho > 0.0 ? wrap_azimuth(std::atan2(p.y(), p.x())) : 0.0;
    return a;
}

BlochPoint angles_to_bloch(const SphericalAngles& a) {
    const double st = std::sin(a.theta);
    return BlochPoint(st * std::cos(a.phi), st * std::sin(a.phi), std::cos(a.theta));
}

std::pair<BlochPoint, SphericalAngles> codeword_to_bloch(const Codeword& c) {
    const double c0 = c.c0();
    const cplx c1 = c.c1();
    const double m1 = std::abs(c1);
    SphericalAngles a;
    a.theta = 2.0 * std::atan2(m1, c0);
    a.phi = m1 > 0.0 && c0 > 0.0 ? wrap_azimuth(std::arg(c1)) : 0.0;
    // x + jy = 2 c0 c1 and z = c0^2 - |c1|^2 hold exactly for canonical codewords.
    const cplx xy = 2.0 * c0 * c1;
    return {BlochPoint(xy.real(), xy.imag(), c0 * c0 - m1 * m1), a};
}

std::pair<BlochPoint, SphericalAngles> codeword_to_bloch(const CVec2& c) {
    require_unit(norm2(c[0], c[1]), "codeword_to_bloch");
    if (std::abs(c[0].imag()) > kUnitTolerance)
        fail(ErrorKind::InvalidInput, "codeword_to_bloch: first entry is not real");
    const double c0 = c[0].real();
    if (c0 < -kUnitTolerance)
        fail(ErrorKind::InvalidInput, "codeword_to_bloch: first entry is negative");
    return codeword_to_bloch(Codeword::from_unit(cplx(std::clamp(c0, 0.0, 1.0), 0.0), c[1]));
}

Codeword bloch_to_codeword(const BlochPoint& p) {
    const double z = std::clamp(p.z(), -1.0, 1.0);
    const double c0 = std::sqrt(0.5 * (1.0 + z)), m1 = std::sqrt(0.5 * (1.0 - z));
    const double rho = std::hypot(p.x(), p.y());
    return Codeword::from_unit(cplx(c0, 0.0), rho > 0.0 ? std::polar(m1, std::atan2(p.y(), p.x())) : cplx(m1, 0.0));
}

Codeword normalize_received(const CVec2& y) {
    const double n2 = norm2(y[0], y[1]);
    if (!(n2 > 0.0) || !std::isfinite(n2))
        fail(ErrorKind::Degenerate, "normalize_received: zero received vector");
    return canonical_from_nonzero(y[0], y[1], std::sqrt(n2));
}

double fejes_toth_bound(std::size_t count) {
    if (count <= 2) {
        fail(ErrorKind::Domain,
             "fejes_toth_bound is defined for C >= 3 (C = 2 is attained exactly by antipodal points, d = 1)");
    }
    const double c = static_cast<double>(count);
    const double s = std::sin(kPi * c / (6.0 * (c - 2.0)));
    return 0.5 * std::sqrt(4.0 - 1.0 / (s * s));
}

std::string_view to_string(Method m) {
    switch (m) {
    case Method::SOpt: return "s-opt";
    case Method::ZOpt: return "z-opt";
    case Method::ManOpt: return "man-opt";
    case Method::ExpMap: return "exp-map";
    case Method::CubeSplit: return "cube-split";
    case Method::GrassLattice: return "grass-lattice";
    case Method::External: return "external";
    }
    return "external";
}

Method parse_method(std::string_view s) {
    for (auto m : {Method::SOpt, Method::ZOpt, Method::ManOpt, Method::ExpMap, Method::CubeSplit,
                   Method::GrassLattice, Method::External}) {
        if (to_string(m) == s) return m;
    }
    fail(ErrorKind::InvalidInput, "unknown constellation method '" + std::string(s) + "'");
}

Constellation::Constellation(std::vector<Codeword> codewords, Method method)
    : codewords_(std::move(codewords)), method_(method) {
    if (codewords_.empty()) fail(ErrorKind::InvalidInput, "empty constellation");
    if (codewords_.size() >= 2 && !(min_chordal_distance(codewords_) > 0.0))
        fail(ErrorKind::InvalidInput, "constellation contains coincident codewords");
    const auto c = codewords_.size();
    if (std::has_single_bit(c)) bits_ = std::countr_zero(c);
}

std::vector<BlochPoint> Constellation::bloch_points() const {
    std::vector<BlochPoint> pts;
    pts.reserve(codewords_.size());
    for (const auto& c : codewords_) pts.push_back(codeword_to_bloch(c).first);
    return pts;
}

Constellation Constellation::retagged(Method method) const {
    Constellation copy = *this;
    copy.method_ = method;
    return copy;
}

double min_chordal_distance(std::span<const Codeword> codewords) {
    const auto n = codewords.size();
    if (n < 2) fail(ErrorKind::InvalidInput, "min_chordal_distance needs at least two codewords");
    double best = std::numeric_limits<double>::infinity();
    if (n <= 512) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                best = std::min(best, chordal_distance(codewords[i], codewords[j]));
        return best;
    }
    std::vector<Point3> pts;
    pts.reserve(n);
    for (const auto& c : codewords) pts.push_back(codeword_to_bloch(c).first.coords());
    const KdTree3 tree(pts);
    for (std::size_t i = 0; i < n; ++i) {
        const auto nn = tree.nearest_excluding(pts[i], i);
        best = std::min(best, chordal_distance(codewords[i], codewords[nn.index]));
    }
    return best;
}

double min_chordal_distance(const Constellation& x) { return min_chordal_distance(x.codewords()); }

} // namespace blochgrass
