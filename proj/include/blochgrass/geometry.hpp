#pragma once

// Points of G(2,1): complex lines in C^2, their Bloch-sphere images, and the
// distances between them.

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace blochgrass {

using cplx = std::complex<double>;
using CVec2 = std::array<cplx, 2>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Tolerance on |norm - 1| accepted at construction boundaries.
inline constexpr double kUnitTolerance = 1e-9;

/// A unit vector in C^2 with the global phase removed: c0 is real and >= 0.
class Codeword {
  public:
    Codeword() : c0_(1.0), c1_(0.0) {}

    /// Validates |a|^2 + |b|^2 = 1 (within kUnitTolerance), renormalizes and
    /// removes the phase of the first entry.
    static Codeword from_unit(cplx a, cplx b);

    double c0() const noexcept { return c0_; }
    cplx c1() const noexcept { return c1_; }
    CVec2 vec() const noexcept { return {cplx(c0_, 0.0), c1_}; }

    friend bool operator==(const Codeword&, const Codeword&) = default;

  private:
    Codeword(double c0, cplx c1) : c0_(c0), c1_(c1) {}

    double c0_;
    cplx c1_;

    friend Codeword canonical_from_nonzero(cplx a, cplx b, double norm);
};

/// A point of the unit sphere in R^3.
class BlochPoint {
  public:
    BlochPoint() : x_(0.0), y_(0.0), z_(1.0) {}

    /// Validates the norm within kUnitTolerance and renormalizes.
    BlochPoint(double x, double y, double z);

    double x() const noexcept { return x_; }
    double y() const noexcept { return y_; }
    double z() const noexcept { return z_; }
    std::array<double, 3> coords() const noexcept { return {x_, y_, z_}; }

    friend bool operator==(const BlochPoint&, const BlochPoint&) = default;

  private:
    double x_, y_, z_;
};

/// Polar angle theta in [0, pi], azimuth phi in [0, 2 pi). phi is 0 at the poles.
struct SphericalAngles {
    double theta = 0.0;
    double phi = 0.0;
};

/// Wraps an azimuth into [0, 2 pi); values within 1e-12 below 2 pi map to 0.
double wrap_azimuth(double phi);

double chordal_distance(const Codeword& a, const Codeword& b);
/// Raw-vector form; rejects inputs whose norm deviates from 1 by more than 1e-9.
double chordal_distance(const CVec2& a, const CVec2& b);

double euclidean_distance(const BlochPoint& p, const BlochPoint& q);

Codeword angles_to_codeword(const SphericalAngles& a);
SphericalAngles bloch_to_angles(const BlochPoint& p);
BlochPoint angles_to_bloch(const SphericalAngles& a);

std::pair<BlochPoint, SphericalAngles> codeword_to_bloch(const Codeword& c);
/// Raw form with the clamping rules for c0 rounding noise.
std::pair<BlochPoint, SphericalAngles> codeword_to_bloch(const CVec2& c);

Codeword bloch_to_codeword(const BlochPoint& p);

/// e^{-j arg y0} y / |y|; the phase factor is 1 when y0 = 0.
Codeword normalize_received(const CVec2& y);

/// Upper bound on the minimum chordal distance of C points of G(2,1), C >= 3.
double fejes_toth_bound(std::size_t count);

enum class Method { SOpt, ZOpt, ManOpt, ExpMap, CubeSplit, GrassLattice, External };

std::string_view to_string(Method m);
Method parse_method(std::string_view s);

/// An ordered set of distinct codewords. Sizes need not be powers of two
/// (exact packings of 3, 6 and 12 points are valid inputs); bits() is set only
/// when they are.
class Constellation {
  public:
    Constellation(std::vector<Codeword> codewords, Method method);

    std::size_t size() const noexcept { return codewords_.size(); }
    std::optional<int> bits() const noexcept { return bits_; }
    Method method() const noexcept { return method_; }
    const std::vector<Codeword>& codewords() const noexcept { return codewords_; }
    const Codeword& operator[](std::size_t i) const { return codewords_[i]; }

    std::vector<BlochPoint> bloch_points() const;

    Constellation retagged(Method method) const;

  private:
    std::vector<Codeword> codewords_;
    Method method_;
    std::optional<int> bits_;
};

/// Minimum over all pairs; exhaustive for small sets, nearest-neighbour based
/// for large ones (identical result since Euclidean and chordal orderings agree).
double min_chordal_distance(std::span<const Codeword> codewords);
double min_chordal_distance(const Constellation& x);

} // namespace blochgrass
