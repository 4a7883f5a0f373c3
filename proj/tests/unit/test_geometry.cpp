#include "blochgrass/error.hpp"
#include "blochgrass/geometry.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>
#include <tuple>

using namespace blochgrass;
using doctest::Approx;

namespace {

Codeword cw(cplx a, cplx b) { return Codeword::from_unit(a, b); }
const double r2 = 1.0 / std::sqrt(2.0);

oracle::V2 raw(const Codeword& c) { return {cplx(c.c0()), c.c1()}; }

} // namespace

TEST_CASE("chordal distance examples") {
    CHECK(chordal_distance(cw(1, 0), cw(1, 0)) == Approx(0.0));
    CHECK(chordal_distance(cw(1, 0), cw(0, 1)) == Approx(1.0));
    CHECK(chordal_distance(cw(1, 0), cw(r2, r2)) == Approx(0.7071068).epsilon(1e-7));
}

TEST_CASE("chordal distance rejects non-unit raw vectors") {
    const CVec2 a{cplx(1.0), cplx(0.0)};
    const CVec2 b{cplx(1.0), cplx(1e-4)};
    CHECK_THROWS_AS(chordal_distance(a, b), Error);
    try {
        chordal_distance(a, b);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvalidInput);
    }
    CHECK_THROWS_AS(Codeword::from_unit(2.0, 0.0), Error);
}

TEST_CASE("chordal distance is symmetric, bounded and phase invariant") {
    std::mt19937_64 g(7);
    for (int k = 0; k < 500; ++k) {
        const auto a = oracle::random_unit(g), b = oracle::random_unit(g);
        const auto ca = cw(a[0], a[1]), cb = cw(b[0], b[1]);
        const double d = chordal_distance(ca, cb);
        CHECK(d >= 0.0);
        CHECK(d <= 1.0);
        CHECK(d == Approx(chordal_distance(cb, ca)).epsilon(1e-14));
        CHECK(d == Approx(oracle::chordal(a, b)).epsilon(1e-9));
        const cplx ph = std::polar(1.0, 0.3 * k);
        CHECK(chordal_distance(cw(ph * a[0], ph * a[1]), cb) == Approx(d).epsilon(1e-12));
    }
}

TEST_CASE("euclidean distance examples") {
    CHECK(euclidean_distance(BlochPoint(0, 0, 1), BlochPoint(0, 0, 1)) == Approx(0.0));
    CHECK(euclidean_distance(BlochPoint(0, 0, 1), BlochPoint(0, 0, -1)) == Approx(2.0));
    CHECK(euclidean_distance(BlochPoint(1, 0, 0), BlochPoint(0, 1, 0)) == Approx(1.4142136).epsilon(1e-7));
    CHECK_THROWS_AS(BlochPoint(1, 1, 0), Error);
}

TEST_CASE("angles to codeword") {
    auto c = angles_to_codeword({0.0, 1.234});
    CHECK(c.c0() == Approx(1.0));
    CHECK(std::abs(c.c1()) == Approx(0.0));
    c = angles_to_codeword({oracle::pi / 2, 0.0});
    CHECK(c.c0() == Approx(0.7071068).epsilon(1e-7));
    CHECK(c.c1().real() == Approx(0.7071068).epsilon(1e-7));
    c = angles_to_codeword({oracle::pi / 2, oracle::pi / 2});
    CHECK(c.c0() == Approx(0.7071068).epsilon(1e-7));
    CHECK(c.c1().real() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(c.c1().imag() == Approx(0.7071068).epsilon(1e-7));
}

TEST_CASE("codeword to bloch examples") {
    auto [p, a] = codeword_to_bloch(cw(1, 0));
    CHECK(p.z() == Approx(1.0));
    CHECK(a.theta == Approx(0.0));
    std::tie(p, a) = codeword_to_bloch(cw(0, 1));
    CHECK(p.z() == Approx(-1.0));
    CHECK(a.theta == Approx(oracle::pi));
    CHECK(a.phi == 0.0);
    std::tie(p, a) = codeword_to_bloch(cw(r2, cplx(0, r2)));
    CHECK(p.x() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(p.y() == Approx(1.0));
    CHECK(a.theta == Approx(oracle::pi / 2));
    CHECK(a.phi == Approx(oracle::pi / 2));
}

TEST_CASE("raw codeword_to_bloch clamps rounding and rejects negative c0") {
    const CVec2 slightly{cplx(-1e-12), cplx(1.0)};
    CHECK(codeword_to_bloch(slightly).first.z() == Approx(-1.0));
    const CVec2 negative{cplx(-0.6), cplx(0.8)};
    CHECK_THROWS_AS(codeword_to_bloch(negative), Error);
}

TEST_CASE("distance identity d_E = 2 d_c against independent Bloch map") {
    std::mt19937_64 g(11);
    for (int k = 0; k < 10000; ++k) {
        const auto a = oracle::random_unit(g), b = oracle::random_unit(g);
        const auto ca = cw(a[0], a[1]), cb = cw(b[0], b[1]);
        const double de = euclidean_distance(codeword_to_bloch(ca).first, codeword_to_bloch(cb).first);
        REQUIRE(std::abs(de - 2.0 * chordal_distance(ca, cb)) < 1e-12);
        REQUIRE(std::abs(de - oracle::dist(oracle::bloch(a), oracle::bloch(b))) < 1e-12);
    }
}

TEST_CASE("angle round trip away from the poles") {
    std::mt19937_64 g(3);
    std::uniform_real_distribution<double> th(1e-6, oracle::pi - 1e-6), ph(0.0, 2 * oracle::pi);
    for (int k = 0; k < 2000; ++k) {
        const SphericalAngles a{th(g), ph(g)};
        const auto b = codeword_to_bloch(angles_to_codeword(a)).second;
        CHECK(std::abs(b.theta - a.theta) < 1e-12);
        double dphi = std::abs(b.phi - a.phi);
        dphi = std::min(dphi, 2 * oracle::pi - dphi);
        CHECK(dphi < 1e-9);
    }
}

TEST_CASE("normalize_received") {
    auto c = normalize_received({cplx(0, 2), cplx(0, 2)});
    CHECK(c.c0() == Approx(0.7071068).epsilon(1e-7));
    CHECK(c.c1().real() == Approx(0.7071068).epsilon(1e-7));
    CHECK(c.c1().imag() == doctest::Approx(0.0).epsilon(1e-12));
    c = normalize_received({cplx(3), cplx(0)});
    CHECK(c == cw(1, 0));
    c = normalize_received({cplx(0), cplx(0, 5)});
    CHECK(c.c0() == 0.0);
    CHECK(c.c1().real() == Approx(0.0));
    CHECK(c.c1().imag() == Approx(1.0));
    CHECK_THROWS_AS(normalize_received({cplx(0), cplx(0)}), Error);
}

TEST_CASE("normalize_received is idempotent on canonical codewords") {
    std::mt19937_64 g(5);
    for (int k = 0; k < 200; ++k) {
        const auto a = oracle::random_unit(g);
        const auto c = cw(a[0], a[1]);
        const auto n = normalize_received(c.vec());
        CHECK(n.c0() == Approx(c.c0()).epsilon(1e-15));
        CHECK(std::abs(n.c1() - c.c1()) < 1e-15);
    }
}

TEST_CASE("fejes toth bound") {
    CHECK(fejes_toth_bound(3) == Approx(std::sqrt(3.0) / 2).epsilon(1e-12));
    CHECK(fejes_toth_bound(4) == Approx(std::sqrt(6.0) / 3).epsilon(1e-12));
    // Icosahedron: chordal distance between adjacent vertices, via the oracle.
    const double g = 0.5 * (1 + std::sqrt(5.0)), n = std::sqrt(1 + g * g);
    std::vector<oracle::P3> ico;
    for (double a : {1.0, -1.0})
        for (double b : {g, -g}) {
            ico.push_back({0, a / n, b / n});
            ico.push_back({a / n, b / n, 0});
            ico.push_back({b / n, 0, a / n});
        }
    CHECK(fejes_toth_bound(12) == Approx(0.5 * oracle::min_pairwise(ico)).epsilon(1e-12));
    CHECK(fejes_toth_bound(12) == Approx(0.5257311).epsilon(1e-7));
    CHECK_THROWS_AS(fejes_toth_bound(2), Error);
    double prev = 1.0;
    for (std::size_t c = 3; c < 5000; ++c) {
        const double b = fejes_toth_bound(c);
        CHECK(b < prev);
        prev = b;
    }
}

TEST_CASE("constellation invariants") {
    CHECK_THROWS_AS(Constellation({}, Method::External), Error);
    CHECK_THROWS_AS(Constellation({cw(1, 0), cw(cplx(0, 1), 0)}, Method::External), Error);
    Constellation x({cw(1, 0), cw(0, 1)}, Method::External);
    CHECK(x.bits() == 1);
    CHECK(min_chordal_distance(x) == Approx(1.0));
    Constellation y({cw(1, 0), cw(0, 1), cw(r2, r2)}, Method::External);
    CHECK_FALSE(y.bits().has_value());
    CHECK_THROWS_AS(min_chordal_distance(std::vector<Codeword>{cw(1, 0)}), Error);
    CHECK(parse_method("cube-split") == Method::CubeSplit);
    CHECK(to_string(Method::GrassLattice) == "grass-lattice");
    CHECK_THROWS_AS(parse_method("nope"), Error);
}

TEST_CASE("min_chordal_distance large-set path matches brute force") {
    std::mt19937_64 g(9);
    std::vector<Codeword> cws;
    std::vector<oracle::V2> raws;
    for (int k = 0; k < 700; ++k) {
        const auto a = oracle::random_unit(g);
        cws.push_back(cw(a[0], a[1]));
        raws.push_back(raw(cws.back()));
    }
    CHECK(min_chordal_distance(cws) == Approx(oracle::min_chordal(raws)).epsilon(1e-12));
}
