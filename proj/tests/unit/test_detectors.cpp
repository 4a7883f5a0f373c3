#include "blochgrass/channel.hpp"
#include "blochgrass/constellations.hpp"
#include "blochgrass/detectors.hpp"
#include "blochgrass/error.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace blochgrass;
using doctest::Approx;

namespace {

std::vector<oracle::V2> raws(const Constellation& x) {
    std::vector<oracle::V2> out;
    for (const auto& c : x.codewords()) out.push_back({cplx(c.c0()), c.c1()});
    return out;
}

ReceivedBlock rank_one(const Codeword& x, const std::vector<cplx>& h) {
    ReceivedBlock y;
    for (auto hn : h) y.push_back({std::sqrt(2.0) * x.c0() * hn, std::sqrt(2.0) * x.c1() * hn});
    return y;
}

} // namespace

TEST_CASE("rough estimate") {
    const ReceivedBlock one{{cplx(1), cplx(0, 1)}};
    const auto e = rough_estimate(one);
    CHECK(e[0] == cplx(1));
    CHECK(e[1] == cplx(0, 1));
    const auto x = Codeword::from_unit(cplx(0.6), cplx(0.48, -0.64));
    for (int n : {1, 2, 3, 4}) {
        std::vector<cplx> h;
        for (int k = 0; k < n; ++k) h.push_back(std::polar(0.5 + k, 0.7 * k + 0.2));
        const auto u = rough_estimate(rank_one(x, h));
        const double nu = std::sqrt(std::norm(u[0]) + std::norm(u[1]));
        const double ip = std::abs(std::conj(u[0]) * x.c0() + std::conj(u[1]) * x.c1()) / nu;
        CHECK(ip == Approx(1.0).epsilon(1e-12));
        const auto p = codeword_to_bloch(normalize_received(u)).first;
        const auto q = codeword_to_bloch(x).first;
        CHECK(euclidean_distance(p, q) < 1e-9);
    }
    const ReceivedBlock eye{{cplx(1), cplx(0)}, {cplx(0), cplx(1)}};
    const auto t = rough_estimate(eye);
    CHECK(t[0] == cplx(1));
    CHECK(t[1] == cplx(0));
    CHECK_THROWS_AS(rough_estimate(ReceivedBlock{{cplx(0), cplx(0)}, {cplx(0), cplx(0)}}), Error);
    CHECK_THROWS_AS(rough_estimate(ReceivedBlock{}), Error);
}

TEST_CASE("rough estimate is the dominant eigenvector") {
    std::mt19937_64 g(2);
    std::normal_distribution<double> n;
    for (int k = 0; k < 300; ++k) {
        ReceivedBlock y(2 + k % 3);
        for (auto& c : y) c = {cplx(n(g), n(g)), cplx(n(g), n(g))};
        const auto u = rough_estimate(y);
        // Compare x^H Y Y^H x with the largest over a dense set of directions.
        auto energy = [&](const oracle::V2& v) {
            double s = 0;
            for (const auto& c : y) s += std::norm(std::conj(c[0]) * v[0] + std::conj(c[1]) * v[1]);
            return s;
        };
        const double eu = energy({u[0], u[1]});
        for (int r = 0; r < 50; ++r) CHECK(energy(oracle::random_unit(g)) <= eu * (1 + 1e-12));
    }
}

TEST_CASE("glrt examples") {
    const auto poles = build_s_opt(exact_packing(2));
    CHECK(glrt_detect(ReceivedBlock{{cplx(1), cplx(0.1)}}, poles).index == 0);
    const auto x = build_s_opt(exact_packing(12));
    for (std::size_t i = 0; i < x.size(); ++i) {
        const auto r = glrt_detect(rank_one(x[i], {cplx(0.3, -1.1), cplx(0.2)}), x);
        CHECK(r.index == i);
        CHECK(r.distance_evals == x.size());
    }
    // Equidistant from both poles: lowest index.
    const Constellation exact({Codeword::from_unit(1, 0), Codeword::from_unit(0, 1)}, Method::External);
    const ReceivedBlock mid{{cplx(1), cplx(1)}};
    CHECK(glrt_detect(mid, exact).index == 0);
    NearestNeighborIndex nn(exact);
    CHECK(sopt_detect(mid, nn).index == 0);
}

TEST_CASE("glrt and sopt agree with the oracle on noisy data") {
    for (const auto& x : {build_s_opt(optimize_packing(64, 1).packing), build_cube_split(6), build_exp_map_bits(5)}) {
        NearestNeighborIndex nn(x);
        const auto rx = raws(x);
        for (std::uint64_t t = 0; t < 3000; ++t) {
            const auto tr = draw_trial(x, 1 + static_cast<int>(t % 3), snr_db_to_sigma2(5.0), 77, t);
            const auto g = glrt_detect(tr.y, x);
            std::vector<oracle::V2> yo;
            for (const auto& c : tr.y) yo.push_back({c[0], c[1]});
            CHECK(g.index == oracle::glrt(yo, rx));
            CHECK(sopt_detect(tr.y, nn).index == g.index);
        }
    }
}

TEST_CASE("zopt regions") {
    CHECK(zopt_region_j(0.0, 8) == 0);
    CHECK(zopt_region_j(0.5, 8) == 1);
    CHECK(zopt_region_j(2 * oracle::pi - 1e-12, 8) == 15);
    CHECK(zopt_region_j(2 * oracle::pi, 8) == 0);
    const std::vector<double> th{0.5, 1.2, 1.94, 2.64};
    std::uint64_t cmp = 0;
    CHECK(zopt_region_i(0.1, th, &cmp) == 0);
    CHECK(zopt_region_i(3.0, th) == 4);
    CHECK(zopt_region_i(1.0, th) == 1);
    for (std::size_t l : {1u, 2u, 7u, 64u, 256u}) {
        std::vector<double> t(l);
        for (std::size_t k = 0; k < l; ++k) t[k] = (k + 1.0) * oracle::pi / (l + 1);
        for (double q = 0.01; q < oracle::pi; q += 0.013) {
            std::uint64_t c = 0;
            const int i = zopt_region_i(q, t, &c);
            CHECK(i == std::count_if(t.begin(), t.end(), [&](double v) { return v < q; }));
            CHECK(c <= static_cast<std::uint64_t>(std::ceil(std::log2(l + 1.0))));
        }
    }
}

TEST_CASE("cell formulas") {
    CHECK(zopt_cell::f(1, 1) == 1);
    CHECK(zopt_cell::f(1, 2) == 0);
    CHECK(zopt_cell::f(0, 1) == 1);
    CHECK(zopt_cell::f(2, 4) == 1);
    CHECK(zopt_cell::g(1) == 1);
    CHECK(zopt_cell::g(2) == 2);
    CHECK(zopt_cell::g(3) == -1);
    CHECK(zopt_cell::g(4) == 0);
    const auto s4 = zopt_structure(4);
    // Region (i = 1, first azimuth cell) belongs to codeword number 1.
    CHECK(zopt_cell::T(s4, 1, 1) == 1);
    ZOptDetectorState st(s4, {0.6, 1.2, oracle::pi - 1.2, oracle::pi - 0.6});
    CHECK(st.cell_index(1, 0) == 0);
    CHECK(st.cell_index(0, 7) == 0);
    CHECK(st.cell_index(2, 0) == 4);
}

TEST_CASE("closed-form cell table equals the geometric table") {
    for (int b = 1; b <= 12; ++b) {
        const auto z = build_z_opt(b);
        ZOptDetectorState st(z);
        const auto table = st.reference_table(z.constellation);
        const int w = 2 * z.structure.z_max;
        int bad = 0;
        for (int i = 0; i <= z.structure.layers; ++i)
            for (int j = 0; j < w; ++j) bad += table[i * w + j] != st.cell_index(i, j);
        CHECK_MESSAGE(bad == 0, "B = " << b);
    }
}

TEST_CASE("zopt detector recovers every noiseless codeword") {
    for (int b = 1; b <= 12; ++b) {
        const auto z = build_z_opt(b);
        ZOptDetectorState st(z);
        std::uint64_t max_evals = 0;
        int wrong = 0;
        for (std::size_t i = 0; i < z.constellation.size(); ++i) {
            const auto r = zopt_detect(rank_one(z.constellation[i], {cplx(0.8, 0.3)}), st);
            wrong += r.index != i;
            max_evals = std::max(max_evals, r.distance_evals);
        }
        CHECK_MESSAGE(wrong == 0, "B = " << b);
        CHECK(max_evals <= 4);
    }
}

TEST_CASE("zopt detector matches glrt on noisy half-layer structures") {
    for (int b : {5, 7}) {
        const auto z = build_z_opt(b);
        ZOptDetectorState st(z);
        const auto glrt = make_detector(DetectorKind::Glrt, z.constellation);
        const auto zd = make_detector(DetectorKind::ZOpt, z.constellation, &st);
        for (double snr : {0.0, 10.0, 20.0}) {
            const auto a = compare_detectors(z.constellation, *glrt, *zd, 20000, 2, snr, 5, 1);
            CHECK(a.mismatches == 0);
            CHECK(a.max_distance_evals_b <= 4);
        }
    }
}

TEST_CASE("detector factory") {
    const auto z = build_z_opt(4);
    ZOptDetectorState st(z);
    CHECK(make_detector(DetectorKind::SOpt, z.constellation)->kind() == DetectorKind::SOpt);
    CHECK_THROWS_AS(make_detector(DetectorKind::ZOpt, z.constellation), Error);
    const auto other = build_z_opt(3);
    CHECK_THROWS_AS(make_detector(DetectorKind::ZOpt, other.constellation, &st), Error);
    CHECK(parse_detector("zopt") == DetectorKind::ZOpt);
    CHECK_THROWS_AS(parse_detector("ml"), Error);
    CHECK_THROWS_AS(ZOptDetectorState(zopt_structure(4), {0.1, 0.2}), Error);
}
