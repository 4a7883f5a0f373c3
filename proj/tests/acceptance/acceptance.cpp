// Acceptance checks. One PASS/FAIL line per criterion; exit status is nonzero if any fails.

#include "blochgrass/channel.hpp"
#include "blochgrass/constellations.hpp"
#include "blochgrass/detectors.hpp"
#include "blochgrass/error.hpp"
#include "blochgrass/packing.hpp"
#include "blochgrass/zopt.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace blochgrass;

namespace {

constexpr double pi = 3.14159265358979323846;
using V2 = std::array<std::complex<double>, 2>;
using P3 = std::array<double, 3>;

// Independent oracles.

P3 bloch(const V2& v) {
    const auto p = std::conj(v[0]) * v[1];
    return {2 * p.real(), 2 * p.imag(), std::norm(v[0]) - std::norm(v[1])};
}

double dist(const P3& a, const P3& b) {
    return std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) + (a[2] - b[2]) * (a[2] - b[2]));
}

double chordal(const V2& a, const V2& b) {
    return std::sqrt(std::max(0.0, 1.0 - std::norm(std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1])));
}

V2 raw(const Codeword& c) { return {std::complex<double>(c.c0()), c.c1()}; }

double all_pairs_min(const Constellation& x) {
    double m = 2.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i + 1; j < x.size(); ++j) m = std::min(m, chordal(raw(x[i]), raw(x[j])));
    return m;
}

double tammes_bound(double c) {
    const double s = 1.0 / std::sin(pi * c / (6.0 * (c - 2.0)));
    return 0.5 * std::sqrt(4.0 - s * s);
}

V2 random_unit(std::mt19937_64& g) {
    std::normal_distribution<double> n;
    V2 v{std::complex<double>(n(g), n(g)), std::complex<double>(n(g), n(g))};
    const double s = std::sqrt(std::norm(v[0]) + std::norm(v[1]));
    return {v[0] / s, v[1] / s};
}

// Reporting.

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
};

int failures = 0;

void run(int id, const std::string& name, const std::function<void(Outcome&)>& body) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(o);
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail << " exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::printf("%s %d %s (%.1f s)%s\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), secs, o.detail.str().c_str());
    std::fflush(stdout);
}

Constellation s_opt(std::size_t c) {
    if (c == 2 || c == 3 || c == 4 || c == 6 || c == 12) return build_s_opt(exact_packing(c));
    return build_s_opt(optimize_packing(c, 1).packing);
}

Constellation family(const std::string& f, int b) {
    if (f == "s-opt") return s_opt(std::size_t{1} << b);
    if (f == "z-opt") return build_z_opt(b).constellation;
    if (f == "man-opt") return build_man_opt(std::size_t{1} << b, 2);
    if (f == "exp-map") return build_exp_map_bits(b);
    if (f == "cube-split") return build_cube_split(b);
    return build_grass_lattice(b / 2);
}

const std::vector<std::string> kFamilies{"s-opt", "z-opt", "man-opt", "exp-map", "cube-split", "grass-lattice"};

// Free polar angles per B.
const int kNv[17] = {0, 1, 1, 1, 2, 2, 4, 4, 8, 16, 16, 32, 32, 64, 64, 128, 128};

} // namespace

int main() {
    run(1, "distance identity d_E = 2 d_c", [](Outcome& o) {
        std::mt19937_64 g(20);
        double worst = 0.0;
        for (int k = 0; k < 10000; ++k) {
            const auto a = random_unit(g), b = random_unit(g);
            const auto ca = Codeword::from_unit(a[0], a[1]), cb = Codeword::from_unit(b[0], b[1]);
            const double de = euclidean_distance(codeword_to_bloch(ca).first, codeword_to_bloch(cb).first);
            worst = std::max(worst, std::abs(de - 2.0 * chordal_distance(ca, cb)));
            worst = std::max(worst, std::abs(de - 2.0 * chordal(a, b)));
            worst = std::max(worst, std::abs(de - dist(bloch(a), bloch(b))));
        }
        o.pass = worst <= 1e-12;
        o.detail << " max deviation " << worst;
    });

    run(2, "bound attainment", [](Outcome& o) {
        double worst = 0.0;
        for (std::size_t c : {3u, 4u, 6u, 12u}) {
            const auto x = build_s_opt(exact_packing(c));
            worst = std::max(worst, std::abs(all_pairs_min(x) - tammes_bound(static_cast<double>(c))));
        }
        const double expect[3] = {1.0, std::sqrt(6.0) / 3.0, std::sqrt((4.0 - std::sqrt(2.0)) / 7.0)};
        for (int b = 1; b <= 3; ++b) worst = std::max(worst, std::abs(all_pairs_min(build_z_opt(b).constellation) - expect[b - 1]));
        o.pass = worst <= 1e-9;
        o.detail << " max deviation " << worst;
    });

    run(3, "bound compliance, six methods, B <= 10", [](Outcome& o) {
        double worst = -1.0;
        std::string at;
        for (const auto& f : kFamilies)
            for (int b = 2; b <= 10; ++b) {
                if (f == "grass-lattice" && b % 2) continue;
                const auto x = family(f, b);
                const double gap = min_chordal_distance(x) - fejes_toth_bound(x.size());
                if (gap > worst) {
                    worst = gap;
                    at = f + " B=" + std::to_string(b);
                }
            }
        o.pass = worst <= 1e-9;
        o.detail << " max d_min - bound " << worst << " at " << at;
    });

    run(4, "z-opt near-optimality", [](Outcome& o) {
        o.detail << " ratios";
        for (int b = 4; b <= 8; ++b) {
            const auto z = build_z_opt(b);
            const double r = min_chordal_distance(z.constellation) / fejes_toth_bound(z.constellation.size());
            o.detail << " B" << b << "=" << r;
            if (r < 0.90) o.pass = false;
        }
        double worst = 0.0;
        for (int b = 1; b <= 12; ++b) {
            const auto z = build_z_opt(b);
            const std::vector<double> free(z.theta.begin(), z.theta.begin() + z.structure.n_v);
            const double cand = candidate_distances(free, z.structure).min() / 2.0;
            worst = std::max(worst, std::abs(cand - all_pairs_min(z.constellation)));
        }
        o.pass = o.pass && worst <= 1e-12;
        o.detail << "; candidate vs all-pairs " << worst;
    });

    run(5, "s-opt detector equals glrt", [](Outcome& o) {
        std::uint64_t mism = 0, trials = 0;
        for (const auto& f : kFamilies)
            for (int b : {4, 6}) {
                const auto x = family(f, b);
                const auto g = make_detector(DetectorKind::Glrt, x);
                const auto s = make_detector(DetectorKind::SOpt, x);
                for (int n : {1, 2, 4})
                    for (double snr : {0.0, 10.0, 20.0}) {
                        const auto a = compare_detectors(x, *g, *s, 100000, n, snr, 500 + b);
                        mism += a.mismatches;
                        trials += a.trials;
                    }
            }
        o.pass = mism == 0;
        o.detail << " " << mism << " mismatches in " << trials << " trials";
    });

    run(6, "z-opt detector equals glrt, at most 4 distances", [](Outcome& o) {
        std::uint64_t mism = 0, trials = 0, evals = 0;
        for (int b = 1; b <= 12; ++b) {
            const auto z = build_z_opt(b);
            const ZOptDetectorState st(z);
            const auto g = make_detector(DetectorKind::Glrt, z.constellation);
            const auto d = make_detector(DetectorKind::ZOpt, z.constellation, &st);
            for (int n : {1, 2, 4})
                for (double snr : {0.0, 10.0, 20.0}) {
                    const auto a = compare_detectors(z.constellation, *g, *d, 100000, n, snr, 600 + b);
                    mism += a.mismatches;
                    trials += a.trials;
                    evals = std::max(evals, a.max_distance_evals_b);
                }
        }
        o.pass = mism == 0 && evals <= 4;
        o.detail << " " << mism << " mismatches in " << trials << " trials, max distance_evals " << evals;
    });

    run(7, "complexity counters", [](Outcome& o) {
        std::vector<double> lc, cmp;
        bool glrt_ok = true;
        std::uint64_t zmax = 0;
        for (int b = 4; b <= 12; ++b) {
            const auto z = build_z_opt(b);
            const auto x = s_opt(std::size_t{1} << b);
            const ZOptDetectorState st(z);
            const auto g = make_detector(DetectorKind::Glrt, x);
            const auto s = make_detector(DetectorKind::SOpt, x);
            const auto rows = bench_detectors(x, {g.get(), s.get()}, 20000, 2, 700 + b);
            glrt_ok = glrt_ok && rows[0].mean_distance_evals == static_cast<double>(x.size());
            lc.push_back(b);
            cmp.push_back(rows[1].mean_comparisons);
            const auto zd = make_detector(DetectorKind::ZOpt, z.constellation, &st);
            zmax = std::max(zmax, bench_detectors(z.constellation, {zd.get()}, 20000, 2, 700 + b)[0].max_distance_evals);
        }
        // Least-squares fit cmp = a + b log2 C.
        const double n = static_cast<double>(lc.size());
        const double mx = std::accumulate(lc.begin(), lc.end(), 0.0) / n, my = std::accumulate(cmp.begin(), cmp.end(), 0.0) / n;
        double sxy = 0, sxx = 0;
        for (std::size_t k = 0; k < lc.size(); ++k) {
            sxy += (lc[k] - mx) * (cmp[k] - my);
            sxx += (lc[k] - mx) * (lc[k] - mx);
        }
        const double slope = sxy / sxx, icpt = my - slope * mx;
        double resid = 0;
        for (std::size_t k = 0; k < lc.size(); ++k) resid = std::max(resid, std::abs(icpt + slope * lc[k] - cmp[k]) / cmp[k]);
        o.pass = glrt_ok && resid < 0.20 && zmax <= 4;
        o.detail << " glrt evals = C " << (glrt_ok ? "yes" : "no") << "; sopt comparisons " << icpt << " + " << slope
                 << " log2 C, max relative residual " << resid << "; z-opt max distance_evals " << zmax;
    });

    run(8, "construction-cost counts", [](Outcome& o) {
        bool ok = true;
        for (int b = 1; b <= 16; ++b) {
            const auto s = zopt_structure(b);
            ok = ok && s.n_v == kNv[b];
            if (b >= 4) {
                const std::size_t expect = 2 * kNv[b] + ((b == 5 || b == 7) ? 3 : 0);
                ok = ok && candidate_count(s) == expect;
                const auto r = optimize_zopt(s, {}, 1);
                ok = ok && r.angles.size() == static_cast<std::size_t>(kNv[b]);
                ok = ok && r.objective_calls > 0 && r.distance_evals == r.objective_calls * expect;
            }
        }
        for (int b : {2, 4, 6}) {
            const std::size_t c = std::size_t{1} << b;
            const auto x = build_man_opt(c, 3);
            std::uint64_t evals = 0;
            manopt_objective(x.codewords(), 0.01, &evals);
            ok = ok && evals == c * (c - 1) / 2;
        }
        o.pass = ok;
        o.detail << " z-opt n_v and per-call evaluations for B = 1..16; all-pairs objective C(C-1)/2";
    });

    run(9, "ser ordering and monotonicity", [](Outcome& o) {
        const std::uint64_t trials = 200000;
        std::map<std::string, SerPoint> at20;
        bool mono = true;
        for (const std::string f : {"s-opt", "z-opt", "cube-split", "exp-map"}) {
            const auto x = family(f, 6);
            const auto g = make_detector(DetectorKind::Glrt, x);
            const auto c = run_ser(x, *g, {{0, 5, 10, 15, 20}, trials, 2, 900});
            for (std::size_t k = 1; k < c.points.size(); ++k) mono = mono && c.points[k].errors <= c.points[k - 1].errors;
            at20[f] = c.points.back();
        }
        auto sigma = [](const SerPoint& p) { return std::sqrt(p.ser * (1 - p.ser) / static_cast<double>(p.trials)); };
        // a below b with both 3-sigma bars separated.
        auto below = [&](const std::string& a, const std::string& b) {
            return at20[a].ser + 3 * sigma(at20[a]) <= at20[b].ser - 3 * sigma(at20[b]);
        };
        const bool order = below("s-opt", "z-opt") && below("z-opt", "cube-split") && below("s-opt", "exp-map");
        o.pass = mono && order;
        o.detail << " monotone " << (mono ? "yes" : "no") << "; SER at 20 dB:";
        for (const auto& [f, p] : at20) o.detail << " " << f << "=" << p.ser << "+-" << 3 * sigma(p);
    });

    run(10, "z-opt cell table against brute-force voronoi", [](Outcome& o) {
        std::uint64_t cells = 0, bad_layer = 0, bad_glrt = 0;
        for (int b = 1; b <= 8; ++b) {
            const auto z = build_z_opt(b);
            const ZOptDetectorState st(z);
            const auto& s = z.structure;
            const int w = 2 * s.z_max, l = s.layers;
            std::vector<P3> pts;
            for (const auto& c : z.constellation.codewords()) pts.push_back(bloch(raw(c)));
            std::vector<double> edges{0.0};
            edges.insert(edges.end(), z.theta.begin(), z.theta.end());
            edges.push_back(pi);
            const int samples = 12;
            for (int i = 0; i <= l; ++i)
                for (int j = 0; j < w; ++j) {
                    ++cells;
                    const int lo = std::max(1, i - 1), hi = std::min(i + 2, l);
                    for (int a = 0; a < samples; ++a)
                        for (int c = 0; c < samples; ++c) {
                            const double th = edges[i] + (edges[i + 1] - edges[i]) * (a + 0.5) / samples;
                            const double ph = (j + (c + 0.5) / samples) * pi / s.z_max;
                            const P3 q{std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
                            // Nearest codeword within each candidate layer.
                            for (int ic = lo; ic <= hi; ++ic) {
                                const std::size_t off = z.layer_offsets[ic - 1], sz = s.layer_sizes[ic - 1];
                                std::size_t best = off;
                                for (std::size_t k = off; k < off + sz; ++k)
                                    if (dist(q, pts[k]) < dist(q, pts[best]) - 1e-12) best = k;
                                if (best != st.cell_index(ic, j)) ++bad_layer;
                            }
                            // Global nearest over all codewords lies among the candidates.
                            std::size_t g = 0;
                            for (std::size_t k = 0; k < pts.size(); ++k)
                                if (dist(q, pts[k]) < dist(q, pts[g]) - 1e-12) g = k;
                            bool found = false;
                            for (int ic = lo; ic <= hi; ++ic) found = found || st.cell_index(ic, j) == g;
                            if (!found) ++bad_glrt;
                        }
                }
        }
        o.pass = bad_layer == 0 && bad_glrt == 0;
        o.detail << " " << cells << " cells; per-layer disagreements " << bad_layer << ", global nearest outside candidates "
                 << bad_glrt;
    });

    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
