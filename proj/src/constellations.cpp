#include "blochgrass/constellations.hpp"

#include "blochgrass/error.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace blochgrass {

Constellation build_s_opt(const PackingSet& packing) {
    std::vector<Codeword> codewords;
    codewords.reserve(packing.size());
    for (const auto& p : packing.points()) codewords.push_back(bloch_to_codeword(p));
    return Constellation(std::move(codewords), Method::SOpt);
}

Constellation build_man_opt(std::size_t count, std::uint64_t seed, const PackingConfig& config) {
    return build_s_opt(optimize_packing(count, seed, config).packing).retagged(Method::ManOpt);
}

double manopt_objective(std::span<const Codeword> codewords, double epsilon, std::uint64_t* evaluations) {
    if (!(epsilon > 0.0)) fail(ErrorKind::InvalidConfig, "smoothing parameter must be positive");
    std::vector<double> terms;
    terms.reserve(codewords.size() * (codewords.size() - 1) / 2);
    for (std::size_t i = 0; i < codewords.size(); ++i)
        for (std::size_t j = i + 1; j < codewords.size(); ++j) {
            const auto a = codewords[i], b = codewords[j];
            const cplx inner = a.c0() * b.c0() + std::conj(a.c1()) * b.c1();
            terms.push_back(std::abs(inner) / epsilon);
        }
    if (evaluations) *evaluations += terms.size();
    if (terms.empty()) return -std::numeric_limits<double>::infinity();
    const double peak = *std::max_element(terms.begin(), terms.end());
    double sum = 0.0;
    for (double t : terms) sum += std::exp(t - peak);
    return peak + std::log(sum);
}

Codeword exp_map_codeword(cplx v) {
    const double rho = std::abs(v);
    if (!(rho < kPi / 2)) {
        std::ostringstream os;
        os << "exp-map symbol magnitude " << rho << " is outside the invertible range [0, pi/2)";
        fail(ErrorKind::Domain, os.str());
    }
    const double sinc = rho > 0.0 ? std::sin(rho) / rho : 1.0;
    return Codeword::from_unit(cplx(std::cos(rho), 0.0), -sinc * v);
}

Constellation build_exp_map(std::span<const cplx> symbols) {
    std::vector<Codeword> codewords;
    codewords.reserve(symbols.size());
    for (auto v : symbols) codewords.push_back(exp_map_codeword(v));
    return Constellation(std::move(codewords), Method::ExpMap);
}

std::vector<cplx> psk_symbols(std::size_t n, double radius) {
    std::vector<cplx> out;
    for (std::size_t k = 0; k < n; ++k) out.push_back(std::polar(radius, kTwoPi * static_cast<double>(k) / static_cast<double>(n)));
    return out;
}

std::vector<cplx> qam_symbols(std::size_t nx, std::size_t ny, double step_re, double step_im) {
    std::vector<cplx> out;
    for (std::size_t iy = 0; iy < ny; ++iy)
        for (std::size_t ix = 0; ix < nx; ++ix)
            out.emplace_back(step_re * (static_cast<double>(ix) - 0.5 * static_cast<double>(nx - 1)),
                             step_im * (static_cast<double>(iy) - 0.5 * static_cast<double>(ny - 1)));
    return out;
}

namespace {

double exp_map_dmin(const std::vector<cplx>& symbols) {
    std::vector<Codeword> cw;
    cw.reserve(symbols.size());
    for (auto v : symbols) {
        if (!(std::abs(v) < kPi / 2)) return -1.0;
        cw.push_back(exp_map_codeword(v));
    }
    return min_chordal_distance(cw);
}

} // namespace

ExpMapDesign design_exp_map_psk(std::size_t n, double resolution) {
    if (n < 2) fail(ErrorKind::InvalidInput, "PSK needs at least two symbols");
    ExpMapDesign best;
    best.d_min = -1.0;
    const auto steps = static_cast<int>(std::floor((kPi / 2) / resolution));
    for (int k = 1; k < steps; ++k) {
        const double r = k * resolution;
        const double d = exp_map_dmin(psk_symbols(n, r));
        if (d > best.d_min) {
            best.d_min = d;
            best.radius = r;
        }
    }
    // Ternary refinement inside the winning grid cell.
    double a = std::max(resolution * 0.5, best.radius - resolution), b = std::min(kPi / 2 - 1e-12, best.radius + resolution);
    for (int it = 0; it < 60; ++it) {
        const double m1 = a + (b - a) / 3, m2 = b - (b - a) / 3;
        if (exp_map_dmin(psk_symbols(n, m1)) < exp_map_dmin(psk_symbols(n, m2)))
            a = m1;
        else
            b = m2;
    }
    const double r = 0.5 * (a + b);
    const double d = exp_map_dmin(psk_symbols(n, r));
    if (d > best.d_min) {
        best.d_min = d;
        best.radius = r;
    }
    best.symbols = psk_symbols(n, best.radius);
    return best;
}

ExpMapDesign design_exp_map_qam(std::size_t nx, std::size_t ny) {
    if (nx * ny < 2) fail(ErrorKind::InvalidInput, "QAM needs at least two symbols");
    const double hx = 0.5 * static_cast<double>(nx - 1), hy = 0.5 * static_cast<double>(ny - 1);
    // Largest spacing per axis keeping the corner inside the invertible disc.
    const double max_x = hx > 0 ? (kPi / 2) / hx : 1.0;
    const double max_y = hy > 0 ? (kPi / 2) / hy : 1.0;
    auto eval = [&](double sx, double sy) {
        if (hx == 0) sx = 0;
        if (hy == 0) sy = 0;
        return exp_map_dmin(qam_symbols(nx, ny, sx, sy));
    };
    ExpMapDesign best;
    best.d_min = -1.0;
    double cx = 0.5 * max_x, cy = 0.5 * max_y, wx = 0.5 * max_x, wy = 0.5 * max_y;
    const int grid = 20;
    for (int round = 0; round < 12; ++round) {
        for (int i = -grid; i <= grid; ++i)
            for (int j = -grid; j <= grid; ++j) {
                const double sx = cx + wx * i / grid, sy = cy + wy * j / grid;
                if (!(sx > 0) || !(sy > 0)) continue;
                const double d = eval(sx, sy);
                if (d > best.d_min) {
                    best.d_min = d;
                    best.step_re = sx;
                    best.step_im = sy;
                }
            }
        cx = best.step_re;
        cy = best.step_im;
        wx *= 0.25;
        wy *= 0.25;
        if (hx == 0) wx = 0;
        if (hy == 0) wy = 0;
    }
    if (hx == 0) best.step_re = 0;
    if (hy == 0) best.step_im = 0;
    best.symbols = qam_symbols(nx, ny, best.step_re, best.step_im);
    return best;
}

Constellation build_exp_map_bits(int bits) {
    if (bits < 1 || bits > 16) fail(ErrorKind::Unsupported, "exp-map supports 1 <= B <= 16");
    if (bits <= 2) return build_exp_map(design_exp_map_psk(std::size_t{1} << bits).symbols);
    const std::size_t nx = std::size_t{1} << ((bits + 1) / 2);
    const std::size_t ny = std::size_t{1} << (bits / 2);
    return build_exp_map(design_exp_map_qam(nx, ny).symbols);
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) fail(ErrorKind::Domain, "normal quantile needs p in (0, 1)");
    return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
}

Codeword cube_split_codeword(double a1, double a2, int cell) {
    if (cell != 0 && cell != 1) fail(ErrorKind::InvalidInput, "Cube-Split cell index must be 0 or 1 for T = 2");
    const cplx w(normal_quantile(a1), normal_quantile(a2));
    const double r2 = std::norm(w);
    cplx t(0.0, 0.0);
    if (r2 > 0.0) {
        const double e = std::exp(-0.5 * r2);
        t = std::sqrt((1.0 - e) / (1.0 + e)) * w / std::sqrt(r2);
    }
    const double n = std::sqrt(1.0 + std::norm(t));
    return cell == 0 ? Codeword::from_unit(1.0 / n, t / n) : Codeword::from_unit(t / n, 1.0 / n);
}

Constellation build_cube_split(int bits) {
    if (bits < 1 || bits > 20) fail(ErrorKind::Unsupported, "Cube-Split supports 1 <= B <= 20");
    const int rest = bits - 1;
    const int b1 = (rest + 1) / 2, b2 = rest / 2;
    const std::size_t n1 = std::size_t{1} << b1, n2 = std::size_t{1} << b2;
    std::vector<Codeword> codewords;
    codewords.reserve(std::size_t{1} << bits);
    for (int cell = 0; cell < 2; ++cell)
        for (std::size_t i = 0; i < n1; ++i)
            for (std::size_t j = 0; j < n2; ++j) {
                const double a1 = (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(2 * n1);
                const double a2 = (2.0 * static_cast<double>(j) + 1.0) / static_cast<double>(2 * n2);
                codewords.push_back(cube_split_codeword(a1, a2, cell));
            }
    return Constellation(std::move(codewords), Method::CubeSplit);
}

double grass_lattice_radial(double t) {
    if (t < 0.0) fail(ErrorKind::Domain, "grass_lattice_radial needs t >= 0");
    if (t == 0.0) return 1.0;
    return std::sqrt(-std::expm1(-t * t)) / t;
}

Codeword grass_lattice_codeword(double a, double b) {
    // Quantile of N(0, 1/2).
    const cplx z(normal_quantile(a) / std::sqrt(2.0), normal_quantile(b) / std::sqrt(2.0));
    const cplx w = z * grass_lattice_radial(std::abs(z));
    return Codeword::from_unit(cplx(std::sqrt(1.0 - std::norm(w)), 0.0), w);
}

Constellation build_grass_lattice(int bits_per_axis, double alpha) {
    if (!(alpha > 0.0 && alpha < 0.5)) fail(ErrorKind::InvalidConfig, "Grass-Lattice alpha must lie in (0, 0.5)");
    if (bits_per_axis < 1 || bits_per_axis > 10) fail(ErrorKind::Unsupported, "Grass-Lattice supports 1 <= B_r <= 10");
    const std::size_t n = std::size_t{1} << bits_per_axis;
    std::vector<double> grid(n);
    for (std::size_t p = 0; p < n; ++p) grid[p] = alpha + static_cast<double>(p) * (1.0 - 2.0 * alpha) / static_cast<double>(n - 1);
    std::vector<Codeword> codewords;
    codewords.reserve(n * n);
    for (double a : grid)
        for (double b : grid) codewords.push_back(grass_lattice_codeword(a, b));
    return Constellation(std::move(codewords), Method::GrassLattice);
}

} // namespace blochgrass
