#pragma once

// Sphere-packing based construction plus the comparison baselines
// (manifold optimization, exponential map, Cube-Split, Grass-Lattice).

#include "blochgrass/geometry.hpp"
#include "blochgrass/packing.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace blochgrass {

/// Maps each packing point to its codeword; d_min is half the packing's minimum distance.
Constellation build_s_opt(const PackingSet& packing);

/// Maximin sphere packing converted to codewords (exact for G(2,1)).
Constellation build_man_opt(std::size_t count, std::uint64_t seed, const PackingConfig& config = {});

/// Smoothed all-pairs objective log sum exp(|x_i^H x_j| / epsilon) over the
/// codewords; `evaluations` receives C (C - 1) / 2.
double manopt_objective(std::span<const Codeword> codewords, double epsilon, std::uint64_t* evaluations = nullptr);

// --- Exp-Map ---------------------------------------------------------------

/// (cos rho, -(sin rho / rho) v) with rho = |v| < pi / 2, canonicalized.
Codeword exp_map_codeword(cplx v);
Constellation build_exp_map(std::span<const cplx> symbols);

std::vector<cplx> psk_symbols(std::size_t n, double radius);
/// nx-by-ny grid centred on 0 with spacings (step_re, step_im).
std::vector<cplx> qam_symbols(std::size_t nx, std::size_t ny, double step_re, double step_im);

struct ExpMapDesign {
    std::vector<cplx> symbols;
    double d_min = 0.0;
    double radius = 0.0;  // PSK radius
    double step_re = 0.0; // QAM spacings
    double step_im = 0.0;
};

/// Radius maximizing d_min by a grid sweep at `resolution`, refined locally.
ExpMapDesign design_exp_map_psk(std::size_t n, double resolution = 1e-3);
/// Spacings maximizing d_min subject to max |v| < pi / 2 (coarse grid then zoom).
ExpMapDesign design_exp_map_qam(std::size_t nx, std::size_t ny);

/// B <= 2: PSK; otherwise square (even B) or 2:1 rectangular (odd B) QAM.
Constellation build_exp_map_bits(int bits);

// --- Cube-Split (T = 2) ----------------------------------------------------

/// Standard normal quantile.
double normal_quantile(double p);

/// Grid point a = (a1, a2) in (0,1)^2 mapped into cell 0 (first entry is the
/// anchor) or cell 1 (second entry is).
Codeword cube_split_codeword(double a1, double a2, int cell);

/// One bit picks the cell; the rest split as (ceil, floor) over the two real
/// grid dimensions. B = 1 yields the two cell centres.
Constellation build_cube_split(int bits);

// --- Grass-Lattice (T = 2) -------------------------------------------------

/// (1 - e^{-t^2})^{1/2} / t, finite down to t = 0 (limit 1).
double grass_lattice_radial(double t);

Codeword grass_lattice_codeword(double a, double b);

/// 2^{2 B_r} codewords on the grid alpha + p (1 - 2 alpha) / (2^{B_r} - 1).
Constellation build_grass_lattice(int bits_per_axis, double alpha = 1e-2);

} // namespace blochgrass
