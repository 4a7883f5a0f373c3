#pragma once

// Z-Opt: layers of rotated regular polygons stacked along the Bloch-sphere
// z-axis. Only the polar angles of the upper half of the layers are free.

#include "blochgrass/geometry.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace blochgrass {

/// One row of the Z-Opt structure table.
struct ZOptStructure {
    int bits = 0;
    std::size_t count = 0;
    int layers = 0;
    std::vector<int> layer_sizes;
    int z_max = 0;
    int n_v = 0;

    /// B in {5, 7}: the first and last layers hold z_max / 2 points and the
    /// equatorial layer is pinned at pi / 2.
    bool half_layers() const noexcept { return bits == 5 || bits == 7; }
};

/// Supported for 1 <= B <= 16.
ZOptStructure zopt_structure(int bits);

double d_vertical(double theta_i, double theta_j);
double d_horizontal(double theta, double delta_phi);
double d_diagonal(double theta_i, double theta_j, double delta_phi);

/// Euclidean (Bloch-sphere) distances that can realize the minimum.
struct CandidateDistances {
    std::vector<double> vertical;
    std::vector<double> horizontal;
    std::vector<double> diagonal;

    std::size_t size() const noexcept { return vertical.size() + horizontal.size() + diagonal.size(); }
    double min() const;
};

/// Full layer angles from the n_v free ones, using the mirror symmetry about
/// the equator.
std::vector<double> expand_theta(std::span<const double> free_angles, const ZOptStructure& s);

/// Requires n_v strictly increasing angles in (0, pi/2) (B = 1 takes pi/2).
CandidateDistances candidate_distances(std::span<const double> free_angles, const ZOptStructure& s);

/// 2 n_v, or 2 n_v + 3 with half layers (B = 1..3 have their own small sets).
std::size_t candidate_count(const ZOptStructure& s);

/// Closed-form free angle for B in {1, 2, 3}.
double closed_form_theta(int bits);

struct ZOptConfig {
    int restarts = 4;
    double perturbation = 0.02;
    int max_sweeps = 200;
    int line_search_iterations = 80;
    std::vector<double> polish_temperatures = {1e-3, 3e-4, 1e-4, 3e-5, 1e-5, 3e-6, 1e-6};
    int polish_iterations = 200;
};

struct ZOptOptimization {
    std::vector<double> angles;
    /// min of the candidate set, as a chordal distance (half the Bloch distance).
    double objective = 0.0;
    std::uint64_t objective_calls = 0;
    std::uint64_t distance_evals = 0;
};

/// Maximizes the candidate-set minimum over the free angles, 4 <= B <= 16.
/// Deterministic in (structure, config, seed).
ZOptOptimization optimize_zopt(const ZOptStructure& s, const ZOptConfig& config = {}, std::uint64_t seed = 0);

struct ZOptConstellation {
    ZOptStructure structure;
    std::vector<double> theta;
    Constellation constellation;
    /// Zero-based index of the first codeword of each layer.
    std::vector<std::size_t> layer_offsets;
};

/// Codewords in layer-major order; layer m (one-based) sits at theta[m-1] with
/// azimuths 2 pi (n-1) / z_m, shifted by pi / z_max on even layers.
ZOptConstellation realize_z_opt(const ZOptStructure& s, std::vector<double> theta);

ZOptConstellation build_z_opt(int bits, const ZOptConfig& config = {}, std::uint64_t seed = 0);

} // namespace blochgrass
