#pragma once

// Point sets on the unit sphere with large minimum separation (Tammes problem).

#include "blochgrass/geometry.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace blochgrass {

enum class PackingSource { Exact, Optimized, File };

std::string_view to_string(PackingSource s);

class PackingSet {
  public:
    /// Validates distinctness (no two points closer than 1e-9) and caches the
    /// minimum pairwise Euclidean distance.
    PackingSet(std::vector<BlochPoint> points, PackingSource source);

    const std::vector<BlochPoint>& points() const noexcept { return points_; }
    std::size_t size() const noexcept { return points_.size(); }
    PackingSource source() const noexcept { return source_; }
    double min_distance() const noexcept { return min_distance_; }

  private:
    std::vector<BlochPoint> points_;
    PackingSource source_;
    double min_distance_;
};

/// Minimum pairwise Euclidean distance (0 for fewer than two points).
double min_pairwise_distance(const std::vector<BlochPoint>& points);

/// Closed-form optimal configurations for C in {2, 3, 4, 6, 8, 12}.
PackingSet exact_packing(std::size_t count);

/// Settings for the two-phase maximin optimizer. Defaults were tuned on
/// C = 4..1024; nothing about them is canonical.
struct PackingConfig {
    // Phase 1: soft-min (log-sum-exp) ascent under a geometric temperature schedule.
    // Temperatures are relative to the hexagonal-packing distance estimate.
    double initial_temperature = 0.05;
    double final_temperature = 1e-4;
    int temperature_stages = 24;
    int iterations_per_stage = 60;
    double step = 0.05;
    // Phase 2: direct maximin polish of the closest pairs.
    int polish_iterations = 20000;
    double polish_step = 1e-2;
    double polish_min_step = 1e-13;
    // Scale of the seeded jitter applied to the Fibonacci start.
    double jitter = 0.05;
};

struct PackingReport {
    PackingSet packing;
    bool converged = false;
    int iterations = 0;
};

/// Deterministic given (count, seed, config). Never throws for non-convergence;
/// the report carries the best set found.
PackingReport optimize_packing(std::size_t count, std::uint64_t seed, const PackingConfig& config = {});

/// Plain text: one "x y z" triple per line, '#' starts a comment. An optional
/// "# points: N" header line fixes the expected count.
PackingSet load_packing(const std::filesystem::path& path);
PackingSet parse_packing(std::string_view text);

void save_packing(const std::filesystem::path& path, const PackingSet& set);

} // namespace blochgrass
