#pragma once

// Block Rayleigh fading Monte Carlo: Y = sqrt(2) x H + W with H ~ CN(0, 1)
// (1 x N) and W ~ CN(0, sigma^2) (2 x N). SNR is defined as 1 / sigma^2.

#include "blochgrass/detectors.hpp"
#include "blochgrass/geometry.hpp"
#include "blochgrass/rng.hpp"

#include <cstdint>
#include <vector>

namespace blochgrass {

struct ChannelSample {
    std::vector<cplx> h;  // 1 x N
    ReceivedBlock w;      // 2 x N
    double sigma2 = 0.0;
};

double snr_db_to_sigma2(double snr_db);

/// Draws H with unit variance and W with variance sigma2 from `rng`.
ChannelSample sample_channel(CounterRng& rng, int antennas, double sigma2);

ReceivedBlock transmit(const Codeword& x, const ChannelSample& ch);

/// One Monte Carlo trial. The stream depends on (seed, trial) only, so every
/// SNR point sees the same symbols, fading and (rescaled) noise.
struct Trial {
    std::size_t symbol = 0;
    ReceivedBlock y;
};
Trial draw_trial(const Constellation& x, int antennas, double sigma2, std::uint64_t seed, std::uint64_t trial);

struct SerConfig {
    std::vector<double> snr_db;
    std::uint64_t trials = 0;
    int antennas = 1;
    std::uint64_t seed = 0;
    /// 0 picks the default (BLOCHCON_THREADS, else hardware concurrency).
    unsigned threads = 0;
};

struct SerPoint {
    double snr_db = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t errors = 0;
    double ser = 0.0;
    double mean_distance_evals = 0.0;
    double mean_comparisons = 0.0;
    std::uint64_t max_distance_evals = 0;
    std::uint64_t max_comparisons = 0;
};

struct SerCurve {
    DetectorKind detector = DetectorKind::Glrt;
    int antennas = 1;
    std::uint64_t seed = 0;
    std::vector<SerPoint> points;
};

/// Thread count used when a config leaves it at 0.
unsigned default_threads();

/// Result is independent of the thread count.
SerCurve run_ser(const Constellation& x, const Detector& detector, const SerConfig& config);

struct BenchRow {
    DetectorKind detector = DetectorKind::Glrt;
    std::uint64_t trials = 0;
    double mean_distance_evals = 0.0;
    std::uint64_t max_distance_evals = 0;
    double mean_comparisons = 0.0;
    std::uint64_t max_comparisons = 0;
    std::uint64_t errors = 0;
};

/// Feeds the identical trial stream at one SNR point through each detector.
std::vector<BenchRow> bench_detectors(const Constellation& x, const std::vector<const Detector*>& detectors,
                                      std::uint64_t trials, int antennas, std::uint64_t seed, double snr_db = 10.0,
                                      unsigned threads = 0);

struct Agreement {
    std::uint64_t trials = 0;
    std::uint64_t mismatches = 0;
    std::uint64_t max_distance_evals_b = 0;
};

/// Decision-by-decision comparison of two detectors on a shared trial stream.
Agreement compare_detectors(const Constellation& x, const Detector& a, const Detector& b, std::uint64_t trials,
                            int antennas, double snr_db, std::uint64_t seed, unsigned threads = 0);

} // namespace blochgrass
