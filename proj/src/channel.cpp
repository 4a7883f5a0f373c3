#include "blochgrass/channel.hpp"

#include "blochgrass/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>

namespace blochgrass {

double snr_db_to_sigma2(double snr_db) { return std::pow(10.0, -snr_db / 10.0); }

ChannelSample sample_channel(CounterRng& rng, int antennas, double sigma2) {
    if (antennas < 1) fail(ErrorKind::InvalidConfig, "antenna count must be at least 1");
    ChannelSample ch;
    ch.sigma2 = sigma2;
    ch.h.resize(static_cast<std::size_t>(antennas));
    ch.w.resize(static_cast<std::size_t>(antennas));
    for (auto& h : ch.h) h = rng.complex_normal(1.0);
    for (auto& col : ch.w) {
        col[0] = rng.complex_normal(sigma2);
        col[1] = rng.complex_normal(sigma2);
    }
    return ch;
}

ReceivedBlock transmit(const Codeword& x, const ChannelSample& ch) {
    const double s = std::sqrt(2.0);
    const auto v = x.vec();
    ReceivedBlock y(ch.h.size());
    for (std::size_t n = 0; n < ch.h.size(); ++n) {
        const cplx w0 = n < ch.w.size() ? ch.w[n][0] : cplx(0.0);
        const cplx w1 = n < ch.w.size() ? ch.w[n][1] : cplx(0.0);
        y[n] = {s * v[0] * ch.h[n] + w0, s * v[1] * ch.h[n] + w1};
    }
    return y;
}

Trial draw_trial(const Constellation& x, int antennas, double sigma2, std::uint64_t seed, std::uint64_t trial) {
    auto rng = CounterRng::keyed(seed, {trial});
    Trial t;
    t.symbol = static_cast<std::size_t>(rng.index(x.size()));
    // Unit-variance noise drawn once, then scaled, keeps streams aligned across SNR.
    auto ch = sample_channel(rng, antennas, 1.0);
    const double sigma = std::sqrt(sigma2);
    for (auto& col : ch.w) {
        col[0] *= sigma;
        col[1] *= sigma;
    }
    ch.sigma2 = sigma2;
    t.y = transmit(x[t.symbol], ch);
    return t;
}

unsigned default_threads() {
    if (const char* env = std::getenv("BLOCHCON_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v >= 1) return static_cast<unsigned>(v);
        } catch (const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

constexpr std::uint64_t kChunk = 4096;

/// Runs body(begin, end, slot) over fixed chunks; slots are per chunk so any
/// reduction over them is independent of scheduling.
template <class Acc, class Body>
std::vector<Acc> parallel_chunks(std::uint64_t trials, unsigned threads, Body body) {
    const std::uint64_t chunks = (trials + kChunk - 1) / kChunk;
    std::vector<Acc> slots(chunks);
    std::atomic<std::uint64_t> next{0};
    auto worker = [&] {
        for (std::uint64_t c; (c = next.fetch_add(1)) < chunks;)
            body(c * kChunk, std::min(trials, (c + 1) * kChunk), slots[c]);
    };
    const unsigned n = std::max(1u, std::min<unsigned>(threads ? threads : default_threads(), static_cast<unsigned>(std::max<std::uint64_t>(chunks, 1))));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return slots;
}

struct Tally {
    std::uint64_t errors = 0;
    std::uint64_t distance_evals = 0;
    std::uint64_t comparisons = 0;
    std::uint64_t max_distance_evals = 0;
    std::uint64_t max_comparisons = 0;

    void add(const DetectionResult& r, bool error) {
        errors += error;
        distance_evals += r.distance_evals;
        comparisons += r.comparisons;
        max_distance_evals = std::max(max_distance_evals, r.distance_evals);
        max_comparisons = std::max(max_comparisons, r.comparisons);
    }
    void merge(const Tally& o) {
        errors += o.errors;
        distance_evals += o.distance_evals;
        comparisons += o.comparisons;
        max_distance_evals = std::max(max_distance_evals, o.max_distance_evals);
        max_comparisons = std::max(max_comparisons, o.max_comparisons);
    }
};

Tally run_point(const Constellation& x, const Detector& d, std::uint64_t trials, int antennas, double sigma2,
                std::uint64_t seed, unsigned threads) {
    auto slots = parallel_chunks<Tally>(trials, threads, [&](std::uint64_t b, std::uint64_t e, Tally& acc) {
        for (std::uint64_t t = b; t < e; ++t) {
            const auto tr = draw_trial(x, antennas, sigma2, seed, t);
            const auto r = d.detect(tr.y);
            acc.add(r, r.index != tr.symbol);
        }
    });
    Tally total;
    for (const auto& s : slots) total.merge(s);
    return total;
}

} // namespace

SerCurve run_ser(const Constellation& x, const Detector& detector, const SerConfig& cfg) {
    if (cfg.trials < 1) fail(ErrorKind::InvalidConfig, "trials must be at least 1");
    if (cfg.antennas < 1) fail(ErrorKind::InvalidConfig, "antenna count must be at least 1");
    if (cfg.snr_db.empty()) fail(ErrorKind::InvalidConfig, "SNR list is empty");
    SerCurve curve;
    curve.detector = detector.kind();
    curve.antennas = cfg.antennas;
    curve.seed = cfg.seed;
    for (double snr : cfg.snr_db) {
        const auto t = run_point(x, detector, cfg.trials, cfg.antennas, snr_db_to_sigma2(snr), cfg.seed, cfg.threads);
        SerPoint p;
        p.snr_db = snr;
        p.trials = cfg.trials;
        p.errors = t.errors;
        p.ser = static_cast<double>(t.errors) / static_cast<double>(cfg.trials);
        p.mean_distance_evals = static_cast<double>(t.distance_evals) / static_cast<double>(cfg.trials);
        p.mean_comparisons = static_cast<double>(t.comparisons) / static_cast<double>(cfg.trials);
        p.max_distance_evals = t.max_distance_evals;
        p.max_comparisons = t.max_comparisons;
        curve.points.push_back(p);
    }
    return curve;
}

std::vector<BenchRow> bench_detectors(const Constellation& x, const std::vector<const Detector*>& detectors,
                                      std::uint64_t trials, int antennas, std::uint64_t seed, double snr_db,
                                      unsigned threads) {
    if (trials < 1) fail(ErrorKind::InvalidConfig, "trials must be at least 1");
    std::vector<BenchRow> rows;
    for (const Detector* d : detectors) {
        const auto t = run_point(x, *d, trials, antennas, snr_db_to_sigma2(snr_db), seed, threads);
        BenchRow row;
        row.detector = d->kind();
        row.trials = trials;
        row.errors = t.errors;
        row.mean_distance_evals = static_cast<double>(t.distance_evals) / static_cast<double>(trials);
        row.mean_comparisons = static_cast<double>(t.comparisons) / static_cast<double>(trials);
        row.max_distance_evals = t.max_distance_evals;
        row.max_comparisons = t.max_comparisons;
        rows.push_back(row);
    }
    return rows;
}

Agreement compare_detectors(const Constellation& x, const Detector& a, const Detector& b, std::uint64_t trials,
                            int antennas, double snr_db, std::uint64_t seed, unsigned threads) {
    const double sigma2 = snr_db_to_sigma2(snr_db);
    auto slots = parallel_chunks<Agreement>(trials, threads, [&](std::uint64_t lo, std::uint64_t hi, Agreement& acc) {
        for (std::uint64_t t = lo; t < hi; ++t) {
            const auto tr = draw_trial(x, antennas, sigma2, seed, t);
            const auto ra = a.detect(tr.y);
            const auto rb = b.detect(tr.y);
            ++acc.trials;
            acc.mismatches += ra.index != rb.index;
            acc.max_distance_evals_b = std::max(acc.max_distance_evals_b, rb.distance_evals);
        }
    });
    Agreement total;
    for (const auto& s : slots) {
        total.trials += s.trials;
        total.mismatches += s.mismatches;
        total.max_distance_evals_b = std::max(total.max_distance_evals_b, s.max_distance_evals_b);
    }
    return total;
}

} // namespace blochgrass
