#include "blochgrass/packing.hpp"

#include "blochgrass/error.hpp"
#include "blochgrass/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>

namespace blochgrass {

std::string_view to_string(PackingSource s) {
    switch (s) {
    case PackingSource::Exact: return "exact";
    case PackingSource::Optimized: return "optimized";
    case PackingSource::File: return "file";
    }
    return "file";
}

double min_pairwise_distance(const std::vector<BlochPoint>& points) {
    if (points.size() < 2) return 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j)
            best = std::min(best, euclidean_distance(points[i], points[j]));
    return best;
}

PackingSet::PackingSet(std::vector<BlochPoint> points, PackingSource source)
    : points_(std::move(points)), source_(source) {
    if (points_.empty()) fail(ErrorKind::InvalidInput, "empty packing");
    min_distance_ = points_.size() >= 2 ? min_pairwise_distance(points_) : 2.0;
    if (min_distance_ <= 1e-9) fail(ErrorKind::InvalidInput, "packing contains duplicate points");
}

PackingSet exact_packing(std::size_t count) {
    std::vector<BlochPoint> pts;
    switch (count) {
    case 2:
        pts = {BlochPoint(0, 0, 1), BlochPoint(0, 0, -1)};
        break;
    case 3:
        for (int k = 0; k < 3; ++k) pts.push_back(angles_to_bloch({kPi / 2, k * kTwoPi / 3}));
        break;
    case 4: {
        const double s = 1.0 / std::sqrt(3.0);
        pts = {BlochPoint(s, s, s), BlochPoint(s, -s, -s), BlochPoint(-s, s, -s), BlochPoint(-s, -s, s)};
        break;
    }
    case 6:
        pts = {BlochPoint(0, 0, 1), BlochPoint(1, 0, 0), BlochPoint(0, 1, 0),
               BlochPoint(-1, 0, 0), BlochPoint(0, -1, 0), BlochPoint(0, 0, -1)};
        break;
    case 8: {
        // Square antiprism.
        const double theta = std::atan(std::sqrt(2.0 * std::sqrt(2.0)));
        for (int k = 0; k < 4; ++k) pts.push_back(angles_to_bloch({theta, k * kPi / 2}));
        for (int k = 0; k < 4; ++k) pts.push_back(angles_to_bloch({kPi - theta, kPi / 4 + k * kPi / 2}));
        break;
    }
    case 12: {
        const double g = 0.5 * (1.0 + std::sqrt(5.0));
        const double n = std::sqrt(1.0 + g * g);
        for (double a : {1.0, -1.0})
            for (double b : {g, -g}) {
                pts.emplace_back(0.0, a / n, b / n);
                pts.emplace_back(a / n, b / n, 0.0);
                pts.emplace_back(b / n, 0.0, a / n);
            }
        break;
    }
    default: {
        std::ostringstream os;
        os << "no closed-form packing for C = " << count
           << " (closed forms: 2, 3, 4, 6, 8, 12); use optimize_packing or load_packing";
        fail(ErrorKind::Unsupported, os.str());
    }
    }
    return PackingSet(std::move(pts), PackingSource::Exact);
}

namespace {

struct Vec3 {
    double x, y, z;
};

Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

Vec3 normalized(const Vec3& a) {
    const double n = norm(a);
    return {a.x / n, a.y / n, a.z / n};
}

/// Moves p by the tangential part of `dir` scaled by `step`, then retracts to the sphere.
Vec3 retract(const Vec3& p, const Vec3& dir, double step) {
    const double radial = dot(p, dir);
    const Vec3 t{dir.x - radial * p.x, dir.y - radial * p.y, dir.z - radial * p.z};
    return normalized({p.x + step * t.x, p.y + step * t.y, p.z + step * t.z});
}

struct Pair {
    std::uint32_t i, j;
};

/// Verlet neighbour list over all pairs closer than a cutoff.
class NeighbourList {
  public:
    void rebuild(const std::vector<Vec3>& p, double cutoff) {
        pairs_.clear();
        const double c2 = cutoff * cutoff;
        for (std::uint32_t i = 0; i < p.size(); ++i)
            for (std::uint32_t j = i + 1; j < p.size(); ++j) {
                const Vec3 d = p[i] - p[j];
                if (dot(d, d) < c2) pairs_.push_back({i, j});
            }
        anchor_ = p;
        cutoff_ = cutoff;
    }

    /// True when some point drifted far enough that a pair outside the list
    /// could now lie inside `needed`.
    bool stale(const std::vector<Vec3>& p, double needed) const {
        double worst = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) worst = std::max(worst, norm(p[i] - anchor_[i]));
        return needed + 2.0 * worst >= cutoff_;
    }

    const std::vector<Pair>& pairs() const { return pairs_; }

  private:
    std::vector<Pair> pairs_;
    std::vector<Vec3> anchor_;
    double cutoff_ = 0.0;
};

double list_min(const std::vector<Vec3>& p, const std::vector<Pair>& pairs) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& pr : pairs) best = std::min(best, norm(p[pr.i] - p[pr.j]));
    return best;
}

double exact_min(const std::vector<Vec3>& p) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = i + 1; j < p.size(); ++j) best = std::min(best, norm(p[i] - p[j]));
    return best;
}

/// Soft-min of pair distances, -tau log sum exp(-d/tau), and its gradient.
double soft_min(const std::vector<Vec3>& p, const std::vector<Pair>& pairs, double tau, std::vector<Vec3>* grad) {
    const double dmin = list_min(p, pairs);
    double z = 0.0;
    if (grad) std::fill(grad->begin(), grad->end(), Vec3{0, 0, 0});
    for (const auto& pr : pairs) {
        const Vec3 d = p[pr.i] - p[pr.j];
        const double dist = norm(d);
        const double w = std::exp(-(dist - dmin) / tau);
        z += w;
        if (grad && w > 0.0) {
            const double s = w / dist;
            auto& gi = (*grad)[pr.i];
            auto& gj = (*grad)[pr.j];
            gi.x += s * d.x;
            gi.y += s * d.y;
            gi.z += s * d.z;
            gj.x -= s * d.x;
            gj.y -= s * d.y;
            gj.z -= s * d.z;
        }
    }
    if (grad)
        for (auto& g : *grad) g = {g.x / z, g.y / z, g.z / z};
    return dmin - tau * std::log(z);
}

std::vector<Vec3> fibonacci_start(std::size_t count, std::uint64_t seed, double jitter) {
    CounterRng rng = CounterRng::keyed(seed, {0x7061636bull, count});
    const double golden_angle = kPi * (3.0 - std::sqrt(5.0));
    std::vector<Vec3> p(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(count);
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = golden_angle * static_cast<double>(i);
        Vec3 v{r * std::cos(phi), r * std::sin(phi), z};
        v = normalized({v.x + jitter * rng.normal(), v.y + jitter * rng.normal(), v.z + jitter * rng.normal()});
        p[i] = v;
    }
    return p;
}

std::vector<BlochPoint> to_points(const std::vector<Vec3>& p) {
    std::vector<BlochPoint> out;
    out.reserve(p.size());
    for (const auto& v : p) out.emplace_back(v.x, v.y, v.z);
    return out;
}

} // namespace

PackingReport optimize_packing(std::size_t count, std::uint64_t seed, const PackingConfig& cfg) {
    if (count < 2) fail(ErrorKind::InvalidInput, "optimize_packing needs C >= 2");
    if (cfg.temperature_stages < 1 || cfg.iterations_per_stage < 0 || cfg.polish_iterations < 0 ||
        !(cfg.initial_temperature > 0) || !(cfg.final_temperature > 0) || !(cfg.step > 0) ||
        !(cfg.polish_step > 0) || !(cfg.polish_min_step > 0))
        fail(ErrorKind::InvalidConfig, "packing optimizer settings must be positive");

    const double hex = std::sqrt(8.0 * kPi / (std::sqrt(3.0) * static_cast<double>(count)));
    std::vector<Vec3> p = fibonacci_start(count, seed, cfg.jitter * std::min(hex, 1.0));

    if (count == 2) {
        const Vec3 a = p[0];
        p[1] = {-a.x, -a.y, -a.z};
        return {PackingSet(to_points(p), PackingSource::Optimized), true, 0};
    }

    int iterations = 0;
    NeighbourList list;
    std::vector<Vec3> grad(count), trial(count);

    // Phase 1: anneal the soft-min.
    for (int stage = 0; stage < cfg.temperature_stages; ++stage) {
        const double frac = cfg.temperature_stages > 1 ? static_cast<double>(stage) / (cfg.temperature_stages - 1) : 1.0;
        const double tau =
            hex * cfg.initial_temperature * std::pow(cfg.final_temperature / cfg.initial_temperature, frac);
        const double reach = 40.0 * tau;
        double eta = cfg.step * hex * std::sqrt(tau / (hex * cfg.initial_temperature));
        list.rebuild(p, exact_min(p) + reach + hex);
        double value = soft_min(p, list.pairs(), tau, &grad);
        for (int it = 0; it < cfg.iterations_per_stage; ++it, ++iterations) {
            double gmax = 0.0;
            for (const auto& g : grad) gmax = std::max(gmax, norm(g));
            if (!(gmax > 0.0)) break;
            for (std::size_t i = 0; i < count; ++i) trial[i] = retract(p[i], grad[i], eta / gmax);
            if (list.stale(trial, list_min(trial, list.pairs()) + reach)) {
                list.rebuild(trial, exact_min(trial) + reach + hex);
                value = soft_min(p, list.pairs(), tau, &grad);
            }
            const double next = soft_min(trial, list.pairs(), tau, nullptr);
            if (next > value) {
                p.swap(trial);
                value = soft_min(p, list.pairs(), tau, &grad);
                eta *= 1.2;
            } else {
                eta *= 0.5;
            }
        }
    }

    // Phase 2: push apart every pair that a step of this size could make the minimum.
    double step = cfg.polish_step * hex;
    double dmin = exact_min(p);
    list.rebuild(p, dmin * 1.5 + 4.0 * step);
    std::vector<Vec3> disp(count);
    bool converged = false;
    for (int it = 0; it < cfg.polish_iterations; ++it, ++iterations) {
        if (step < cfg.polish_min_step) {
            converged = true;
            break;
        }
        const double active = dmin + 2.0 * step;
        if (list.stale(p, active + 2.0 * step)) list.rebuild(p, active * 1.5 + 4.0 * step);
        std::fill(disp.begin(), disp.end(), Vec3{0, 0, 0});
        for (const auto& pr : list.pairs()) {
            const Vec3 d = p[pr.i] - p[pr.j];
            const double dist = norm(d);
            if (dist > active) continue;
            const Vec3 u{d.x / dist, d.y / dist, d.z / dist};
            disp[pr.i] = {disp[pr.i].x + u.x, disp[pr.i].y + u.y, disp[pr.i].z + u.z};
            disp[pr.j] = {disp[pr.j].x - u.x, disp[pr.j].y - u.y, disp[pr.j].z - u.z};
        }
        for (std::size_t i = 0; i < count; ++i) {
            const double n = norm(disp[i]);
            trial[i] = n > 0.0 ? retract(p[i], disp[i], step / std::max(1.0, n)) : p[i];
        }
        const double next = list_min(trial, list.pairs());
        if (next > dmin) {
            p.swap(trial);
            dmin = next;
            step *= 1.1;
        } else {
            step *= 0.5;
        }
    }
    return {PackingSet(to_points(p), PackingSource::Optimized), converged, iterations};
}

PackingSet parse_packing(std::string_view text) {
    std::vector<BlochPoint> pts;
    std::optional<std::size_t> expected;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    auto error = [&](const std::string& msg) {
        std::ostringstream os;
        os << "packing line " << lineno << ": " << msg;
        fail(ErrorKind::Format, os.str());
    };
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            std::istringstream header(line.substr(hash + 1));
            std::string key;
            std::size_t n;
            if (header >> key && key == "points:" && header >> n) expected = n;
            line.resize(hash);
        }
        std::istringstream fields(line);
        double v[3];
        int got = 0;
        std::string tok;
        while (fields >> tok) {
            if (got == 3) error("more than three coordinates");
            try {
                std::size_t used = 0;
                v[got] = std::stod(tok, &used);
                if (used != tok.size()) error("malformed number '" + tok + "'");
            } catch (const std::logic_error&) {
                error("malformed number '" + tok + "'");
            }
            ++got;
        }
        if (got == 0) continue;
        if (got != 3) error("expected three coordinates");
        const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
        if (!std::isfinite(n) || std::abs(n - 1.0) > 1e-6) error("point is not on the unit sphere");
        const BlochPoint p(v[0] / n, v[1] / n, v[2] / n);
        for (std::size_t k = 0; k < pts.size(); ++k)
            if (euclidean_distance(p, pts[k]) <= 1e-9) {
                std::ostringstream os;
                os << "duplicate of point " << k + 1;
                error(os.str());
            }
        pts.push_back(p);
    }
    if (pts.empty()) fail(ErrorKind::Format, "packing file contains no points");
    if (expected && *expected != pts.size()) {
        std::ostringstream os;
        os << "packing header declares " << *expected << " points but " << pts.size() << " were read";
        fail(ErrorKind::Format, os.str());
    }
    return PackingSet(std::move(pts), PackingSource::File);
}

PackingSet load_packing(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Format, "cannot open packing file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_packing(buf.str());
    } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.what());
    }
}

void save_packing(const std::filesystem::path& path, const PackingSet& set) {
    std::ofstream out(path);
    if (!out) fail(ErrorKind::Format, "cannot write packing file " + path.string());
    out << "# points: " << set.size() << "\n# min_distance: " << std::setprecision(17) << set.min_distance() << "\n";
    for (const auto& p : set.points()) out << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
}

} // namespace blochgrass
