#include "blochgrass/zopt.hpp"

#include "blochgrass/error.hpp"
#include "blochgrass/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace blochgrass {

namespace {

std::vector<int> rep(int value, int times) { return std::vector<int>(static_cast<std::size_t>(times), value); }

ZOptStructure make_row(int bits, std::vector<int> sizes, int n_v) {
    ZOptStructure s;
    s.bits = bits;
    s.count = std::size_t{1} << bits;
    s.layers = static_cast<int>(sizes.size());
    s.z_max = *std::max_element(sizes.begin(), sizes.end());
    s.layer_sizes = std::move(sizes);
    s.n_v = n_v;
    return s;
}

} // namespace

ZOptStructure zopt_structure(int bits) {
    switch (bits) {
    case 1: return make_row(1, {2}, 1);
    case 2: return make_row(2, {2, 2}, 1);
    case 3: return make_row(3, {4, 4}, 1);
    case 4: return make_row(4, rep(4, 4), 2);
    case 5: return make_row(5, {4, 8, 8, 8, 4}, 2);
    case 6: return make_row(6, rep(8, 8), 4);
    case 7: {
        auto sizes = rep(16, 9);
        sizes.front() = sizes.back() = 8;
        return make_row(7, sizes, 4);
    }
    case 8: return make_row(8, rep(16, 16), 8);
    case 9: return make_row(9, rep(16, 32), 16);
    case 10: return make_row(10, rep(32, 32), 16);
    case 11: return make_row(11, rep(32, 64), 32);
    case 12: return make_row(12, rep(64, 64), 32);
    case 13: return make_row(13, rep(64, 128), 64);
    case 14: return make_row(14, rep(128, 128), 64);
    case 15: return make_row(15, rep(128, 256), 128);
    case 16: return make_row(16, rep(256, 256), 128);
    default: break;
    }
    std::ostringstream os;
    os << "Z-Opt is defined for 1 <= B <= 16, got B = " << bits;
    fail(ErrorKind::Unsupported, os.str());
}

double d_vertical(double theta_i, double theta_j) { return 2.0 * std::sin(0.5 * std::abs(theta_i - theta_j)); }

double d_horizontal(double theta, double delta_phi) { return 2.0 * std::sin(theta) * std::sin(0.5 * delta_phi); }

double d_diagonal(double theta_i, double theta_j, double delta_phi) {
    const double a = std::sin(0.5 * (theta_i - theta_j));
    const double b = std::sin(0.5 * delta_phi);
    return 2.0 * std::sqrt(a * a + std::sin(theta_i) * std::sin(theta_j) * b * b);
}

double CandidateDistances::min() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto* set : {&vertical, &horizontal, &diagonal})
        for (double d : *set) m = std::min(m, d);
    return m;
}

std::vector<double> expand_theta(std::span<const double> free_angles, const ZOptStructure& s) {
    if (static_cast<int>(free_angles.size()) != s.n_v) {
        std::ostringstream os;
        os << "expected " << s.n_v << " free angles for B = " << s.bits << ", got " << free_angles.size();
        fail(ErrorKind::InvalidInput, os.str());
    }
    if (s.layers == 1) return {free_angles[0]};
    std::vector<double> theta(free_angles.begin(), free_angles.end());
    if (s.half_layers()) theta.push_back(kPi / 2);
    for (auto it = free_angles.rbegin(); it != free_angles.rend(); ++it) theta.push_back(kPi - *it);
    return theta;
}

namespace {

void validate_free(std::span<const double> free_angles, const ZOptStructure& s) {
    if (s.layers == 1) {
        if (free_angles.size() != 1 || !(free_angles[0] > 0.0 && free_angles[0] <= kPi / 2))
            fail(ErrorKind::InvalidInput, "B = 1 takes a single angle in (0, pi/2]");
        return;
    }
    double prev = 0.0;
    for (double t : free_angles) {
        if (!(t > prev) || !(t < kPi / 2))
            fail(ErrorKind::InvalidInput, "free angles must be strictly increasing in (0, pi/2)");
        prev = t;
    }
}

/// Candidate set on an already expanded angle list.
CandidateDistances candidates_from_theta(const std::vector<double>& theta, const ZOptStructure& s) {
    CandidateDistances c;
    const int nvp = s.n_v + (s.half_layers() ? 1 : 0);
    const int l = s.layers;
    // Same-azimuth neighbours two layers apart.
    for (int i = 1; i <= nvp - 1 && i + 2 <= l; ++i) c.vertical.push_back(d_vertical(theta[i - 1], theta[i + 1]));
    // Adjacent vertices of one polygon: separation 2 pi / z_i.
    const int horizontal_layers = s.half_layers() ? 2 : 1;
    for (int i = 1; i <= horizontal_layers; ++i)
        c.horizontal.push_back(d_horizontal(theta[i - 1], kTwoPi / s.layer_sizes[i - 1]));
    // Adjacent layers are rotated against each other by pi / z_max.
    for (int i = 1; i <= nvp && i + 1 <= l; ++i)
        c.diagonal.push_back(d_diagonal(theta[i - 1], theta[i], kPi / s.z_max));
    return c;
}

} // namespace

CandidateDistances candidate_distances(std::span<const double> free_angles, const ZOptStructure& s) {
    validate_free(free_angles, s);
    return candidates_from_theta(expand_theta(free_angles, s), s);
}

std::size_t candidate_count(const ZOptStructure& s) {
    const int nvp = s.n_v + (s.half_layers() ? 1 : 0);
    const int l = s.layers;
    const int v = std::max(0, std::min(nvp - 1, l - 2));
    const int h = s.half_layers() ? 2 : 1;
    const int d = std::max(0, std::min(nvp, l - 1));
    return static_cast<std::size_t>(v + h + d);
}

double closed_form_theta(int bits) {
    switch (bits) {
    case 1: return kPi / 2;
    case 2: return std::atan(std::sqrt(2.0));
    case 3: return std::atan(std::sqrt(2.0 * std::sqrt(2.0)));
    default: break;
    }
    fail(ErrorKind::Unsupported, "closed-form Z-Opt angles exist only for B <= 3");
}

namespace {

class Objective {
  public:
    explicit Objective(const ZOptStructure& s) : s_(s), per_call_(candidate_count(s)) {}

    /// Candidate minimum; -inf when the ordering constraint is violated.
    double operator()(const std::vector<double>& free_angles) {
        double prev = 0.0;
        for (double t : free_angles) {
            if (!(t > prev) || !(t < kPi / 2)) return -std::numeric_limits<double>::infinity();
            prev = t;
        }
        ++calls_;
        return candidates_from_theta(expand_theta(free_angles, s_), s_).min();
    }

    /// Soft-min with temperature tau over the same candidate set.
    double smooth(const std::vector<double>& free_angles, double tau) {
        double prev = 0.0;
        for (double t : free_angles) {
            if (!(t > prev) || !(t < kPi / 2)) return -std::numeric_limits<double>::infinity();
            prev = t;
        }
        ++calls_;
        const auto c = candidates_from_theta(expand_theta(free_angles, s_), s_);
        const double m = c.min();
        double z = 0.0;
        for (const auto* set : {&c.vertical, &c.horizontal, &c.diagonal})
            for (double d : *set) z += std::exp(-(d - m) / tau);
        return m - tau * std::log(z);
    }

    std::uint64_t calls() const { return calls_; }
    std::size_t per_call() const { return per_call_; }

  private:
    const ZOptStructure& s_;
    std::size_t per_call_;
    std::uint64_t calls_ = 0;
};

double solve_increasing(double lo, double hi, double target, auto&& f) {
    for (int k = 0; k < 100; ++k) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < target ? lo : hi) = mid;
    }
    return hi;
}

/// Places each layer as high as the target separation allows; empty when the
/// target cannot be met.
std::vector<double> greedy_layers(const ZOptStructure& s, double target) {
    std::vector<double> th;
    const double first = target / (2.0 * std::sin(kPi / s.layer_sizes[0]));
    if (first >= 1.0) return {};
    th.push_back(std::asin(first));
    const double dphi = kPi / s.z_max;
    const double vertical_gap = target >= 2.0 ? kPi : 2.0 * std::asin(target / 2.0);
    for (int k = 2; k <= s.n_v; ++k) {
        const double prev = th.back();
        if (d_diagonal(prev, kPi / 2, dphi) < target) return {};
        double lb = std::nextafter(prev, kPi);
        if (d_diagonal(prev, prev, dphi) < target)
            lb = std::max(lb, solve_increasing(prev, kPi / 2, target, [&](double x) { return d_diagonal(prev, x, dphi); }));
        if (k >= 3) lb = std::max(lb, th[th.size() - 2] + vertical_gap);
        if (k == 2 && s.half_layers()) {
            const double h = target / (2.0 * std::sin(kPi / s.layer_sizes[1]));
            if (h >= 1.0) return {};
            lb = std::max(lb, std::asin(h));
        }
        if (!(lb < kPi / 2)) return {};
        th.push_back(lb);
    }
    return th;
}

std::vector<double> greedy_start(const ZOptStructure& s, Objective& f) {
    double lo = 0.0, hi = 2.0;
    std::vector<double> best;
    for (int k = 0; k < 80; ++k) {
        const double mid = 0.5 * (lo + hi);
        auto th = greedy_layers(s, mid);
        if (!th.empty() && f(th) >= mid - 1e-12) {
            lo = mid;
            best = std::move(th);
        } else {
            hi = mid;
        }
    }
    if (best.empty()) {
        // Evenly spaced fallback.
        for (int k = 1; k <= s.n_v; ++k) best.push_back(kPi / 2 * k / (s.n_v + 1));
    }
    return best;
}

/// Golden-section maximization of one coordinate inside its ordering bracket.
bool coordinate_ascent(std::vector<double>& th, double& value, Objective& f, const ZOptConfig& cfg) {
    bool improved_any = false;
    for (int sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
        bool improved = false;
        for (std::size_t k = 0; k < th.size(); ++k) {
            double lo = k == 0 ? 0.0 : th[k - 1];
            double hi = k + 1 == th.size() ? kPi / 2 : th[k + 1];
            lo = std::nextafter(lo, kPi);
            hi = std::nextafter(hi, 0.0);
            if (!(lo < hi)) continue;
            auto trial = th;
            auto eval = [&](double x) {
                trial[k] = x;
                return f(trial);
            };
            const double r = 0.5 * (std::sqrt(5.0) - 1.0);
            double a = lo, b = hi;
            double x1 = b - r * (b - a), x2 = a + r * (b - a);
            double f1 = eval(x1), f2 = eval(x2);
            for (int it = 0; it < cfg.line_search_iterations; ++it) {
                if (f1 < f2) {
                    a = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = a + r * (b - a);
                    f2 = eval(x2);
                } else {
                    b = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = b - r * (b - a);
                    f1 = eval(x1);
                }
            }
            const double x = f1 >= f2 ? x1 : x2;
            const double fx = std::max(f1, f2);
            if (fx > value) {
                th[k] = x;
                value = fx;
                improved = true;
            }
        }
        if (!improved) break;
        improved_any = true;
    }
    return improved_any;
}

/// Gradient ascent on the soft-min, keeping the iterate only when the true
/// objective improves.
void smoothed_polish(std::vector<double>& th, double& value, Objective& f, const ZOptConfig& cfg) {
    const std::size_t n = th.size();
    std::vector<double> x = th, grad(n), trial(n);
    for (double tau : cfg.polish_temperatures) {
        double step = 1e-3;
        double sx = f.smooth(x, tau);
        for (int it = 0; it < cfg.polish_iterations && step > 1e-16; ++it) {
            const double h = 1e-8;
            double gnorm = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                auto xp = x, xm = x;
                xp[k] += h;
                xm[k] -= h;
                const double fp = f.smooth(xp, tau), fm = f.smooth(xm, tau);
                grad[k] = std::isfinite(fp) && std::isfinite(fm) ? (fp - fm) / (2 * h) : 0.0;
                gnorm = std::max(gnorm, std::abs(grad[k]));
            }
            if (!(gnorm > 0.0)) break;
            for (std::size_t k = 0; k < n; ++k) trial[k] = x[k] + step * grad[k] / gnorm;
            const double st = f.smooth(trial, tau);
            if (st > sx) {
                x = trial;
                sx = st;
                step *= 1.5;
                const double v = f(x);
                if (v > value) {
                    value = v;
                    th = x;
                }
            } else {
                step *= 0.5;
            }
        }
    }
}

} // namespace

ZOptOptimization optimize_zopt(const ZOptStructure& s, const ZOptConfig& cfg, std::uint64_t seed) {
    if (s.bits < 4 || s.bits > 16)
        fail(ErrorKind::Unsupported, "optimize_zopt covers 4 <= B <= 16; B <= 3 has closed forms");
    if (cfg.restarts < 1 || cfg.max_sweeps < 0 || cfg.line_search_iterations < 1)
        fail(ErrorKind::InvalidConfig, "Z-Opt optimizer needs restarts >= 1 and line_search_iterations >= 1");

    Objective f(s);
    const auto start = greedy_start(s, f);
    std::vector<double> best = start;
    double best_value = f(best);

    CounterRng rng = CounterRng::keyed(seed, {0x7a6f7074ull, static_cast<std::uint64_t>(s.bits)});
    for (int r = 0; r < cfg.restarts; ++r) {
        auto th = start;
        if (r > 0) {
            for (auto& t : th) t += cfg.perturbation * rng.normal();
            std::sort(th.begin(), th.end());
            for (auto& t : th) t = std::clamp(t, 1e-6, kPi / 2 - 1e-6);
        }
        double value = f(th);
        if (!std::isfinite(value)) continue;
        coordinate_ascent(th, value, f, cfg);
        smoothed_polish(th, value, f, cfg);
        coordinate_ascent(th, value, f, cfg);
        if (value > best_value) {
            best_value = value;
            best = th;
        }
    }

    ZOptOptimization out;
    out.angles = best;
    out.objective = 0.5 * best_value;
    out.objective_calls = f.calls();
    out.distance_evals = f.calls() * f.per_call();
    return out;
}

ZOptConstellation realize_z_opt(const ZOptStructure& s, std::vector<double> theta) {
    if (static_cast<int>(theta.size()) != s.layers)
        fail(ErrorKind::InvalidInput, "Z-Opt angle list does not match the layer count");
    double prev = 0.0;
    for (double t : theta) {
        if (!(t > prev) || !(t < kPi)) fail(ErrorKind::InvalidInput, "Z-Opt layer angles must increase within (0, pi)");
        prev = t;
    }
    std::vector<Codeword> codewords;
    codewords.reserve(s.count);
    std::vector<std::size_t> offsets;
    for (int m = 1; m <= s.layers; ++m) {
        offsets.push_back(codewords.size());
        const int zm = s.layer_sizes[m - 1];
        const double shift = m % 2 == 0 ? kPi / s.z_max : 0.0;
        for (int n = 1; n <= zm; ++n) {
            const double phi = wrap_azimuth(kTwoPi * (n - 1) / zm + shift);
            codewords.push_back(angles_to_codeword({theta[m - 1], phi}));
        }
    }
    return ZOptConstellation{s, std::move(theta), Constellation(std::move(codewords), Method::ZOpt), std::move(offsets)};
}

ZOptConstellation build_z_opt(int bits, const ZOptConfig& cfg, std::uint64_t seed) {
    const auto s = zopt_structure(bits);
    std::vector<double> free_angles;
    if (bits <= 3)
        free_angles = {closed_form_theta(bits)};
    else
        free_angles = optimize_zopt(s, cfg, seed).angles;
    return realize_z_opt(s, expand_theta(free_angles, s));
}

} // namespace blochgrass
