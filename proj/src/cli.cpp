#include "blochgrass/cli.hpp"

#include "blochgrass/channel.hpp"
#include "blochgrass/constellations.hpp"
#include "blochgrass/error.hpp"
#include "blochgrass/io.hpp"
#include "blochgrass/packing.hpp"
#include "blochgrass/zopt.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace blochgrass {

namespace {

using nlohmann::json;

/// Raised for bad flag combinations detected after parsing.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int exit_code_for(ErrorKind k) {
    switch (k) {
    case ErrorKind::InvalidConfig:
    case ErrorKind::Unsupported: return kExitUsage;
    case ErrorKind::Format:
    case ErrorKind::InvalidInput: return kExitData;
    case ErrorKind::Domain:
    case ErrorKind::Degenerate: return kExitNumerical;
    }
    return kExitData;
}

/// Raw flag values; copied into the RunConfig only when given.
struct Flags {
    std::string config, write_config, format = "csv";
    std::string method, packing_file, input, output;
    int bits = 0, bits_per_axis = 0, antennas = 1;
    double alpha = 0.0;
    std::uint64_t count = 0, seed = 0, trials = 0, from = 0, to = 0;
    unsigned threads = 0;
    std::vector<std::string> constellations, detectors;
    std::vector<double> snr;
};

struct Bound {
    CLI::Option* opt;
    std::function<void(RunConfig&)> apply;
};

void with_output(const RunConfig& cfg, std::ostream& out, const std::function<void(std::ostream&)>& body) {
    if (cfg.output) {
        std::ofstream os(*cfg.output);
        if (!os) fail(ErrorKind::Format, "cannot write " + *cfg.output);
        body(os);
    } else {
        body(out);
    }
}

std::size_t pow2(int b) { return std::size_t{1} << b; }

int require_bits(const RunConfig& cfg) {
    if (!cfg.bits) throw UsageError("--bits is required for method " + cfg.method.value_or("?"));
    return *cfg.bits;
}

// --- construct ---------------------------------------------------------------

int cmd_construct(const RunConfig& cfg, std::ostream& out) {
    if (!cfg.method) throw UsageError("--method is required");
    if (!cfg.output) throw UsageError("--output is required for construct");
    Method method;
    try {
        method = parse_method(*cfg.method);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    json report;
    json provenance = {{"config_hash", config_hash(cfg)}, {"seed", cfg.seed}, {"tool_version", kToolVersion}};
    std::optional<ConstellationFile> file;

    auto count_from = [&]() -> std::size_t {
        if (cfg.count) return static_cast<std::size_t>(*cfg.count);
        return pow2(require_bits(cfg));
    };

    switch (method) {
    case Method::ZOpt: {
        const int b = require_bits(cfg);
        const auto s = zopt_structure(b);
        auto z = build_z_opt(b, ZOptConfig{}, cfg.seed);
        report["n_v"] = s.n_v;
        report["layers"] = s.layers;
        report["optimization_variables"] = s.n_v;
        report["candidate_set_size"] = b >= 4 ? json(candidate_count(s)) : json(nullptr);
        file = ConstellationFile{z.constellation, z.theta, provenance};
        break;
    }
    case Method::SOpt: {
        const std::size_t c = count_from();
        std::optional<PackingSet> packing;
        if (cfg.packing_file) {
            packing = load_packing(*cfg.packing_file);
            if ((cfg.count || cfg.bits) && packing->size() != c)
                fail(ErrorKind::Format, "packing file holds " + std::to_string(packing->size()) + " points, expected " + std::to_string(c));
        } else if (c == 2 || c == 3 || c == 4 || c == 6 || c == 8 || c == 12) {
            packing = exact_packing(c);
        } else {
            packing = optimize_packing(c, cfg.seed).packing;
        }
        provenance["packing_source"] = std::string(to_string(packing->source()));
        report["packing_min_distance"] = packing->min_distance();
        report["optimization_variables"] = 2 * c;
        file = ConstellationFile{build_s_opt(*packing), std::nullopt, provenance};
        break;
    }
    case Method::ManOpt: {
        const std::size_t c = count_from();
        std::uint64_t evals = 0;
        auto x = build_man_opt(c, cfg.seed);
        manopt_objective(x.codewords(), 1e-2, &evals);
        report["optimization_variables"] = 2 * c;
        report["pairwise_evaluations_per_objective"] = evals;
        file = ConstellationFile{x, std::nullopt, provenance};
        break;
    }
    case Method::ExpMap: file = ConstellationFile{build_exp_map_bits(require_bits(cfg)), std::nullopt, provenance}; break;
    case Method::CubeSplit: file = ConstellationFile{build_cube_split(require_bits(cfg)), std::nullopt, provenance}; break;
    case Method::GrassLattice: {
        int br = 0;
        if (cfg.bits_per_axis)
            br = *cfg.bits_per_axis;
        else if (cfg.bits && *cfg.bits % 2 == 0)
            br = *cfg.bits / 2;
        else
            throw UsageError("grass-lattice needs --bits-per-axis or an even --bits");
        const double alpha = cfg.alpha.value_or(1e-2);
        provenance["alpha"] = alpha;
        provenance["bits_per_axis"] = br;
        file = ConstellationFile{build_grass_lattice(br, alpha), std::nullopt, provenance};
        break;
    }
    case Method::External: throw UsageError("method 'external' cannot be constructed");
    }

    const auto& x = file->constellation;
    const double dmin = min_chordal_distance(x);
    report["tool_version"] = kToolVersion;
    report["config_hash"] = config_hash(cfg);
    report["seed"] = cfg.seed;
    report["method"] = std::string(to_string(x.method()));
    report["B"] = x.bits() ? json(*x.bits()) : json(nullptr);
    report["C"] = x.size();
    report["d_min"] = dmin;
    if (x.size() >= 3) {
        const double bound = fejes_toth_bound(x.size());
        report["fejes_toth_bound"] = bound;
        report["ratio"] = dmin / bound;
    } else {
        report["fejes_toth_bound"] = nullptr;
        report["ratio"] = dmin;
        report["note"] = "bound undefined for C = 2; antipodal optimum d_min = 1";
    }
    write_constellation(*cfg.output, *file);
    const std::string sidecar = *cfg.output + ".report.json";
    std::ofstream rs(sidecar);
    if (!rs) fail(ErrorKind::Format, "cannot write " + sidecar);
    rs << report.dump(1) << '\n';
    out << report.dump() << '\n';
    return kExitOk;
}

// --- evaluate / bound ----------------------------------------------------------

int cmd_evaluate(const RunConfig& cfg, std::ostream& out) {
    if (cfg.constellations.empty()) throw UsageError("evaluate needs at least one constellation file");
    std::vector<ConstellationFile> files;
    for (const auto& p : cfg.constellations) files.push_back(read_constellation(p));
    with_output(cfg, out, [&](std::ostream& os) {
        write_csv_header(os, cfg);
        bool footnote = false;
        os << "method,B,C,d_min,fejes_toth_bound,ratio\n" << std::setprecision(12);
        for (const auto& f : files) {
            const auto& x = f.constellation;
            const double d = min_chordal_distance(x);
            os << to_string(x.method()) << ',';
            if (x.bits()) os << *x.bits();
            os << ',' << x.size() << ',' << d << ',';
            if (x.size() >= 3) {
                const double b = fejes_toth_bound(x.size());
                os << b << ',' << d / b << '\n';
            } else {
                footnote = true;
                os << ',' << d << '\n';
            }
        }
        if (footnote) os << "# C = 2: bound undefined; the antipodal optimum d_min = 1 is used as the ratio reference\n";
    });
    return kExitOk;
}

int cmd_bound(const RunConfig& cfg, std::ostream& out) {
    const std::uint64_t from = cfg.bound_from.value_or(3), to = cfg.bound_to.value_or(from);
    if (from <= 2) throw UsageError("the bound is defined for C >= 3");
    if (to < from) throw UsageError("--to must not be below --from");
    with_output(cfg, out, [&](std::ostream& os) {
        write_csv_header(os, cfg);
        os << "C,fejes_toth_bound\n" << std::setprecision(12);
        for (std::uint64_t c = from; c <= to; ++c) os << c << ',' << fejes_toth_bound(c) << '\n';
    });
    return kExitOk;
}

// --- simulate / bench / detect -------------------------------------------------

struct Loaded {
    ConstellationFile file;
    std::optional<ZOptDetectorState> zopt;
};

Loaded load_single(const RunConfig& cfg) {
    if (cfg.constellations.size() != 1) throw UsageError("exactly one --constellation is required");
    Loaded l{read_constellation(cfg.constellations[0]), std::nullopt};
    l.zopt = zopt_state(l.file);
    return l;
}

std::unique_ptr<Detector> detector_for(const Loaded& l, const std::string& name) {
    DetectorKind kind;
    try {
        kind = parse_detector(name);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    return make_detector(kind, l.file.constellation, l.zopt ? &*l.zopt : nullptr);
}

void check_sim(const RunConfig& cfg) {
    if (cfg.trials < 1) throw UsageError("--trials must be at least 1");
    if (cfg.antennas < 1) throw UsageError("--antennas must be at least 1");
}

int cmd_simulate(const RunConfig& cfg, const std::string& format, std::ostream& out) {
    check_sim(cfg);
    if (cfg.snr_db.empty()) throw UsageError("--snr needs at least one value");
    if (cfg.detectors.size() > 1) throw UsageError("simulate takes one --detector");
    if (format != "csv" && format != "json") throw UsageError("--format must be csv or json");
    const auto l = load_single(cfg);
    const auto det = detector_for(l, cfg.detectors.empty() ? "glrt" : cfg.detectors[0]);
    const auto curve = run_ser(l.file.constellation, *det, {cfg.snr_db, cfg.trials, cfg.antennas, cfg.seed, cfg.threads});
    with_output(cfg, out, [&](std::ostream& os) {
        if (format == "json") {
            json j = {{"tool_version", kToolVersion}, {"format_version", kFormatVersion}, {"config_hash", config_hash(cfg)},
                      {"seed", cfg.seed}, {"detector", std::string(to_string(curve.detector))}, {"antennas", curve.antennas},
                      {"snr_definition", "1 / sigma^2"}, {"config", to_json(cfg)}};
            json pts = json::array();
            for (const auto& p : curve.points)
                pts.push_back({{"snr_db", p.snr_db}, {"trials", p.trials}, {"errors", p.errors}, {"ser", p.ser},
                               {"mean_distance_evals", p.mean_distance_evals}, {"mean_comparisons", p.mean_comparisons},
                               {"max_distance_evals", p.max_distance_evals}, {"max_comparisons", p.max_comparisons}});
            j["points"] = std::move(pts);
            os << j.dump(1) << '\n';
            return;
        }
        write_csv_header(os, cfg);
        os << "# detector: " << to_string(curve.detector) << "\n# snr_definition: 1 / sigma^2\n";
        os << "snr_db,trials,errors,ser,mean_distance_evals,mean_comparisons\n" << std::setprecision(12);
        for (const auto& p : curve.points)
            os << p.snr_db << ',' << p.trials << ',' << p.errors << ',' << p.ser << ',' << p.mean_distance_evals << ','
               << p.mean_comparisons << '\n';
    });
    return kExitOk;
}

int cmd_bench(const RunConfig& cfg, std::ostream& out) {
    check_sim(cfg);
    if (cfg.snr_db.size() > 1) throw UsageError("bench takes a single --snr value");
    const auto l = load_single(cfg);
    std::vector<std::string> names = cfg.detectors;
    if (names.empty()) {
        names = {"glrt", "sopt"};
        if (l.zopt) names.push_back("zopt");
    }
    std::vector<std::unique_ptr<Detector>> owned;
    std::vector<const Detector*> dets;
    for (const auto& n : names) {
        owned.push_back(detector_for(l, n));
        dets.push_back(owned.back().get());
    }
    const double snr = cfg.snr_db.empty() ? 10.0 : cfg.snr_db[0];
    const auto rows = bench_detectors(l.file.constellation, dets, cfg.trials, cfg.antennas, cfg.seed, snr, cfg.threads);
    with_output(cfg, out, [&](std::ostream& os) {
        write_csv_header(os, cfg);
        os << "# snr_db: " << snr << '\n';
        os << "detector,C,trials,mean_distance_evals,max_distance_evals,mean_comparisons,max_comparisons,errors\n"
           << std::setprecision(12);
        for (const auto& r : rows)
            os << to_string(r.detector) << ',' << l.file.constellation.size() << ',' << r.trials << ','
               << r.mean_distance_evals << ',' << r.max_distance_evals << ',' << r.mean_comparisons << ','
               << r.max_comparisons << ',' << r.errors << '\n';
    });
    return kExitOk;
}

int cmd_detect(const RunConfig& cfg, std::ostream& out) {
    if (!cfg.input) throw UsageError("--input is required for detect");
    if (cfg.detectors.size() > 1) throw UsageError("detect takes one --detector");
    const auto l = load_single(cfg);
    const auto det = detector_for(l, cfg.detectors.empty() ? "glrt" : cfg.detectors[0]);
    std::ifstream in(*cfg.input);
    if (!in) fail(ErrorKind::Format, "cannot open " + *cfg.input);
    const auto blocks = parse_received_csv(in);
    with_output(cfg, out, [&](std::ostream& os) {
        write_csv_header(os, cfg);
        os << "# index: one-based codeword number\n";
        os << "trial,index,distance_evals,comparisons\n";
        for (const auto& [trial, y] : blocks) {
            const auto r = det->detect(y);
            os << trial << ',' << r.index + 1 << ',' << r.distance_evals << ',' << r.comparisons << '\n';
        }
    });
    return kExitOk;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Grassmannian constellations on G(2,1): construction, evaluation, detection and simulation.", "blochcon"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));
    Flags f;
    std::vector<Bound> bound;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", f.config, "Load a run configuration JSON; explicit flags override it")->check(CLI::ExistingFile);
        sub->add_option("--write-config", f.write_config, "Write the effective run configuration JSON");
        bound.push_back({sub->add_option("-o,--output", f.output, "Output file (default: stdout)"),
                         [&](RunConfig& c) { c.output = f.output; }});
    };
    auto seed_opt = [&](CLI::App* sub) {
        bound.push_back({sub->add_option("--seed", f.seed, "Random seed (default 1)"), [&](RunConfig& c) { c.seed = f.seed; }});
    };
    auto sim_opts = [&](CLI::App* sub, bool many_detectors) {
        bound.push_back({sub->add_option("-c,--constellation", f.constellations, "Constellation JSON file")->expected(1),
                         [&](RunConfig& c) { c.constellations = f.constellations; }});
        auto* d = many_detectors
                      ? sub->add_option("--detectors", f.detectors, "Detectors: glrt, sopt, zopt")->delimiter(',')
                      : sub->add_option("--detector", f.detectors, "Detector: glrt, sopt or zopt (default glrt)")->expected(1);
        bound.push_back({d, [&](RunConfig& c) { c.detectors = f.detectors; }});
    };
    auto trial_opts = [&](CLI::App* sub) {
        bound.push_back({sub->add_option("--trials", f.trials, "Monte Carlo trials per point"), [&](RunConfig& c) { c.trials = f.trials; }});
        bound.push_back({sub->add_option("-N,--antennas", f.antennas, "Receive antennas N (default 1)"),
                         [&](RunConfig& c) { c.antennas = f.antennas; }});
        bound.push_back({sub->add_option("--threads", f.threads, "Worker threads (default: BLOCHCON_THREADS or all cores)"),
                         [&](RunConfig& c) { c.threads = f.threads; }});
        bound.push_back({sub->add_option("--snr", f.snr, "SNR values in dB (1 / sigma^2), comma separated")->delimiter(','),
                         [&](RunConfig& c) { c.snr_db = f.snr; }});
        seed_opt(sub);
    };

    auto* construct = app.add_subcommand("construct", "Build a constellation and write it as JSON plus a report sidecar");
    common(construct);
    seed_opt(construct);
    bound.push_back({construct->add_option("-m,--method", f.method, "s-opt, z-opt, man-opt, exp-map, cube-split, grass-lattice"),
                     [&](RunConfig& c) { c.method = f.method; }});
    bound.push_back({construct->add_option("-B,--bits", f.bits, "Bits per symbol"), [&](RunConfig& c) { c.bits = f.bits; }});
    bound.push_back({construct->add_option("--count", f.count, "Codeword count (s-opt, man-opt)"), [&](RunConfig& c) { c.count = f.count; }});
    bound.push_back({construct->add_option("--packing-file", f.packing_file, "Sphere packing text file (s-opt)"),
                     [&](RunConfig& c) { c.packing_file = f.packing_file; }});
    bound.push_back({construct->add_option("--bits-per-axis", f.bits_per_axis, "Grass-Lattice bits per real axis"),
                     [&](RunConfig& c) { c.bits_per_axis = f.bits_per_axis; }});
    bound.push_back({construct->add_option("--alpha", f.alpha, "Grass-Lattice grid margin in (0, 0.5), default 0.01"),
                     [&](RunConfig& c) { c.alpha = f.alpha; }});

    auto* evaluate = app.add_subcommand("evaluate", "Minimum distance table for constellation files");
    common(evaluate);
    bound.push_back({evaluate->add_option("files", f.constellations, "Constellation JSON files"),
                     [&](RunConfig& c) { c.constellations = f.constellations; }});

    auto* bnd = app.add_subcommand("bound", "Fejes Toth bound values for a range of C");
    common(bnd);
    bound.push_back({bnd->add_option("--from", f.from, "First C (>= 3)"), [&](RunConfig& c) { c.bound_from = f.from; }});
    bound.push_back({bnd->add_option("--to", f.to, "Last C (default: --from)"), [&](RunConfig& c) { c.bound_to = f.to; }});

    auto* simulate = app.add_subcommand("simulate", "Symbol error rate over an SNR grid");
    common(simulate);
    sim_opts(simulate, false);
    trial_opts(simulate);
    simulate->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    auto* bench = app.add_subcommand("bench", "Detector operation counters on a shared trial stream");
    common(bench);
    sim_opts(bench, true);
    trial_opts(bench);

    auto* detect = app.add_subcommand("detect", "Detect received blocks from a CSV file");
    common(detect);
    sim_opts(detect, false);
    bound.push_back({detect->add_option("--input", f.input, "CSV rows trial,column,re0,im0,re1,im1"),
                     [&](RunConfig& c) { c.input = f.input; }});

    std::vector<const char*> argv{"blochcon"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    CLI::App* sub = app.get_subcommands().front();
    try {
        RunConfig cfg;
        if (!f.config.empty()) {
            cfg = load_run_config(f.config);
            if (!cfg.command.empty() && cfg.command != sub->get_name())
                throw UsageError("configuration is for '" + cfg.command + "', not '" + sub->get_name() + "'");
        }
        cfg.command = sub->get_name();
        for (const auto& b : bound)
            if (b.opt->count() > 0) b.apply(cfg);
        if (!f.write_config.empty()) save_run_config(f.write_config, cfg);

        const std::string& name = cfg.command;
        if (name == "construct") return cmd_construct(cfg, out);
        if (name == "evaluate") return cmd_evaluate(cfg, out);
        if (name == "bound") return cmd_bound(cfg, out);
        if (name == "simulate") return cmd_simulate(cfg, f.format, out);
        if (name == "bench") return cmd_bench(cfg, out);
        if (name == "detect") return cmd_detect(cfg, out);
        throw UsageError("unknown subcommand");
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        err << to_string(e.kind()) << ": " << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    }
}

} // namespace blochgrass
