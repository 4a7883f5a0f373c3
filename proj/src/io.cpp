#include "blochgrass/io.hpp"

#include "blochgrass/error.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace blochgrass {

using nlohmann::json;

void check_format_version(const std::string& version) {
    int major = 0, minor = 0;
    char dot = 0;
    std::istringstream is(version);
    if (!(is >> major >> dot >> minor) || dot != '.' || !is.eof() || major < 0 || minor < 0)
        fail(ErrorKind::Format, "malformed format_version '" + version + "'");
    if (major > kFormatMajor)
        fail(ErrorKind::Format, "format_version " + version + " is newer than this reader (major " +
                                    std::to_string(kFormatMajor) + ")");
}

json constellation_to_json(const ConstellationFile& f) {
    const auto& x = f.constellation;
    json j;
    j["format_version"] = kFormatVersion;
    j["tool_version"] = kToolVersion;
    j["method"] = std::string(to_string(x.method()));
    j["B"] = x.bits() ? json(*x.bits()) : json(nullptr);
    j["C"] = x.size();
    j["T"] = 2;
    j["M"] = 1;
    json cw = json::array();
    for (const auto& c : x.codewords()) cw.push_back({c.c0(), 0.0, c.c1().real(), c.c1().imag()});
    j["codewords"] = std::move(cw);
    if (f.zopt_theta) j["zopt"] = {{"theta", *f.zopt_theta}};
    j["provenance"] = f.provenance;
    return j;
}

ConstellationFile constellation_from_json(const json& j) {
    try {
        if (!j.is_object()) fail(ErrorKind::Format, "constellation file must hold a JSON object");
        if (j.contains("format_version")) check_format_version(j.at("format_version").get<std::string>());
        if (j.value("T", 2) != 2 || j.value("M", 1) != 1) fail(ErrorKind::Format, "only T = 2, M = 1 constellations are supported");
        const Method method = parse_method(j.at("method").get<std::string>());
        const auto& rows = j.at("codewords");
        if (!rows.is_array() || rows.empty()) fail(ErrorKind::Format, "codewords must be a non-empty array");
        std::vector<Codeword> cws;
        cws.reserve(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto& r = rows[i];
            if (!r.is_array() || r.size() != 4) fail(ErrorKind::Format, "codeword " + std::to_string(i) + " must have 4 numbers");
            try {
                cws.push_back(Codeword::from_unit(cplx(r[0].get<double>(), r[1].get<double>()),
                                                  cplx(r[2].get<double>(), r[3].get<double>())));
            } catch (const Error& e) {
                fail(ErrorKind::Format, "codeword " + std::to_string(i) + ": " + e.what());
            }
        }
        if (j.contains("C") && j.at("C").get<std::size_t>() != cws.size())
            fail(ErrorKind::Format, "C does not match the number of codewords");
        ConstellationFile f{Constellation(std::move(cws), method), std::nullopt, json::object()};
        if (j.contains("B") && !j.at("B").is_null()) {
            const int b = j.at("B").get<int>();
            if (!f.constellation.bits() || *f.constellation.bits() != b)
                fail(ErrorKind::Format, "B does not match the number of codewords");
        }
        if (j.contains("zopt")) f.zopt_theta = j.at("zopt").at("theta").get<std::vector<double>>();
        if (j.contains("provenance")) f.provenance = j.at("provenance");
        return f;
    } catch (const json::exception& e) {
        fail(ErrorKind::Format, std::string("constellation JSON: ") + e.what());
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Format) throw;
        fail(ErrorKind::Format, std::string("constellation JSON: ") + e.what());
    }
}

void write_constellation(const std::filesystem::path& path, const ConstellationFile& f) {
    std::ofstream os(path);
    if (!os) fail(ErrorKind::Format, "cannot write " + path.string());
    os << constellation_to_json(f).dump(1) << '\n';
}

namespace {

json read_json_file(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) fail(ErrorKind::Format, "cannot open " + path.string());
    try {
        return json::parse(is);
    } catch (const json::exception& e) {
        fail(ErrorKind::Format, path.string() + ": " + e.what());
    }
}

} // namespace

ConstellationFile read_constellation(const std::filesystem::path& path) {
    const auto j = read_json_file(path);
    try {
        return constellation_from_json(j);
    } catch (const Error& e) {
        fail(e.kind(), path.string() + ": " + e.what());
    }
}

std::optional<ZOptDetectorState> zopt_state(const ConstellationFile& f) {
    if (!f.zopt_theta) return std::nullopt;
    const auto bits = f.constellation.bits();
    if (!bits) fail(ErrorKind::Format, "Z-Opt layer angles need a power-of-two constellation");
    try {
        return ZOptDetectorState(zopt_structure(*bits), *f.zopt_theta);
    } catch (const Error& e) {
        fail(ErrorKind::Format, std::string("Z-Opt layer angles: ") + e.what());
    }
}

// --- RunConfig ---------------------------------------------------------------

json to_json(const RunConfig& c) {
    json j;
    j["format_version"] = c.format_version;
    j["command"] = c.command;
    if (c.method) j["method"] = *c.method;
    if (c.bits) j["bits"] = *c.bits;
    if (c.count) j["count"] = *c.count;
    j["seed"] = c.seed;
    if (c.bits_per_axis) j["bits_per_axis"] = *c.bits_per_axis;
    if (c.alpha) j["alpha"] = *c.alpha;
    if (c.packing_file) j["packing_file"] = *c.packing_file;
    j["constellations"] = c.constellations;
    j["detectors"] = c.detectors;
    j["snr_db"] = c.snr_db;
    j["trials"] = c.trials;
    j["antennas"] = c.antennas;
    j["threads"] = c.threads;
    if (c.bound_from) j["bound_from"] = *c.bound_from;
    if (c.bound_to) j["bound_to"] = *c.bound_to;
    if (c.input) j["input"] = *c.input;
    if (c.output) j["output"] = *c.output;
    return j;
}

RunConfig run_config_from_json(const json& j) {
    static const std::set<std::string> known = {
        "format_version", "command", "method", "bits", "count", "seed", "bits_per_axis", "alpha", "packing_file",
        "constellations", "detectors", "snr_db", "trials", "antennas", "threads", "bound_from", "bound_to", "input",
        "output"};
    if (!j.is_object()) fail(ErrorKind::Format, "run configuration must be a JSON object");
    for (const auto& [key, _] : j.items())
        if (!known.count(key)) fail(ErrorKind::Format, "unknown run configuration field '" + key + "'");
    try {
        RunConfig c;
        c.format_version = j.at("format_version").get<std::string>();
        check_format_version(c.format_version);
        c.command = j.at("command").get<std::string>();
        auto opt = [&](const char* k, auto& field) {
            if (j.contains(k)) field = j.at(k).get<typename std::decay_t<decltype(field)>::value_type>();
        };
        auto req = [&](const char* k, auto& field) {
            if (j.contains(k)) field = j.at(k).get<std::decay_t<decltype(field)>>();
        };
        opt("method", c.method);
        opt("bits", c.bits);
        opt("count", c.count);
        req("seed", c.seed);
        opt("bits_per_axis", c.bits_per_axis);
        opt("alpha", c.alpha);
        opt("packing_file", c.packing_file);
        req("constellations", c.constellations);
        req("detectors", c.detectors);
        req("snr_db", c.snr_db);
        req("trials", c.trials);
        req("antennas", c.antennas);
        req("threads", c.threads);
        opt("bound_from", c.bound_from);
        opt("bound_to", c.bound_to);
        opt("input", c.input);
        opt("output", c.output);
        return c;
    } catch (const json::exception& e) {
        fail(ErrorKind::Format, std::string("run configuration: ") + e.what());
    }
}

RunConfig load_run_config(const std::filesystem::path& path) {
    try {
        return run_config_from_json(read_json_file(path));
    } catch (const Error& e) {
        fail(e.kind(), path.string() + ": " + e.what());
    }
}

void save_run_config(const std::filesystem::path& path, const RunConfig& c) {
    std::ofstream os(path);
    if (!os) fail(ErrorKind::Format, "cannot write " + path.string());
    os << to_json(c).dump(1) << '\n';
}

std::string config_hash(const RunConfig& c) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : to_json(c).dump()) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_csv_header(std::ostream& os, const RunConfig& c) {
    os << "# tool_version: " << kToolVersion << '\n'
       << "# format_version: " << kFormatVersion << '\n'
       << "# command: " << c.command << '\n'
       << "# config_hash: " << config_hash(c) << '\n'
       << "# seed: " << c.seed << '\n';
}

std::vector<std::pair<std::uint64_t, ReceivedBlock>> parse_received_csv(std::istream& in) {
    std::vector<std::pair<std::uint64_t, ReceivedBlock>> out;
    std::string line;
    std::size_t lineno = 0;
    bool first_data = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
        auto where = [&] { return "received CSV line " + std::to_string(lineno); };
        if (first_data) {
            first_data = false;
            if (!cells.empty() && cells[0].find_first_not_of(" 0123456789") != std::string::npos) continue;
        }
        if (cells.size() != 6) fail(ErrorKind::Format, where() + ": expected 6 columns");
        std::uint64_t trial;
        double v[4];
        try {
            std::size_t pos = 0;
            trial = std::stoull(cells[0], &pos);
            if (pos != cells[0].size()) throw std::invalid_argument("trial");
            (void)std::stoull(cells[1]);
            for (int k = 0; k < 4; ++k) {
                v[k] = std::stod(cells[2 + k], &pos);
                if (pos != cells[2 + k].size()) throw std::invalid_argument("value");
            }
        } catch (const std::exception&) {
            fail(ErrorKind::Format, where() + ": cannot parse numbers");
        }
        const CVec2 col{cplx(v[0], v[1]), cplx(v[2], v[3])};
        if (!out.empty() && out.back().first == trial) {
            out.back().second.push_back(col);
        } else {
            if (!out.empty() && trial < out.back().first) fail(ErrorKind::Format, where() + ": trials out of order");
            out.push_back({trial, ReceivedBlock{col}});
        }
    }
    return out;
}

} // namespace blochgrass
