#pragma once

// File formats: constellation JSON, run configuration JSON, received-block CSV
// and the provenance header shared by every CSV output.

#include "blochgrass/detectors.hpp"
#include "blochgrass/geometry.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace blochgrass {

inline constexpr const char* kToolVersion = "1.0.0";
/// major.minor; readers accept any minor of a known major.
inline constexpr const char* kFormatVersion = "1.0";
inline constexpr int kFormatMajor = 1;

/// Throws a format error when `version` is malformed or of a newer major.
void check_format_version(const std::string& version);

struct ConstellationFile {
    Constellation constellation;
    /// Layer angles when the file describes a Z-Opt constellation.
    std::optional<std::vector<double>> zopt_theta;
    nlohmann::json provenance = nlohmann::json::object();
};

nlohmann::json constellation_to_json(const ConstellationFile& f);
ConstellationFile constellation_from_json(const nlohmann::json& j);

void write_constellation(const std::filesystem::path& path, const ConstellationFile& f);
ConstellationFile read_constellation(const std::filesystem::path& path);

/// Z-Opt detector state for a file that carries layer angles.
std::optional<ZOptDetectorState> zopt_state(const ConstellationFile& f);

/// Every parameter a subcommand can take. Unset optionals are omitted on disk.
struct RunConfig {
    std::string format_version = kFormatVersion;
    std::string command;
    std::optional<std::string> method;
    std::optional<int> bits;
    std::optional<std::uint64_t> count;
    std::uint64_t seed = 1;
    std::optional<int> bits_per_axis;
    std::optional<double> alpha;
    std::optional<std::string> packing_file;
    std::vector<std::string> constellations;
    std::vector<std::string> detectors;
    std::vector<double> snr_db;
    std::uint64_t trials = 0;
    int antennas = 1;
    unsigned threads = 0;
    std::optional<std::uint64_t> bound_from;
    std::optional<std::uint64_t> bound_to;
    std::optional<std::string> input;
    std::optional<std::string> output;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

nlohmann::json to_json(const RunConfig& c);
/// Rejects unknown fields, wrong types and future major versions.
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);
void save_run_config(const std::filesystem::path& path, const RunConfig& c);

/// 64-bit FNV-1a of the canonical (sorted-key, compact) JSON, as 16 hex digits.
std::string config_hash(const RunConfig& c);

/// "# key: value" lines carrying tool version, config hash and seed.
void write_csv_header(std::ostream& os, const RunConfig& c);

/// Received blocks as CSV rows "trial,column,re0,im0,re1,im1"; '#' lines and a
/// leading header row are skipped. Trials must appear in non-decreasing order.
std::vector<std::pair<std::uint64_t, ReceivedBlock>> parse_received_csv(std::istream& in);

} // namespace blochgrass
