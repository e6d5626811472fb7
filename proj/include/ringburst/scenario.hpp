#pragma once

#include <ringburst/dynamics.hpp>
#include <ringburst/excitation.hpp>
#include <ringburst/polarimetry.hpp>
#include <ringburst/relaxation.hpp>
#include <ringburst/ring_model.hpp>

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace ringburst {

/// Everything one run needs, with every default resolved.
struct ScenarioConfig
{
    std::string name;
    std::string material;
    RingConfig ring;      ///< M_cut resolved
    RingScales scales;
    PulseSequence pulses;
    SimulationGrid grid;
    SimulationOptions options;
    DetectorSpec detector; ///< grids resolved against the simulation record
    double band_lo = 0.0;  ///< [rad/s]
    double band_hi = 0.0;
    double theta = 0.0;
    double phi = 0.0;
    std::filesystem::path output_dir;
    std::string output_prefix;

    /// Fully explicit configuration (SI numbers only); re-ingesting it
    /// reproduces the run.
    nlohmann::json resolved;
};

/// "key=value" overrides on dotted paths ("ring.T=10", "pulses.events.1.alpha=0.2").
/// Values are read as JSON when they parse, otherwise as strings.
using Override = std::pair<std::string, std::string>;
Override parse_override(const std::string& text);
void apply_override(nlohmann::json& doc, const Override& ov);

/// Parses, applies overrides and validates. Throws ConfigError with the
/// dotted field path and, when known, the line in the source file.
ScenarioConfig parse_config(const std::filesystem::path& path,
                            const std::vector<Override>& overrides = {},
                            const MaterialTable& materials = MaterialTable::from_environment());

ScenarioConfig parse_config_text(const std::string& text, const std::string& source_name,
                                 const std::vector<Override>& overrides = {},
                                 const MaterialTable& materials = MaterialTable::from_environment());

/// Quantity strings: a bare number is SI; "<value> <unit>" with
/// time units s ms us ns ps fs tau_F, length units m mm um nm,
/// angular frequency units rad/s omega_F meV; terms may be summed with " + ".
enum class Dimension { time, length, angular_frequency };
double parse_quantity(const nlohmann::json& v, Dimension dim, double tau_F = 0.0,
                      double omega_F = 0.0);

/// 64-bit FNV-1a of a byte string.
std::uint64_t fnv1a64(const std::string& bytes);

/// Resolved configuration plus a "_manifest" block (hash, version, subcommand).
nlohmann::json make_manifest(const ScenarioConfig& cfg, const std::string& subcommand);

const char* version_string();

/// Seventeen significant digits ("%.17g"), which read back to the same double.
std::string format_double(double v);

} // namespace ringburst
