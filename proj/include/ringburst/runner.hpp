#pragma once

#include <ringburst/scenario.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace ringburst {

struct RunOptions
{
    /// Replaces output.dir of the config when non-empty.
    std::filesystem::path out_dir;
    /// Divide Stokes outputs by S_norm.
    bool normalize_snorm = false;
};

/// Files produced by one subcommand, written atomically: either all of them
/// appear or none does.
struct RunOutputs
{
    std::vector<std::filesystem::path> files;
};

/// Runs "rates", "simulate", "spectrogram" or "pcirc" on a parsed scenario.
/// Every run also writes <prefix>.<subcommand>.manifest.json.
RunOutputs run(const std::string& subcommand, const ScenarioConfig& cfg,
               const RunOptions& opts = {});

/// One varied key with its list of values ("ring.T=1,4,10").
struct SweepAxis
{
    std::string key;
    std::vector<std::string> values;
};

SweepAxis parse_sweep_axis(const std::string& text);

/// Runs the task for every point of the Cartesian product of the axes,
/// each in <out>/point_<k>, up to `jobs` scenarios at a time, and writes
/// <out>/sweep.csv listing the points.
RunOutputs run_sweep(const std::filesystem::path& config, const std::vector<Override>& base,
                     const std::vector<SweepAxis>& axes, const std::string& task, int jobs,
                     const RunOptions& opts = {});

/// CSV tables as strings (the exact bytes written by run()).
std::string rates_csv(const ScenarioConfig& cfg);
/// Per-pair tables m, m', gamma_sp, gamma_ssp, Gamma_total with the configured toggles.
std::string rate_tables_csv(const ScenarioConfig& cfg);
std::string spectrogram_csv(const StokesSpectrogram& spec, double scale);
std::string pcirc_csv(const BandTraces& band, const PcircTrace& pc, double scale);

} // namespace ringburst
