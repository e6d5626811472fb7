#include <ringburst/errors.hpp>
#include <ringburst/runner.hpp>
#include <ringburst/scenario.hpp>

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

namespace {

enum Exit { ok = 0, usage = 1, config = 2, numeric = 3 };

struct Common
{
    std::string config;
    std::string positional;
    std::vector<std::string> sets;
    std::string out;
    bool snorm = false;
};

void add_common(CLI::App* cmd, Common& c)
{
    cmd->add_option("config_file", c.positional, "scenario JSON (same as --config)");
    cmd->add_option("--config", c.config, "scenario JSON file");
    cmd->add_option("--set", c.sets, "override a key, e.g. --set ring.T=10")->take_all();
    cmd->add_option("--out", c.out, "output directory (overrides output.dir)");
    cmd->add_flag("--normalize-snorm", c.snorm, "divide Stokes outputs by S_norm");
}

std::string config_path(const Common& c)
{
    if (!c.config.empty() && !c.positional.empty() && c.config != c.positional)
        throw ringburst::ConfigError("two different config files given");
    const std::string p = c.config.empty() ? c.positional : c.config;
    if (p.empty())
        throw ringburst::ConfigError("no config file given (use --config <path>)");
    return p;
}

std::vector<ringburst::Override> overrides(const Common& c)
{
    std::vector<ringburst::Override> ovs;
    for (const auto& s : c.sets)
        ovs.push_back(ringburst::parse_override(s));
    return ovs;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Light bursts from kicked quantum rings: rates, dipole dynamics, "
                 "time-resolved Stokes spectra"};
    app.require_subcommand(1);
    app.set_version_flag("--version", ringburst::version_string());

    const char* simple[] = {"rates", "simulate", "spectrogram", "pcirc"};
    const char* help[] = {"decay rates of the ring", "dipole trajectory on the time grid",
                          "time x frequency Stokes parameters",
                          "band-integrated Stokes traces and circular-polarization degree"};
    Common common[4];
    for (int i = 0; i < 4; ++i)
        add_common(app.add_subcommand(simple[i], help[i]), common[i]);

    Common sweep_common;
    std::vector<std::string> vary;
    std::string task = "rates";
    int jobs = 1;
    CLI::App* sweep = app.add_subcommand("sweep", "run a task over a grid of key values");
    add_common(sweep, sweep_common);
    sweep->add_option("--vary", vary, "key=v1,v2,... (repeatable)")->required();
    sweep->add_option("--task", task, "rates, simulate, spectrogram or pcirc");
    sweep->add_option("--jobs", jobs, "scenarios run concurrently")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        for (int i = 0; i < 4; ++i) {
            if (!app.got_subcommand(simple[i]))
                continue;
            const Common& c = common[i];
            const auto cfg = ringburst::parse_config(config_path(c), overrides(c));
            ringburst::RunOptions opts;
            opts.out_dir = c.out;
            opts.normalize_snorm = c.snorm;
            for (const auto& f : ringburst::run(simple[i], cfg, opts).files)
                std::cout << f.string() << "\n";
        }
        if (app.got_subcommand("sweep")) {
            std::vector<ringburst::SweepAxis> axes;
            for (const auto& v : vary)
                axes.push_back(ringburst::parse_sweep_axis(v));
            ringburst::RunOptions opts;
            opts.out_dir = sweep_common.out;
            opts.normalize_snorm = sweep_common.snorm;
            const auto out = ringburst::run_sweep(config_path(sweep_common), overrides(sweep_common),
                                                  axes, task, jobs, opts);
            for (const auto& f : out.files)
                std::cout << f.string() << "\n";
        }
    } catch (const ringburst::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return config;
    } catch (const ringburst::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return numeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage;
    }
    return ok;
}
