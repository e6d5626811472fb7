#include <ringburst/runner.hpp>

#include <ringburst/errors.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace ringburst {

namespace fs = std::filesystem;

namespace {

/// Collects named contents and writes them through temporary files.
class AtomicWriter
{
public:
    explicit AtomicWriter(fs::path dir) : m_dir(std::move(dir)) {}

    void add(const std::string& name, std::string contents)
    {
        m_items.emplace_back(name, std::move(contents));
    }

    RunOutputs commit()
    {
        fs::create_directories(m_dir);
        std::vector<fs::path> temps;
        try {
            for (const auto& [name, text] : m_items) {
                const fs::path tmp = m_dir / (name + ".tmp");
                temps.push_back(tmp);
                std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
                out << text;
                out.close();
                if (!out)
                    throw Error("cannot write '" + tmp.string() + "'");
            }
            RunOutputs done;
            for (std::size_t i = 0; i < m_items.size(); ++i) {
                const fs::path dst = m_dir / m_items[i].first;
                fs::rename(temps[i], dst);
                done.files.push_back(dst);
            }
            return done;
        } catch (...) {
            std::error_code ec;
            for (const auto& t : temps)
                fs::remove(t, ec);
            throw;
        }
    }

private:
    fs::path m_dir;
    std::vector<std::pair<std::string, std::string>> m_items;
};

void row(std::string& out, std::initializer_list<double> values)
{
    bool first = true;
    for (double v : values) {
        if (!first)
            out += ',';
        out += format_double(v);
        first = false;
    }
    out += '\n';
}

std::string series_csv(const DipoleSeries& s)
{
    std::ostringstream os;
    s.write_csv(os);
    return os.str();
}

std::string impulses_csv(const DipoleSeries& s)
{
    std::ostringstream os;
    s.write_impulses_csv(os);
    return os.str();
}

SimulationResult simulate_scenario(const ScenarioConfig& cfg)
{
    const RateTable rates = build_rate_table(cfg.ring, cfg.scales, cfg.options.rates);
    return simulate(cfg.ring, cfg.scales, rates, cfg.pulses, cfg.grid, cfg.options);
}

StokesSpectrogram spectrogram_of(const ScenarioConfig& cfg, const DipoleSeries& series)
{
    StokesSpectrogram perp = stokes_perp(series, cfg.detector, cfg.ring.kappa, cfg.scales.omega_F);
    if (cfg.theta == 0.0)
        return perp;
    return stokes_angular(perp, cfg.theta, cfg.phi);
}

} // namespace

std::string rates_csv(const ScenarioConfig& cfg)
{
    const RateTable t = build_rate_table(cfg.ring, cfg.scales, RateToggles{});
    const RingScales& s = cfg.scales;
    struct Entry
    {
        const char* name;
        double value;
        const char* unit;
    };
    const double g_sp = effective_dipole_rate(t.gamma_sp, s);
    const double g_ssp = effective_dipole_rate(t.gamma_ssp, s);
    const Entry rows[] = {
        {"tau_F", s.tau_F, "s"},
        {"omega_F", s.omega_F, "rad/s"},
        {"m_F", static_cast<double>(s.m_F), "1"},
        {"M_cut", static_cast<double>(s.M_cut), "1"},
        {"mu_c", s.mu_c, "J"},
        {"gamma", t.gamma_rad, "1/s"},
        {"gamma_s", t.gamma_s, "1/s"},
        {"inverse_tau_LA", inverse_tau_LA(cfg.ring), "1/s"},
        {"gamma_sp_dipole", g_sp, "1/s"},
        {"gamma_ssp_dipole", g_ssp, "1/s"},
        {"Gamma_dipole", effective_dipole_rate(t.Gamma_total, s), "1/s"},
    };
    std::string out = "quantity,value,unit\n";
    for (const auto& r : rows)
        out += std::string(r.name) + "," + format_double(r.value) + "," + r.unit + "\n";
    const double channels[] = {t.gamma_rad, g_sp, t.gamma_s, g_ssp};
    const char* names[] = {"radiative", "spontaneous", "coherent_phonon", "incoherent_phonon"};
    std::size_t best = 0;
    for (std::size_t i = 1; i < 4; ++i)
        if (channels[i] > channels[best])
            best = i;
    out += std::string("dominant_channel,") + names[best] + ",\n";
    return out;
}

std::string rate_tables_csv(const ScenarioConfig& cfg)
{
    const RateTable t = build_rate_table(cfg.ring, cfg.scales, cfg.options.rates);
    const int M = t.M_cut;
    std::string out = "m,mp,gamma_sp,gamma_ssp,Gamma_total\n";
    for (int m = -M; m <= M; ++m)
        for (int mp = -M; mp <= M; ++mp) {
            const int a = m + M;
            const int b = mp + M;
            row(out, {static_cast<double>(m), static_cast<double>(mp), t.gamma_sp(a, b),
                      t.gamma_ssp(a, b), t.Gamma_total(a, b)});
        }
    return out;
}

std::string spectrogram_csv(const StokesSpectrogram& spec, double scale)
{
    if (!spec.has_linear())
        throw UnsupportedError("spectrogram output needs S1 and S2, available only at theta = 0");
    std::string out = "t,omega,S0,S1,S2,S3\n";
    out.reserve(spec.times.size() * spec.omegas.size() * 110);
    for (std::size_t i = 0; i < spec.times.size(); ++i)
        for (std::size_t k = 0; k < spec.omegas.size(); ++k) {
            const auto r = static_cast<Eigen::Index>(i);
            const auto col = static_cast<Eigen::Index>(k);
            row(out, {spec.times[i], spec.omegas[k], spec.S[0](r, col) / scale,
                      spec.S[1](r, col) / scale, spec.S[2](r, col) / scale,
                      spec.S[3](r, col) / scale});
        }
    return out;
}

std::string pcirc_csv(const BandTraces& band, const PcircTrace& pc, double scale)
{
    std::string out = "t,S0_bar,S3_bar,P_circ,defined\n";
    for (std::size_t i = 0; i < band.times.size(); ++i) {
        out += format_double(band.times[i]) + "," + format_double(band.S[0][i] / scale) + "," +
               format_double(band.S[3][i] / scale) + ",";
        out += pc.defined[i] ? format_double(pc.value[i]) + ",1\n" : std::string("NA,0\n");
    }
    return out;
}

RunOutputs run(const std::string& subcommand, const ScenarioConfig& cfg, const RunOptions& opts)
{
    const fs::path dir = opts.out_dir.empty() ? cfg.output_dir : opts.out_dir;
    const std::string p = cfg.output_prefix;
    AtomicWriter w(dir);
    const double scale = opts.normalize_snorm ? stokes_norm(cfg.ring, cfg.scales) : 1.0;

    if (subcommand == "rates") {
        w.add(p + ".rates.csv", rates_csv(cfg));
        w.add(p + ".rate_tables.csv", rate_tables_csv(cfg));
    } else if (subcommand == "simulate") {
        const SimulationResult sim = simulate_scenario(cfg);
        w.add(p + ".dipole.csv", series_csv(sim.series));
        w.add(p + ".impulses.csv", impulses_csv(sim.series));
    } else if (subcommand == "spectrogram") {
        const SimulationResult sim = simulate_scenario(cfg);
        const StokesSpectrogram spec = spectrogram_of(cfg, sim.series);
        w.add(p + ".spectrogram.csv", spectrogram_csv(spec, scale));
    } else if (subcommand == "pcirc") {
        const SimulationResult sim = simulate_scenario(cfg);
        const StokesSpectrogram spec = spectrogram_of(cfg, sim.series);
        const BandTraces band = band_integrate(spec, cfg.band_lo, cfg.band_hi);
        const PcircTrace pc = p_circ(band.S[3], band.S[0], band.covered);
        w.add(p + ".pcirc.csv", pcirc_csv(band, pc, scale));
    } else {
        throw ConfigError("unknown subcommand '" + subcommand + "'");
    }
    {
        nlohmann::json m = make_manifest(cfg, subcommand);
        m["_manifest"]["normalize_snorm"] = opts.normalize_snorm;
        w.add(p + "." + subcommand + ".manifest.json", m.dump(2) + "\n");
    }
    return w.commit();
}

SweepAxis parse_sweep_axis(const std::string& text)
{
    const Override ov = parse_override(text);
    SweepAxis ax;
    ax.key = ov.first;
    std::string cur;
    int depth = 0;
    // commas inside brackets or quotes belong to the value
    bool quoted = false;
    for (char ch : ov.second) {
        if (ch == '"')
            quoted = !quoted;
        if (!quoted && (ch == '[' || ch == '{'))
            ++depth;
        if (!quoted && (ch == ']' || ch == '}'))
            --depth;
        if (ch == ',' && depth == 0 && !quoted) {
            ax.values.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    ax.values.push_back(cur);
    for (const auto& v : ax.values)
        if (v.empty())
            throw ConfigError("sweep axis '" + text + "' has an empty value");
    return ax;
}

RunOutputs run_sweep(const fs::path& config, const std::vector<Override>& base,
                     const std::vector<SweepAxis>& axes, const std::string& task, int jobs,
                     const RunOptions& opts)
{
    if (axes.empty())
        throw ConfigError("sweep needs at least one --vary axis");
    if (jobs < 1)
        throw ConfigError("--jobs must be at least 1");

    std::size_t total = 1;
    for (const auto& a : axes)
        total *= a.values.size();

    // parse every point up front so a bad value fails before any run
    std::vector<ScenarioConfig> points;
    std::vector<std::vector<std::string>> labels;
    points.reserve(total);
    for (std::size_t k = 0; k < total; ++k) {
        std::vector<Override> ovs = base;
        std::vector<std::string> lab;
        std::size_t rem = k;
        for (std::size_t a = axes.size(); a-- > 0;) {
            const auto& ax = axes[a];
            const std::string& v = ax.values[rem % ax.values.size()];
            rem /= ax.values.size();
            ovs.emplace_back(ax.key, v);
            lab.insert(lab.begin(), v);
        }
        points.push_back(parse_config(config, ovs));
        labels.push_back(std::move(lab));
    }

    const fs::path root = opts.out_dir.empty() ? points.front().output_dir : opts.out_dir;
    std::vector<RunOutputs> results(total);
    std::vector<std::exception_ptr> errors(total);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t k = next++; k < total; k = next++) {
            try {
                RunOptions o = opts;
                o.out_dir = root / ("point_" + std::to_string(k));
                results[k] = run(task, points[k], o);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };
    const int n = std::min<int>(jobs, static_cast<int>(total));
    std::vector<std::thread> pool;
    for (int i = 1; i < n; ++i)
        pool.emplace_back(worker);
    worker();
    for (auto& t : pool)
        t.join();

    for (std::size_t k = 0; k < total; ++k) {
        if (errors[k]) {
            std::error_code ec;
            for (const auto& r : results)
                for (const auto& f : r.files)
                    fs::remove(f, ec);
            std::rethrow_exception(errors[k]);
        }
    }

    std::string csv = "point";
    for (const auto& a : axes)
        csv += "," + a.key;
    csv += ",directory\n";
    for (std::size_t k = 0; k < total; ++k) {
        csv += std::to_string(k);
        for (const auto& v : labels[k]) {
            std::string cell = v;
            if (cell.find_first_of(",\"") != std::string::npos) {
                std::string q = "\"";
                for (char ch : cell)
                    q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
                cell = q + "\"";
            }
            csv += "," + cell;
        }
        csv += ",point_" + std::to_string(k) + "\n";
    }
    AtomicWriter w(root);
    w.add("sweep.csv", csv);
    RunOutputs all = w.commit();
    for (const auto& r : results)
        all.files.insert(all.files.end(), r.files.begin(), r.files.end());
    return all;
}

} // namespace ringburst
