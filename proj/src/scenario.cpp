#include <ringburst/scenario.hpp>

#include <ringburst/constants.hpp>
#include <ringburst/errors.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace ringburst {

namespace c = constants;
using nlohmann::json;

const char* version_string() { return "ringburst 0.1.0"; }

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::uint64_t fnv1a64(const std::string& bytes)
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

// ---------------------------------------------------------------- overrides

Override parse_override(const std::string& text)
{
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("override '" + text + "' is not of the form key=value");
    return {text.substr(0, eq), text.substr(eq + 1)};
}

namespace {

std::vector<std::string> split_path(const std::string& path)
{
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : path) {
        if (ch == '.') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    parts.push_back(cur);
    for (const auto& p : parts)
        if (p.empty())
            throw ConfigError("malformed key path '" + path + "'");
    return parts;
}

bool is_index(const std::string& s)
{
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char ch) { return ch >= '0' && ch <= '9'; });
}

} // namespace

void apply_override(json& doc, const Override& ov)
{
    json value;
    try {
        value = json::parse(ov.second);
    } catch (const json::parse_error&) {
        value = ov.second;
    }
    json* node = &doc;
    const auto parts = split_path(ov.first);
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const auto& p = parts[i];
        const bool last = i + 1 == parts.size();
        if (node->is_array()) {
            if (!is_index(p))
                throw ConfigError("override " + ov.first + ": '" + p + "' must index an array");
            const auto k = std::stoul(p);
            if (k >= node->size())
                throw ConfigError("override " + ov.first + ": index " + p + " out of range");
            node = &(*node)[k];
        } else {
            if (node->is_null())
                *node = json::object();
            if (!node->is_object())
                throw ConfigError("override " + ov.first + ": '" + p + "' is below a scalar");
            node = &(*node)[p];
        }
        if (last)
            *node = value;
    }
}

// ---------------------------------------------------------------- quantities

namespace {

struct UnitEntry
{
    const char* name;
    double factor;
};

bool split_number_unit(const std::string& s, double& value, std::string& unit)
{
    std::istringstream is(s);
    is.imbue(std::locale::classic());
    if (!(is >> value))
        return false;
    std::getline(is, unit);
    const auto b = unit.find_first_not_of(" \t");
    unit = b == std::string::npos ? std::string() : unit.substr(b);
    const auto e = unit.find_last_not_of(" \t");
    if (e != std::string::npos)
        unit.resize(e + 1);
    return true;
}

} // namespace

double parse_quantity(const json& v, Dimension dim, double tau_F, double omega_F)
{
    if (v.is_number())
        return v.get<double>();
    if (!v.is_string())
        throw ConfigError("expected a number or a \"<value> <unit>\" string");
    const std::string text = v.get<std::string>();
    // "0.7 ns + 0.25 tau_F": sum of terms
    const auto plus = text.find(" + ");
    if (plus != std::string::npos)
        return parse_quantity(text.substr(0, plus), dim, tau_F, omega_F) +
               parse_quantity(text.substr(plus + 3), dim, tau_F, omega_F);
    double x = 0.0;
    std::string unit;
    if (!split_number_unit(text, x, unit))
        throw ConfigError("cannot read a number from '" + text + "'");
    if (unit.empty())
        return x;

    static const UnitEntry time_units[] = {{"s", 1.0},      {"ms", 1e-3},  {"us", 1e-6},
                                           {"ns", 1e-9},    {"ps", 1e-12}, {"fs", 1e-15}};
    static const UnitEntry length_units[] = {{"m", 1.0}, {"mm", 1e-3}, {"um", 1e-6}, {"nm", 1e-9}};
    switch (dim) {
    case Dimension::time:
        if (unit == "tau_F") {
            if (!(tau_F > 0))
                throw ConfigError("tau_F is not known at this point");
            return x * tau_F;
        }
        for (const auto& u : time_units)
            if (unit == u.name)
                return x * u.factor;
        break;
    case Dimension::length:
        for (const auto& u : length_units)
            if (unit == u.name)
                return x * u.factor;
        break;
    case Dimension::angular_frequency:
        if (unit == "rad/s")
            return x;
        if (unit == "omega_F") {
            if (!(omega_F > 0))
                throw ConfigError("omega_F is not known at this point");
            return x * omega_F;
        }
        if (unit == "meV")
            return x * 1e-3 * c::elementary_charge / c::hbar;
        break;
    }
    throw ConfigError("unknown unit '" + unit + "'");
}

// ---------------------------------------------------------------- parsing

namespace {

/// Approximate source line of a dotted path, found by scanning for each
/// quoted key in turn.
class LineFinder
{
public:
    explicit LineFinder(std::string text) : m_text(std::move(text)) {}

    int line_of(const std::string& path) const
    {
        if (m_text.empty())
            return 0;
        std::size_t pos = 0;
        for (const auto& part : split_path(path)) {
            if (is_index(part))
                continue;
            const std::string needle = "\"" + part + "\"";
            const auto hit = m_text.find(needle, pos);
            if (hit == std::string::npos)
                return 0;
            pos = hit + needle.size();
        }
        return 1 + static_cast<int>(std::count(m_text.begin(), m_text.begin() + static_cast<long>(pos), '\n'));
    }

private:
    std::string m_text;
};

class Context
{
public:
    Context(std::string source, const LineFinder& lines) : m_source(std::move(source)), m_lines(lines) {}

    [[noreturn]] void fail(const std::string& path, const std::string& msg) const
    {
        std::ostringstream os;
        os << m_source;
        const int line = m_lines.line_of(path);
        if (line > 0)
            os << ":" << line;
        os << ": " << path << ": " << msg;
        throw ConfigError(os.str());
    }

private:
    std::string m_source;
    const LineFinder& m_lines;
};

std::size_t edit_distance(const std::string& a, const std::string& b)
{
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j)
        row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t up = row[j];
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] != b[j - 1])});
            diag = up;
        }
    }
    return row[b.size()];
}

/// JSON object view that remembers which keys were read.
class Section
{
public:
    Section(const json& j, std::string path, const Context& ctx)
        : m_j(j), m_path(std::move(path)), m_ctx(ctx)
    {
        if (!m_j.is_object())
            m_ctx.fail(m_path, "must be an object");
    }

    std::string key_path(const std::string& key) const
    {
        return m_path.empty() ? key : m_path + "." + key;
    }

    bool has(const std::string& key) const { return m_j.contains(key); }

    const json& at(const std::string& key)
    {
        if (!m_j.contains(key)) {
            // a misspelt required key is better reported as itself
            const std::size_t near = std::max<std::size_t>(1, key.size() / 3);
            for (const auto& [other, value] : m_j.items())
                if (!m_used.count(other) && edit_distance(other, key) <= near)
                    m_ctx.fail(key_path(other), "unknown key (did you mean '" + key + "'?)");
            m_ctx.fail(key_path(key), "missing required field");
        }
        m_used.insert(key);
        return m_j.at(key);
    }

    const json* find(const std::string& key)
    {
        if (!m_j.contains(key))
            return nullptr;
        m_used.insert(key);
        return &m_j.at(key);
    }

    void ignore(const std::string& key) { m_used.insert(key); }

    /// Rejects any key outside names before anything is read.
    void only(std::initializer_list<const char*> names) const
    {
        for (const auto& [key, value] : m_j.items())
            if (std::none_of(names.begin(), names.end(), [&](const char* n) { return key == n; }))
                m_ctx.fail(key_path(key), "unknown key");
    }

    Section section(const std::string& key)
    {
        static const json empty = json::object();
        const json* v = find(key);
        return Section(v ? *v : empty, key_path(key), m_ctx);
    }

    double number(const std::string& key, double def, bool required = false)
    {
        const json* v = required ? &at(key) : find(key);
        if (!v)
            return def;
        if (!v->is_number())
            m_ctx.fail(key_path(key), "must be a number");
        return v->get<double>();
    }

    int integer(const std::string& key, int def, bool required = false)
    {
        const json* v = required ? &at(key) : find(key);
        if (!v)
            return def;
        if (!v->is_number_integer())
            m_ctx.fail(key_path(key), "must be an integer");
        return v->get<int>();
    }

    bool boolean(const std::string& key, bool def)
    {
        const json* v = find(key);
        if (!v)
            return def;
        if (!v->is_boolean())
            m_ctx.fail(key_path(key), "must be true or false");
        return v->get<bool>();
    }

    std::string string(const std::string& key, const std::string& def, bool required = false)
    {
        const json* v = required ? &at(key) : find(key);
        if (!v)
            return def;
        if (!v->is_string())
            m_ctx.fail(key_path(key), "must be a string");
        return v->get<std::string>();
    }

    double quantity(const std::string& key, Dimension dim, double def, bool required = false,
                    double tau_F = 0.0, double omega_F = 0.0)
    {
        const json* v = required ? &at(key) : find(key);
        if (!v)
            return def;
        try {
            return parse_quantity(*v, dim, tau_F, omega_F);
        } catch (const ConfigError& e) {
            m_ctx.fail(key_path(key), e.what());
        }
    }

    /// Rejects keys that were never read.
    void finish() const
    {
        for (const auto& [key, value] : m_j.items())
            if (!m_used.count(key))
                m_ctx.fail(key_path(key), "unknown key");
    }

    const Context& context() const { return m_ctx; }
    const std::string& path() const { return m_path; }

private:
    const json& m_j;
    std::string m_path;
    const Context& m_ctx;
    std::set<std::string> m_used;
};

Axis parse_axis(Section& s, const std::string& key)
{
    const std::string a = s.string(key, "", true);
    if (a == "x")
        return Axis::x;
    if (a == "y")
        return Axis::y;
    s.context().fail(s.key_path(key), "must be \"x\" or \"y\"");
}

const char* axis_name(Axis a) { return a == Axis::x ? "x" : "y"; }

} // namespace

ScenarioConfig parse_config_text(const std::string& text, const std::string& source_name,
                                 const std::vector<Override>& overrides,
                                 const MaterialTable& materials)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(source_name + ": malformed JSON: " + e.what());
    }
    for (const auto& ov : overrides)
        apply_override(doc, ov);

    const LineFinder lines(text);
    const Context ctx(source_name, lines);
    Section root(doc, "", ctx);
    root.only({"name", "ring", "pulses", "simulation", "rates", "detector", "output", "_manifest"});
    root.ignore("_manifest");

    ScenarioConfig cfg;
    json res = json::object();
    cfg.name = root.string("name", "scenario");
    res["name"] = cfg.name;

    // ring
    {
        Section s = root.section("ring");
        cfg.material = s.string("material", "GaAs");
        if (!materials.contains(cfg.material))
            ctx.fail(s.key_path("material"), "unknown material '" + cfg.material + "'");
        Material mat = materials.get(cfg.material);
        mat.m_eff_ratio = s.number("m_eff_ratio", mat.m_eff_ratio);
        mat.kappa = s.number("kappa", mat.kappa);
        if (const json* v = s.find("deform_D")) {
            try {
                if (v->is_string()) {
                    double x = 0;
                    std::string unit;
                    if (!split_number_unit(v->get<std::string>(), x, unit) || unit != "eV")
                        throw ConfigError("expected a number in J or \"<value> eV\"");
                    mat.deform_D = x * c::elementary_charge;
                } else if (v->is_number()) {
                    mat.deform_D = v->get<double>();
                } else {
                    throw ConfigError("expected a number in J or \"<value> eV\"");
                }
            } catch (const ConfigError& e) {
                ctx.fail(s.key_path("deform_D"), e.what());
            }
        }
        mat.rho_s = s.number("rho_s", mat.rho_s);
        mat.c_LA = s.number("c_LA", mat.c_LA);
        mat.omega_D = s.quantity("omega_D", Dimension::angular_frequency, mat.omega_D);

        const double r0 = s.quantity("r0", Dimension::length, 0.0, true);
        const double d = s.quantity("d", Dimension::length, 0.0, true);
        const int N = s.integer("N", 0, true);
        const double T = s.number("T", 0.0, true);
        RingConfig ring = RingConfig::from_material(mat, r0, d, N, T);
        ring.M_cut = s.integer("M_cut", 0);
        s.finish();
        try {
            ring.validate();
            cfg.ring = with_resolved_cutoff(ring);
            cfg.scales = derive_scales(cfg.ring);
        } catch (const ConfigError& e) {
            ctx.fail("ring", e.what());
        }
        res["ring"] = {{"material", cfg.material},     {"m_eff_ratio", mat.m_eff_ratio},
                       {"kappa", mat.kappa},           {"deform_D", mat.deform_D},
                       {"rho_s", mat.rho_s},           {"c_LA", mat.c_LA},
                       {"omega_D", mat.omega_D},       {"r0", r0},
                       {"d", d},                       {"N", N},
                       {"T", T},                       {"M_cut", cfg.ring.M_cut}};
    }
    const double tau_F = cfg.scales.tau_F;
    const double omega_F = cfg.scales.omega_F;
    const double r0 = cfg.ring.r0;

    // pulses
    {
        Section s = root.section("pulses");
        const double period = s.quantity("period", Dimension::time, 0.0, false, tau_F);
        const int count = s.integer("count", 1);
        std::vector<PulseEvent> events;
        json rev = json::array();
        if (const json* list = s.find("events")) {
            if (!list->is_array())
                ctx.fail(s.key_path("events"), "must be an array");
            for (std::size_t i = 0; i < list->size(); ++i) {
                Section e((*list)[i], s.key_path("events") + "." + std::to_string(i), ctx);
                const std::string type = e.string("type", "", true);
                const double t = e.quantity("t", Dimension::time, 0.0, false, tau_F);
                json out = {{"type", type}, {"t", t}};
                if (type == "kick" || type == "hcp") {
                    const Axis axis = parse_axis(e, "axis");
                    const double alpha = e.number("alpha", 0.0, true);
                    const double tau_d = e.quantity("tau_d", Dimension::time, 0.0, type == "hcp", tau_F);
                    out["axis"] = axis_name(axis);
                    out["alpha"] = alpha;
                    out["tau_d"] = tau_d;
                    if (type == "kick") {
                        events.push_back(KickEvent{t, axis, alpha, tau_d});
                    } else {
                        const int samples = e.integer("samples", 401);
                        out["samples"] = samples;
                        try {
                            events.push_back(hcp_waveform(tau_d, alpha, axis, r0, t, samples));
                        } catch (const Error& err) {
                            ctx.fail(e.path(), err.what());
                        }
                    }
                } else if (type == "cpp") {
                    const std::string sense = e.string("sense", "", true);
                    if (sense != "+" && sense != "-")
                        ctx.fail(e.key_path("sense"), "must be \"+\" or \"-\"");
                    const double alpha = e.number("alpha", 0.0, true);
                    const int cycles = e.integer("cycles", 4);
                    const double omega = e.quantity("omega", Dimension::angular_frequency, omega_F,
                                                    false, tau_F, omega_F);
                    const double cep = e.number("cep", 0.0);
                    const int spc = e.integer("samples_per_cycle", 128);
                    out.update({{"sense", sense}, {"alpha", alpha}, {"cycles", cycles},
                                {"omega", omega}, {"cep", cep}, {"samples_per_cycle", spc}});
                    try {
                        events.push_back(cpp_waveform(alpha, cycles, omega,
                                                      sense == "+" ? Sense::plus : Sense::minus,
                                                      r0, t, cep, spc));
                    } catch (const Error& err) {
                        ctx.fail(e.path(), err.what());
                    }
                } else if (type == "waveform") {
                    WaveformEvent w;
                    w.t_on = t;
                    w.dt = e.quantity("dt", Dimension::time, 0.0, true, tau_F);
                    try {
                        w.Ex = e.at("Ex").get<std::vector<double>>();
                        w.Ey = e.at("Ey").get<std::vector<double>>();
                        w.validate();
                    } catch (const json::exception&) {
                        ctx.fail(e.path(), "Ex and Ey must be arrays of numbers");
                    } catch (const Error& err) {
                        ctx.fail(e.path(), err.what());
                    }
                    out.update({{"dt", w.dt}, {"Ex", w.Ex}, {"Ey", w.Ey}});
                    events.push_back(std::move(w));
                } else {
                    ctx.fail(e.key_path("type"), "must be one of kick, hcp, cpp, waveform");
                }
                e.finish();
                rev.push_back(out);
            }
        }
        s.finish();
        try {
            cfg.pulses = PulseSequence(std::move(events), period, count);
            cfg.pulses.validate();
        } catch (const ConfigError& e) {
            ctx.fail("pulses", e.what());
        }
        res["pulses"] = {{"period", period}, {"count", count}, {"events", rev}};
    }

    // simulation
    {
        Section s = root.section("simulation");
        const double span = s.quantity("span", Dimension::time, 40.0 * tau_F, false, tau_F);
        const int spp = s.integer("samples_per_tau_F", 256);
        const double t_start = s.quantity("t_start", Dimension::time, 0.0, false, tau_F);
        cfg.options.driven_dt = s.quantity("driven_dt", Dimension::time, 0.0, false, tau_F);
        s.finish();
        if (!(span > 0))
            ctx.fail("simulation.span", "must be positive");
        if (spp < 64)
            ctx.fail("simulation.samples_per_tau_F", "must be at least 64");
        cfg.grid = SimulationGrid::per_period(cfg.scales, span / tau_F, spp, t_start);
        res["simulation"] = {{"span", span}, {"samples_per_tau_F", spp}, {"t_start", t_start},
                             {"driven_dt", cfg.options.driven_dt}};
    }

    // rates
    {
        Section s = root.section("rates");
        cfg.options.rates.radiative = s.boolean("radiative", true);
        cfg.options.rates.spontaneous = s.boolean("spontaneous", true);
        cfg.options.rates.coherent_phonon = s.boolean("coherent_phonon", true);
        cfg.options.rates.incoherent_phonon = s.boolean("incoherent_phonon", true);
        s.finish();
        res["rates"] = {{"radiative", cfg.options.rates.radiative},
                        {"spontaneous", cfg.options.rates.spontaneous},
                        {"coherent_phonon", cfg.options.rates.coherent_phonon},
                        {"incoherent_phonon", cfg.options.rates.incoherent_phonon}};
    }

    // detector
    {
        Section s = root.section("detector");
        DetectorSpec& det = cfg.detector;
        det.DeltaT = s.quantity("DeltaT", Dimension::time, 100e-12, false, tau_F);
        det.t_d = s.quantity("t_d", Dimension::time, 0.0, false, tau_F);
        const double w_lo = s.quantity("omega_min", Dimension::angular_frequency, 0.0, false, tau_F, omega_F);
        const double w_hi = s.quantity("omega_max", Dimension::angular_frequency, 4.0 * omega_F, false, tau_F, omega_F);
        const int n_omega = s.integer("n_omega", 512);
        const double t_first = s.quantity("t_first", Dimension::time, cfg.grid.t_start, false, tau_F);
        const double t_step = s.quantity("t_step", Dimension::time, det.DeltaT / 4.0, false, tau_F);
        const double t_rec_end = cfg.grid.t_start + cfg.grid.dt * static_cast<double>(cfg.grid.samples - 1);
        int n_times = s.integer("n_times", 0);
        det.kick_impulses = s.boolean("kick_impulses", false);
        cfg.theta = s.number("theta", 0.0);
        cfg.phi = s.number("phi", 0.0);
        double band_lo = 0.0;
        double band_hi = w_hi;
        if (const json* band = s.find("band")) {
            if (!band->is_array() || band->size() != 2)
                ctx.fail(s.key_path("band"), "must be a two-element array");
            try {
                band_lo = parse_quantity((*band)[0], Dimension::angular_frequency, tau_F, omega_F);
                band_hi = parse_quantity((*band)[1], Dimension::angular_frequency, tau_F, omega_F);
            } catch (const ConfigError& e) {
                ctx.fail(s.key_path("band"), e.what());
            }
        }
        s.finish();
        if (!(det.DeltaT > 0))
            ctx.fail("detector.DeltaT", "must be positive");
        if (n_omega < 2 || !(w_hi > w_lo))
            ctx.fail("detector.n_omega", "frequency grid needs n_omega >= 2 and omega_max > omega_min");
        if (!(t_step > 0))
            ctx.fail("detector.t_step", "must be positive");
        if (n_times <= 0)
            n_times = static_cast<int>(std::floor((t_rec_end - t_first) / t_step + 1e-9)) + 1;
        if (n_times < 1)
            ctx.fail("detector.t_first", "lies after the end of the simulated record");
        if (!(band_lo >= w_lo) || !(band_hi <= w_hi * (1 + 1e-12)) || !(band_lo < band_hi))
            ctx.fail("detector.band", "must lie inside [omega_min, omega_max] with lo < hi");
        if (!(cfg.theta >= 0.0) || !(cfg.theta <= c::pi))
            ctx.fail("detector.theta", "must lie in [0, pi]");
        det.omega = {w_lo, (w_hi - w_lo) / (n_omega - 1), static_cast<std::size_t>(n_omega)};
        det.time = {t_first, t_step, static_cast<std::size_t>(n_times)};
        cfg.band_lo = band_lo;
        cfg.band_hi = std::min(band_hi, det.omega.last());
        res["detector"] = {{"DeltaT", det.DeltaT},     {"t_d", det.t_d},
                           {"omega_min", w_lo},        {"omega_max", w_hi},
                           {"n_omega", n_omega},       {"t_first", t_first},
                           {"t_step", t_step},         {"n_times", n_times},
                           {"kick_impulses", det.kick_impulses},
                           {"theta", cfg.theta},       {"phi", cfg.phi},
                           {"band", {band_lo, band_hi}}};
    }

    // output
    {
        Section s = root.section("output");
        cfg.output_dir = s.string("dir", "out");
        cfg.output_prefix = s.string("prefix", cfg.name);
        s.finish();
        res["output"] = {{"dir", cfg.output_dir.string()}, {"prefix", cfg.output_prefix}};
    }
    root.finish();
    cfg.resolved = std::move(res);
    return cfg;
}

ScenarioConfig parse_config(const std::filesystem::path& path,
                            const std::vector<Override>& overrides,
                            const MaterialTable& materials)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open config '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path.string(), overrides, materials);
}

nlohmann::json make_manifest(const ScenarioConfig& cfg, const std::string& subcommand)
{
    json m = cfg.resolved;
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(cfg.resolved.dump())));
    m["_manifest"] = {{"config_hash", hash},
                      {"version", version_string()},
                      {"subcommand", subcommand},
                      {"tau_F", cfg.scales.tau_F},
                      {"omega_F", cfg.scales.omega_F},
                      {"m_F", cfg.scales.m_F}};
    return m;
}

} // namespace ringburst
