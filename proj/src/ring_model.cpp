#include <ringburst/ring_model.hpp>

#include <ringburst/constants.hpp>
#include <ringburst/errors.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

namespace ringburst {

namespace c = constants;

Material gaas()
{
    Material m;
    m.name = "GaAs";
    m.m_eff_ratio = 0.067;
    m.kappa = 12.5;
    m.deform_D = -8.6 * c::elementary_charge;
    m.rho_s = 5.32e3;
    m.c_LA = 5.29e3;
    m.omega_D = 30e-3 * c::elementary_charge / c::hbar;
    return m;
}

MaterialTable::MaterialTable() { insert(gaas()); }

MaterialTable MaterialTable::from_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open materials table '" + path + "'");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("materials table '" + path + "': " + e.what());
    }
    if (!doc.is_object())
        throw ConfigError("materials table '" + path + "' must be a JSON object");

    MaterialTable table;
    for (const auto& [name, entry] : doc.items()) {
        Material m = table.contains(name) ? table.get(name) : Material{};
        m.name = name;
        for (const auto& [key, value] : entry.items()) {
            if (!value.is_number())
                throw ConfigError("materials." + name + "." + key + " must be a number");
            const double v = value.get<double>();
            if (key == "m_eff_ratio")
                m.m_eff_ratio = v;
            else if (key == "kappa")
                m.kappa = v;
            else if (key == "deform_D_eV")
                m.deform_D = v * c::elementary_charge;
            else if (key == "rho_s")
                m.rho_s = v;
            else if (key == "c_LA")
                m.c_LA = v;
            else if (key == "hbar_omega_D_meV")
                m.omega_D = v * 1e-3 * c::elementary_charge / c::hbar;
            else
                throw ConfigError("materials." + name + ": unknown key '" + key + "'");
        }
        if (m.m_eff_ratio <= 0 || m.kappa <= 0 || m.rho_s <= 0 || m.c_LA <= 0 ||
            m.omega_D <= 0)
            throw ConfigError("materials." + name + ": incomplete or non-positive constants");
        table.insert(m);
    }
    return table;
}

MaterialTable MaterialTable::from_environment()
{
    if (const char* path = std::getenv("RINGBURST_MATERIALS"); path && *path)
        return from_file(path);
    return MaterialTable{};
}

const Material& MaterialTable::get(const std::string& name) const
{
    auto it = m_table.find(name);
    if (it == m_table.end())
        throw ConfigError("unknown material '" + name + "'");
    return it->second;
}

bool MaterialTable::contains(const std::string& name) const
{
    return m_table.count(name) != 0;
}

void MaterialTable::insert(Material m)
{
    auto key = m.name;
    m_table[key] = std::move(m);
}

std::vector<std::string> MaterialTable::names() const
{
    std::vector<std::string> out;
    for (const auto& kv : m_table)
        out.push_back(kv.first);
    return out;
}

RingConfig RingConfig::from_material(const Material& mat, double r0, double d,
                                     int N, double T)
{
    RingConfig cfg;
    cfg.r0 = r0;
    cfg.d = d;
    cfg.N = N;
    cfg.T = T;
    cfg.m_eff = mat.m_eff_ratio * c::electron_mass;
    cfg.kappa = mat.kappa;
    cfg.deform_D = mat.deform_D;
    cfg.rho_s = mat.rho_s;
    cfg.c_LA = mat.c_LA;
    cfg.omega_D = mat.omega_D;
    return cfg;
}

void RingConfig::validate() const
{
    auto fail = [](const std::string& what) { throw ConfigError(what); };
    if (!(r0 > 0) || !std::isfinite(r0))
        fail("ring.r0 must be positive");
    if (!(d > 0) || !(d < r0 / 2))
        fail("ring.d must satisfy 0 < d < r0/2");
    if (N < 2)
        fail("ring.N must be at least 2");
    if (N % 2 != 0)
        fail("ring.N must be even (spin-degenerate filling)");
    if (!(m_eff > 0))
        fail("ring.m_eff must be positive");
    if (!(kappa > 0))
        fail("ring.kappa must be positive");
    if (!(T >= 0) || !std::isfinite(T))
        fail("ring.T must be non-negative");
    if (!(rho_s > 0) || !(c_LA > 0) || !(omega_D > 0))
        fail("ring phonon constants (rho_s, c_LA, omega_D) must be positive");
    if (M_cut < 0)
        fail("ring.M_cut must be non-negative (0 = automatic)");
    if (M_cut > 0) {
        const int mF = fermi_index(N);
        if (M_cut < mF + 5) {
            std::ostringstream os;
            os << "ring.M_cut = " << M_cut << " leaves no margin above m_F = " << mF
               << " (need at least " << mF + 5 << ")";
            fail(os.str());
        }
        if (N > 2 * (2 * M_cut + 1))
            fail("ring.N exceeds the capacity of the truncated basis");
    }
}

double dispersion(int m, double m_eff, double r0)
{
    const double md = static_cast<double>(m);
    return c::hbar * c::hbar * md * md / (2.0 * m_eff * r0 * r0);
}

double energy(int m, const RingConfig& cfg)
{
    if (cfg.M_cut > 0 && std::abs(m) > cfg.M_cut)
        throw RangeError("angular index " + std::to_string(m) + " exceeds cutoff " +
                         std::to_string(cfg.M_cut));
    return dispersion(m, cfg.m_eff, cfg.r0);
}

int fermi_index(int N)
{
    return static_cast<int>(std::lround(N / 4.0));
}

namespace {

double fermi_function(double e, double mu, double kT)
{
    const double x = (e - mu) / kT;
    if (x > 0) {
        const double ex = std::exp(-x);
        return ex / (1.0 + ex);
    }
    return 1.0 / (1.0 + std::exp(x));
}

Occupation ground_state(int N, const std::vector<double>& eps)
{
    const int dim = static_cast<int>(eps.size());
    const int M = (dim - 1) / 2;
    Occupation occ;
    occ.f0.assign(eps.size(), 0.0);
    const int states = N / 2;
    int full = 0;        // |m| <= full are filled
    bool half = false;   // shell full+1 is half filled
    if (states % 2 == 1) {
        full = (states - 1) / 2;
    } else {
        full = (states - 2) / 2;
        half = true;
    }
    for (int m = -full; m <= full; ++m)
        occ.f0[static_cast<std::size_t>(m + M)] = 1.0;
    if (half) {
        occ.f0[static_cast<std::size_t>(full + 1 + M)] = 0.5;
        occ.f0[static_cast<std::size_t>(-(full + 1) + M)] = 0.5;
        occ.mu_c = eps[static_cast<std::size_t>(full + 1 + M)];
    } else {
        occ.mu_c = 0.5 * (eps[static_cast<std::size_t>(full + M)] +
                          eps[static_cast<std::size_t>(full + 1 + M)]);
    }
    return occ;
}

} // namespace

Occupation solve_occupation(const RingConfig& cfg, const std::vector<double>& eps)
{
    if (eps.empty() || eps.size() % 2 == 0)
        throw ConfigError("energy ladder must have odd length 2M+1");
    const double capacity = 2.0 * static_cast<double>(eps.size());
    if (cfg.N > capacity)
        throw ConfigError("N exceeds the capacity 2(2M+1) of the ladder");
    if (cfg.T < 0)
        throw ConfigError("temperature must be non-negative");

    if (cfg.T == 0.0) {
        if (cfg.N + 1 > static_cast<int>(capacity))
            throw ConfigError("ground state fills the whole ladder; raise M_cut");
        return ground_state(cfg.N, eps);
    }

    const double kT = c::boltzmann * cfg.T;
    const double N = static_cast<double>(cfg.N);
    auto count = [&](double mu) {
        double s = 0.0;
        for (double e : eps)
            s += fermi_function(e, mu, kT);
        return 2.0 * s;
    };

    const auto [emin, emax] = std::minmax_element(eps.begin(), eps.end());
    double lo = *emin - 60.0 * kT;
    double hi = *emax + 60.0 * kT;
    if (!(count(lo) < N) || !(count(hi) > N))
        throw ConfigError("no bracketing interval for the chemical potential");

    double mu = 0.5 * (lo + hi);
    for (int it = 0; it < 400; ++it) {
        mu = 0.5 * (lo + hi);
        const double diff = count(mu) - N;
        if (std::abs(diff) <= 1e-13 * N)
            break;
        if (diff < 0)
            lo = mu;
        else
            hi = mu;
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi)))
            break;
    }

    Occupation occ;
    occ.mu_c = mu;
    occ.f0.reserve(eps.size());
    for (double e : eps)
        occ.f0.push_back(fermi_function(e, mu, kT));
    if (std::abs(count(mu) - N) > 1e-12 * N)
        throw ConfigError("chemical-potential bisection did not converge");
    return occ;
}

int default_cutoff(const RingConfig& cfg)
{
    const int mF = fermi_index(cfg.N);
    const double unit = dispersion(1, cfg.m_eff, cfg.r0);
    const double hbar_omega_F = 2.0 * unit * mF; // hbar * v_F / r0
    const double kT = c::boltzmann * cfg.T;
    const int thermal = static_cast<int>(std::ceil(kT / hbar_omega_F));
    int M = mF + std::max(20, 6 * thermal);
    if (cfg.T > 0) {
        // extend until the Fermi tail at the edge is below exp(-25)
        RingConfig probe = cfg;
        std::vector<double> eps;
        for (int m = -M; m <= M; ++m)
            eps.push_back(unit * m * m);
        const double mu = solve_occupation(probe, eps).mu_c;
        while ((unit * M * M - mu) / kT < 25.0)
            ++M;
    }
    while (cfg.N > 2 * (2 * M + 1))
        ++M;
    return M;
}

RingConfig with_resolved_cutoff(RingConfig cfg)
{
    if (cfg.M_cut == 0)
        cfg.M_cut = default_cutoff(cfg);
    return cfg;
}

RingScales derive_scales(const RingConfig& input)
{
    if (input.N < 2)
        throw ConfigError("invalid configuration: N must be at least 2");
    const RingConfig cfg = with_resolved_cutoff(input);
    cfg.validate();

    RingScales s;
    s.M_cut = cfg.M_cut;
    s.T = cfg.T;
    s.energy_unit = dispersion(1, cfg.m_eff, cfg.r0);
    s.eps.reserve(static_cast<std::size_t>(s.dim()));
    for (int m = -s.M_cut; m <= s.M_cut; ++m)
        s.eps.push_back(dispersion(m, cfg.m_eff, cfg.r0));
    s.m_F = fermi_index(cfg.N);
    s.v_F = c::hbar * s.m_F / (cfg.m_eff * cfg.r0);
    s.tau_F = 2.0 * c::pi * cfg.r0 / s.v_F;
    s.omega_F = 2.0 * c::pi / s.tau_F;
    auto occ = solve_occupation(cfg, s.eps);
    s.mu_c = occ.mu_c;
    s.f0 = std::move(occ.f0);
    return s;
}

double RingScales::fermi(int m) const
{
    if (std::abs(m) <= M_cut)
        return occupation(m);
    if (T == 0.0)
        return 0.0;
    const double e = energy_unit * static_cast<double>(m) * static_cast<double>(m);
    return fermi_function(e, mu_c, c::boltzmann * T);
}

} // namespace ringburst
