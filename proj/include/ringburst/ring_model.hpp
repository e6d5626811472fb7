#pragma once

#include <map>
#include <string>
#include <vector>

namespace ringburst {

/// Bulk constants of the ring material.
struct Material
{
    std::string name;
    double m_eff_ratio = 0.0; ///< effective mass in units of the free electron mass
    double kappa = 0.0;       ///< dielectric constant
    double deform_D = 0.0;    ///< LA deformation potential [J]
    double rho_s = 0.0;       ///< lattice mass density [kg/m^3]
    double c_LA = 0.0;        ///< LA sound velocity [m/s]
    double omega_D = 0.0;     ///< Debye frequency [rad/s]
};

/// Built-in GaAs constants (n-type, electrons).
Material gaas();

/// Named material presets, extendable from a JSON file of the form
/// { "GaAs": { "m_eff_ratio": 0.067, "kappa": 12.5, "deform_D_eV": -8.6,
///             "rho_s": 5320, "c_LA": 5290, "hbar_omega_D_meV": 30 }, ... }
class MaterialTable
{
public:
    /// Table holding only the built-in presets.
    MaterialTable();

    /// Built-in presets overlaid with the entries of a JSON file.
    static MaterialTable from_file(const std::string& path);

    /// Table selected by the RINGBURST_MATERIALS environment variable, or the
    /// built-in one when it is unset.
    static MaterialTable from_environment();

    const Material& get(const std::string& name) const;
    bool contains(const std::string& name) const;
    void insert(Material m);
    std::vector<std::string> names() const;

private:
    std::map<std::string, Material> m_table;
};

/// Full physical parameter set of a single ring.
struct RingConfig
{
    double r0 = 0.0;       ///< radius [m]
    double d = 0.0;        ///< width [m]
    int N = 0;             ///< carrier count (both spins)
    double m_eff = 0.0;    ///< effective mass [kg]
    double kappa = 0.0;
    double T = 0.0;        ///< temperature [K]
    double deform_D = 0.0; ///< [J]
    double rho_s = 0.0;    ///< [kg/m^3]
    double c_LA = 0.0;     ///< [m/s]
    double omega_D = 0.0;  ///< [rad/s]
    int M_cut = 0;         ///< angular-momentum cutoff, 0 = choose automatically

    /// Ring with the material constants copied in.
    static RingConfig from_material(const Material& mat, double r0, double d,
                                    int N, double T);

    /// Throws ConfigError naming the first violated invariant. The cutoff is
    /// not checked when M_cut == 0.
    void validate() const;
};

/// Ladder of single-particle energies and the thermal equilibrium on it.
/// Arrays are indexed by m + M_cut.
struct RingScales
{
    int M_cut = 0;
    std::vector<double> eps;
    int m_F = 0;
    double v_F = 0.0;
    double tau_F = 0.0;
    double omega_F = 0.0;
    std::vector<double> f0;
    double mu_c = 0.0;
    double T = 0.0;
    double energy_unit = 0.0; ///< hbar^2 / (2 m_eff r0^2) [J]

    int dim() const { return 2 * M_cut + 1; }
    int index(int m) const { return m + M_cut; }
    double energy(int m) const { return eps.at(static_cast<std::size_t>(index(m))); }
    double occupation(int m) const { return f0.at(static_cast<std::size_t>(index(m))); }

    /// Equilibrium occupation at an arbitrary index. Inside the basis this is
    /// f0; outside it the Fermi function with the same chemical potential.
    double fermi(int m) const;
};

/// eps_m = hbar^2 m^2 / (2 m_eff r0^2); throws RangeError for |m| > M_cut
/// when a cutoff is set.
double energy(int m, const RingConfig& cfg);

/// Same dispersion without any cutoff check.
double dispersion(int m, double m_eff, double r0);

/// m_F = round(N/4).
int fermi_index(int N);

/// Automatic cutoff used when RingConfig::M_cut == 0 (see README).
int default_cutoff(const RingConfig& cfg);

struct Occupation
{
    double mu_c = 0.0;
    std::vector<double> f0;
};

/// Fermi-Dirac occupations on a ladder (indexed by m + M) with the chemical
/// potential fixed by 2 sum f0 = N. T == 0 fills the N/2 lowest |m| states,
/// splitting a partially filled +-m shell equally.
Occupation solve_occupation(const RingConfig& cfg, const std::vector<double>& eps);

/// Resolves the cutoff (if automatic) and computes every derived scale.
RingScales derive_scales(const RingConfig& cfg);

/// The configuration with M_cut resolved to the value derive_scales uses.
RingConfig with_resolved_cutoff(RingConfig cfg);

} // namespace ringburst
