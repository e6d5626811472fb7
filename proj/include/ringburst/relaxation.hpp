#pragma once

#include <ringburst/ring_model.hpp>

#include <Eigen/Dense>

#include <unordered_map>

namespace ringburst {

/// Which dissipation channels contribute to the off-diagonal decay.
struct RateToggles
{
    bool radiative = true;
    bool spontaneous = true;
    bool coherent_phonon = true;
    bool incoherent_phonon = true;

    static RateToggles none() { return {false, false, false, false}; }
};

/// All dissipation rates of one configuration. Tables are indexed by
/// (m + M, m' + M) and symmetric.
struct RateTable
{
    int M_cut = 0;
    double gamma_rad = 0.0;
    Eigen::MatrixXd gamma_sp;
    double gamma_s = 0.0;
    Eigen::MatrixXd gamma_ssp;
    Eigen::MatrixXd Gamma_total;

    double total(int m, int mp) const { return Gamma_total(m + M_cut, mp + M_cut); }

    /// Table with every rate zero.
    static RateTable zero(int M_cut);
};

struct ArrayInfo
{
    int N_r = 1;
    double delta_r0 = 0.0;
    double gamma_sigma = 0.0;
    double tau_spr = 0.0;
};

/// Radiative damping of the dipole, sqrt(kappa) e^2 omega_F^2 N / (6 m* c^3)
/// with e^2 read as e^2 / (4 pi eps0).
double gamma_rad(const RingConfig& cfg, const RingScales& scales);

/// Superradiant rate of N_r identical rings, gamma_rad * N_r.
double gamma_array(const RingConfig& cfg, const RingScales& scales, int N_r);

/// Dephasing time of a ring ensemble with radius spread delta_r0,
/// (2 pi / omega_F) (r0 / delta_r0).
double tau_spread(const RingConfig& cfg, const RingScales& scales, double delta_r0);

/// The array rate is only meaningful for t < tau_spr.
ArrayInfo array_info(const RingConfig& cfg, const RingScales& scales, int N_r,
                     double delta_r0);

/// Occupancy bracket 2 + f_{m+1} + f_{m'+1} - f_{m-1} - f_{m'-1}.
double spontaneous_bracket(int m, int mp, const RingScales& scales);

/// Spontaneous-emission decoherence of rho_{m m'}:
/// gamma |(eps_m - eps_m') / hbar omega_F|^3 * bracket, floored at 0.
double gamma_sp(int m, int mp, const RingScales& scales, double gamma_rad);

/// Radial form factor of the LA-phonon coupling,
/// F(y) = 8 pi^2 y int_0^y dx sin^2(x/2) / (sqrt(1 - x^2/y^2) x^2 (x^2 - 4 pi^2)^2).
/// Throws DomainError for y < 0.
double phonon_form_factor(double y);

/// |D|^2 / (hbar c_LA^2 rho_s d^2 r0).
double inverse_tau_LA(const RingConfig& cfg);

/// Coherent-phonon dipole decay (1/tau_LA) F(omega_F d / c_LA). Throws
/// ValidityError when omega_F >= omega_D.
double gamma_coherent_phonon(const RingConfig& cfg, const RingScales& scales);

/// Incoherent-phonon decoherence rates. F values are cached per energy
/// difference, so one instance should serve a whole table.
class IncoherentPhonons
{
public:
    IncoherentPhonons(const RingConfig& cfg, const RingScales& scales);

    /// R^{a}_{b}: F(|q| d) chi f0_a for q = (eps_a - eps_b)/(hbar c_LA) in
    /// (0, q_D), F(|q| d) chi (1 - f0_a) for q in (-q_D, 0), 0 otherwise.
    double R(int a, int b);

    /// sum over nu of R^{m+nu}_m, all partners inside the Debye window.
    double out_sum(int m);

    /// (1/tau_LA) (out_sum(m) + out_sum(m')).
    double rate(int m, int mp);

    /// Highest |partner index| reached by the Debye window from |m| <= M.
    int partner_limit() const { return m_partner_limit; }

private:
    double form_factor(long level_gap);

    RingConfig m_cfg;
    const RingScales& m_scales;
    double m_inv_tau;
    double m_qD;
    int m_partner_limit;
    std::unordered_map<long, double> m_F;
    std::unordered_map<int, double> m_sums;
};

/// One-off evaluation of the incoherent-phonon rate for a single element.
double gamma_incoherent_phonon(int m, int mp, const RingConfig& cfg, const RingScales& scales);

/// Gamma_{mm'} = gamma_rad + gamma_sp + gamma_s + gamma_ssp for m != m'
/// (each channel applied to every coherence), 0 on the diagonal.
double total_offdiag_decay(int m, int mp, const RateTable& table);

RateTable build_rate_table(const RingConfig& cfg, const RingScales& scales,
                           const RateToggles& toggles = {});

/// Average of a rate table over the first coherences (m-1, m), weighted by
/// |f0_{m-1} - f0_m|, the linear-response weight of each coherence in the dipole.
double effective_dipole_rate(const Eigen::MatrixXd& table, const RingScales& scales);

} // namespace ringburst
