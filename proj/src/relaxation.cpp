#include <ringburst/relaxation.hpp>

#include <ringburst/constants.hpp>
#include <ringburst/errors.hpp>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ringburst {

namespace c = constants;

RateTable RateTable::zero(int M_cut)
{
    RateTable t;
    t.M_cut = M_cut;
    const int dim = 2 * M_cut + 1;
    t.gamma_sp = Eigen::MatrixXd::Zero(dim, dim);
    t.gamma_ssp = Eigen::MatrixXd::Zero(dim, dim);
    t.Gamma_total = Eigen::MatrixXd::Zero(dim, dim);
    return t;
}

double gamma_rad(const RingConfig& cfg, const RingScales& scales)
{
    const double c3 = c::speed_of_light * c::speed_of_light * c::speed_of_light;
    return std::sqrt(cfg.kappa) * c::e2_gaussian * scales.omega_F * scales.omega_F * cfg.N /
           (6.0 * cfg.m_eff * c3);
}

double gamma_array(const RingConfig& cfg, const RingScales& scales, int N_r)
{
    if (N_r < 1)
        throw ConfigError("ring count N_r must be at least 1");
    return gamma_rad(cfg, scales) * N_r;
}

double tau_spread(const RingConfig& cfg, const RingScales& scales, double delta_r0)
{
    if (!(delta_r0 > 0) || !(delta_r0 < cfg.r0))
        throw ConfigError("radius spread must satisfy 0 < delta_r0 < r0");
    return 2.0 * c::pi / scales.omega_F * (cfg.r0 / delta_r0);
}

ArrayInfo array_info(const RingConfig& cfg, const RingScales& scales, int N_r,
                     double delta_r0)
{
    if (N_r < 1)
        throw ConfigError("array ring count must be at least 1");
    if (!(delta_r0 > 0) || !(delta_r0 < cfg.r0))
        throw ConfigError("array radius spread must satisfy 0 < delta_r0 < r0");
    ArrayInfo info;
    info.N_r = N_r;
    info.delta_r0 = delta_r0;
    info.gamma_sigma = gamma_array(cfg, scales, N_r);
    info.tau_spr = tau_spread(cfg, scales, delta_r0);
    return info;
}

double spontaneous_bracket(int m, int mp, const RingScales& s)
{
    return 2.0 + s.fermi(m + 1) + s.fermi(mp + 1) - s.fermi(m - 1) - s.fermi(mp - 1);
}

double gamma_sp(int m, int mp, const RingScales& scales, double gamma)
{
    if (m == mp)
        return 0.0;
    const double hw = c::hbar * scales.omega_F;
    const double ratio = std::abs(scales.energy(m) - scales.energy(mp)) / hw;
    return std::max(0.0, gamma * ratio * ratio * ratio * spontaneous_bracket(m, mp, scales));
}

namespace {

/// sin(u/2)/u, finite at u = 0.
double half_sinc(double u)
{
    if (std::abs(u) < 1e-4)
        return 0.5 - u * u / 48.0;
    return std::sin(0.5 * u) / u;
}

/// sin^2(x/2) / (x^2 (x^2 - 4 pi^2)^2) with both removable points resolved.
double form_integrand(double x)
{
    const double two_pi = 2.0 * c::pi;
    const double u = x - two_pi;
    const double p = x + two_pi;
    if (std::abs(u) < 0.5) {
        // sin^2(x/2) = sin^2(u/2)
        const double s = half_sinc(u);
        return s * s / (x * x * p * p);
    }
    const double s = half_sinc(x);
    return s * s / (u * u * p * p);
}

} // namespace

double phonon_form_factor(double y)
{
    if (!(y >= 0.0) || !std::isfinite(y))
        throw DomainError("form factor argument must be finite and non-negative");
    if (y == 0.0)
        return 0.0;
    // x = y sin(theta) removes the inverse-square-root endpoint:
    // F = 8 pi^2 y^2 int_0^{pi/2} g(y sin theta) dtheta
    auto f = [y](double theta) { return form_integrand(y * std::sin(theta)); };
    double err = 0.0;
    const double I = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        f, 0.0, 0.5 * c::pi, 15, 1e-11, &err);
    return 8.0 * c::pi * c::pi * y * y * I;
}

double inverse_tau_LA(const RingConfig& cfg)
{
    return cfg.deform_D * cfg.deform_D /
           (c::hbar * cfg.c_LA * cfg.c_LA * cfg.rho_s * cfg.d * cfg.d * cfg.r0);
}

double gamma_coherent_phonon(const RingConfig& cfg, const RingScales& scales)
{
    if (!(scales.omega_F < cfg.omega_D)) {
        std::ostringstream os;
        os << "coherent-phonon rate needs omega_F < omega_D (omega_F=" << scales.omega_F
           << ", omega_D=" << cfg.omega_D << ")";
        throw ValidityError(os.str());
    }
    return inverse_tau_LA(cfg) * phonon_form_factor(scales.omega_F * cfg.d / cfg.c_LA);
}

IncoherentPhonons::IncoherentPhonons(const RingConfig& cfg, const RingScales& scales)
    : m_cfg(cfg), m_scales(scales), m_inv_tau(inverse_tau_LA(cfg)),
      m_qD(cfg.omega_D / cfg.c_LA)
{
    // |eps_a - eps_b| < hbar omega_D bounds the partner index
    const double gap_units = c::hbar * cfg.omega_D / scales.energy_unit;
    const double M = scales.M_cut;
    m_partner_limit = static_cast<int>(std::ceil(std::sqrt(M * M + gap_units))) + 1;
}

double IncoherentPhonons::form_factor(long level_gap)
{
    auto it = m_F.find(level_gap);
    if (it != m_F.end())
        return it->second;
    const double q = m_scales.energy_unit * static_cast<double>(level_gap) / (c::hbar * m_cfg.c_LA);
    const double v = phonon_form_factor(q * m_cfg.d);
    m_F.emplace(level_gap, v);
    return v;
}

namespace {

int sgn(int m) { return (m > 0) - (m < 0); }

} // namespace

double IncoherentPhonons::R(int a, int b)
{
    if (sgn(a) != sgn(b))
        return 0.0;
    const long gap = static_cast<long>(a) * a - static_cast<long>(b) * b;
    const double q = m_scales.energy_unit * static_cast<double>(gap) / (c::hbar * m_cfg.c_LA);
    if (q == 0.0 || std::abs(q) >= m_qD)
        return 0.0;
    const double F = form_factor(std::labs(gap));
    const double f = m_scales.fermi(a);
    return q > 0 ? F * f : F * (1.0 - f);
}

double IncoherentPhonons::out_sum(int m)
{
    auto it = m_sums.find(m);
    if (it != m_sums.end())
        return it->second;
    double s = 0.0;
    // partners share the sign of m; m = 0 only pairs with itself (no term)
    if (m > 0) {
        for (int a = 1; a <= m_partner_limit; ++a)
            if (a != m)
                s += R(a, m);
    } else if (m < 0) {
        for (int a = -1; a >= -m_partner_limit; --a)
            if (a != m)
                s += R(a, m);
    }
    m_sums.emplace(m, s);
    return s;
}

double IncoherentPhonons::rate(int m, int mp)
{
    return m_inv_tau * (out_sum(m) + out_sum(mp));
}

double gamma_incoherent_phonon(int m, int mp, const RingConfig& cfg, const RingScales& scales)
{
    if (std::abs(m) > scales.M_cut || std::abs(mp) > scales.M_cut)
        throw RangeError("index outside the cutoff window");
    IncoherentPhonons ph(cfg, scales);
    return ph.rate(m, mp);
}

double total_offdiag_decay(int m, int mp, const RateTable& t)
{
    if (m == mp)
        return 0.0;
    const int a = m + t.M_cut;
    const int b = mp + t.M_cut;
    return t.gamma_rad + t.gamma_sp(a, b) + t.gamma_s + t.gamma_ssp(a, b);
}

RateTable build_rate_table(const RingConfig& cfg, const RingScales& scales,
                           const RateToggles& toggles)
{
    RateTable t = RateTable::zero(scales.M_cut);
    const int M = scales.M_cut;
    const double g = gamma_rad(cfg, scales);
    if (toggles.radiative)
        t.gamma_rad = g;
    if (toggles.coherent_phonon)
        t.gamma_s = gamma_coherent_phonon(cfg, scales);
    if (toggles.spontaneous) {
        for (int m = -M; m <= M; ++m)
            for (int mp = m + 1; mp <= M; ++mp) {
                const double v = gamma_sp(m, mp, scales, g);
                t.gamma_sp(m + M, mp + M) = v;
                t.gamma_sp(mp + M, m + M) = v;
            }
    }
    if (toggles.incoherent_phonon) {
        IncoherentPhonons ph(cfg, scales);
        for (int m = -M; m <= M; ++m)
            for (int mp = m + 1; mp <= M; ++mp) {
                const double v = ph.rate(m, mp);
                t.gamma_ssp(m + M, mp + M) = v;
                t.gamma_ssp(mp + M, m + M) = v;
            }
    }
    for (int m = -M; m <= M; ++m)
        for (int mp = -M; mp <= M; ++mp)
            t.Gamma_total(m + M, mp + M) = total_offdiag_decay(m, mp, t);
    return t;
}

double effective_dipole_rate(const Eigen::MatrixXd& table, const RingScales& s)
{
    double num = 0.0;
    double den = 0.0;
    for (int m = -s.M_cut + 1; m <= s.M_cut; ++m) {
        const double w = std::abs(s.occupation(m - 1) - s.occupation(m));
        num += w * table(s.index(m - 1), s.index(m));
        den += w;
    }
    return den > 0 ? num / den : 0.0;
}

} // namespace ringburst
