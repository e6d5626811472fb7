#include "support.hpp"

#include <ringburst/errors.hpp>
#include <ringburst/relaxation.hpp>

#include <doctest.h>

using namespace ringburst;
namespace c = ringburst::constants;

namespace {

double within_factor(double value, double reference)
{
    return std::max(value / reference, reference / value);
}

} // namespace

TEST_SUITE("relaxation")
{
    TEST_CASE("radiative decay of the two reference rings")
    {
        const RingConfig big = support::large_ring();
        const RingConfig small = support::small_ring();
        const double g_big = gamma_rad(big, derive_scales(big));
        const double g_small = gamma_rad(small, derive_scales(small));
        MESSAGE("gamma: " << g_big << " and " << g_small << " 1/s");
        CHECK(within_factor(g_big, 1.5e2) <= 2.0);
        CHECK(within_factor(g_small, 0.4e4) <= 2.0);
    }

    TEST_CASE("radiative decay follows the closed form and is linear in N")
    {
        const RingConfig cfg = support::small_ring();
        const RingScales s = derive_scales(cfg);
        const double e2 = 1.602176634e-19 * 1.602176634e-19 / (4.0 * c::pi * 8.8541878128e-12);
        const double cl = 299792458.0;
        const double oracle = std::sqrt(12.5) * e2 * s.omega_F * s.omega_F * 160.0 /
                              (6.0 * 0.067 * 9.1093837015e-31 * cl * cl * cl);
        CHECK(gamma_rad(cfg, s) == doctest::Approx(oracle).epsilon(1e-12));

        RingConfig none = cfg;
        none.N = 0;
        CHECK(gamma_rad(none, s) == 0.0);
        RingConfig twice = cfg;
        twice.N = 320;
        CHECK(gamma_rad(twice, s) == doctest::Approx(2.0 * gamma_rad(cfg, s)).epsilon(1e-15));
    }

    TEST_CASE("array rate and spread time")
    {
        const RingConfig cfg = support::small_ring();
        const RingScales s = derive_scales(cfg);
        const double g = gamma_rad(cfg, s);
        CHECK(gamma_array(cfg, s, 1) == g);
        CHECK(gamma_array(cfg, s, 2) == doctest::Approx(2.0 * g).epsilon(1e-15));
        CHECK(gamma_array(cfg, s, 400) == doctest::Approx(400.0 * g).epsilon(1e-15));
        CHECK(tau_spread(cfg, s, cfg.r0 / 100.0) == doctest::Approx(100.0 * s.tau_F).epsilon(1e-12));
        const ArrayInfo info = array_info(cfg, s, 10, cfg.r0 / 50.0);
        CHECK(info.N_r == 10);
        CHECK(info.gamma_sigma == doctest::Approx(10.0 * g));
        CHECK(info.tau_spr == doctest::Approx(50.0 * s.tau_F));
        CHECK_THROWS(array_info(cfg, s, 0, cfg.r0 / 50.0));
        CHECK_THROWS(array_info(cfg, s, 2, cfg.r0));
    }

    TEST_CASE("spontaneous decoherence vanishes on the diagonal")
    {
        const RingConfig cfg = support::small_ring();
        const RingScales s = derive_scales(cfg);
        const double g = gamma_rad(cfg, s);
        for (int m = -s.M_cut; m <= s.M_cut; m += 7)
            CHECK(gamma_sp(m, m, s, g) == 0.0);
    }

    TEST_CASE("occupancy bracket deep inside the Fermi sea at zero temperature")
    {
        const RingConfig cfg = support::small_ring(0.0);
        const RingScales s = derive_scales(cfg);
        const double g = gamma_rad(cfg, s);
        CHECK(spontaneous_bracket(5, 3, s) == 2.0);
        const double ratio = (s.energy(5) - s.energy(3)) / (c::hbar * s.omega_F);
        CHECK(gamma_sp(5, 3, s, g) == doctest::Approx(2.0 * g * ratio * ratio * ratio));
        for (int m = -s.M_cut; m <= s.M_cut; ++m)
            for (int mp = -s.M_cut; mp <= s.M_cut; ++mp) {
                const double b = spontaneous_bracket(m, mp, s);
                CHECK(b >= 0.0);
                CHECK(b <= 4.0);
            }
    }

    TEST_CASE("dipole decay from spontaneous emission stays near 2 gamma at low temperature")
    {
        for (double T : {0.0, 0.1}) {
            const RingConfig cfg = support::small_ring(T);
            const RingScales s = derive_scales(cfg);
            const double g = gamma_rad(cfg, s);
            RateToggles only;
            only.radiative = false;
            only.coherent_phonon = false;
            only.incoherent_phonon = false;
            const RateTable t = build_rate_table(cfg, s, only);
            // the two edge coherences carry brackets 0 and 4, and the outer one
            // spans a gap of (2 m_F + 1) / (2 m_F) in units of hbar omega_F
            const double gap = (2.0 * s.m_F + 1.0) / (2.0 * s.m_F);
            const double eff = effective_dipole_rate(t.gamma_sp, s);
            MESSAGE("T = " << T << " K: spontaneous dipole rate " << eff / g << " gamma");
            CHECK(eff <= 2.0 * g * gap * gap * gap * (1.0 + 1e-9));
            CHECK(eff >= 1.9 * g);
        }
    }

    TEST_CASE("form factor is zero at the origin and rejects negative arguments")
    {
        CHECK(phonon_form_factor(0.0) == 0.0);
        CHECK_THROWS_AS(phonon_form_factor(-1e-3), DomainError);
    }

    TEST_CASE("form factor agrees with a midpoint-rule oracle")
    {
        for (double y : {1e-3, 0.1, 0.5, 1.0, 3.0, 2.0 * c::pi, 7.0, 10.0, 20.0, 50.0}) {
            CAPTURE(y);
            const double F = phonon_form_factor(y);
            const double oracle = support::form_factor_midpoint(y);
            CHECK(std::fabs(F - oracle) <= 1e-9 * oracle + 1e-12 * std::max(1.0, oracle));
        }
    }

    TEST_CASE("form factor grows quadratically for small arguments")
    {
        for (double y : {1e-4, 1e-3}) {
            const double lead = y * y / (16.0 * c::pi);
            CHECK(phonon_form_factor(y) == doctest::Approx(lead).epsilon(1e-4));
        }
    }

    TEST_CASE("form factor is non-negative and continuous")
    {
        double prev = 0.0;
        for (int k = 1; k <= 500; ++k) {
            const double y = 0.1 * k;
            const double F = phonon_form_factor(y);
            CHECK(F >= 0.0);
            CHECK(std::fabs(F - prev) < 0.05);
            prev = F;
        }
        for (double y : {1.0, 2.0 * c::pi, 4.0 * c::pi, 30.0}) {
            const double h = 1e-7 * y;
            CHECK(std::fabs(phonon_form_factor(y + h) - phonon_form_factor(y - h)) < 1e-5);
        }
    }

    TEST_CASE("coherent phonon decay of the two reference rings")
    {
        const RingConfig big = support::large_ring();
        const RingConfig small = support::small_ring();
        const double g_big = gamma_coherent_phonon(big, derive_scales(big));
        const double g_small = gamma_coherent_phonon(small, derive_scales(small));
        MESSAGE("coherent phonon rates: " << g_big << " and " << g_small << " 1/s");
        CHECK(within_factor(g_big, 0.8e6) <= 10.0);
        CHECK(within_factor(g_small, 2.1e8) <= 10.0);
    }

    TEST_CASE("phonon coupling scales as 1/(d^2 r0)")
    {
        const RingConfig cfg = support::small_ring();
        RingConfig wide = cfg;
        wide.d *= 2.0;
        RingConfig large = cfg;
        large.r0 *= 2.0;
        const double base = inverse_tau_LA(cfg);
        CHECK(inverse_tau_LA(wide) == doctest::Approx(base / 4.0).epsilon(1e-14));
        CHECK(inverse_tau_LA(large) == doctest::Approx(base / 2.0).epsilon(1e-14));
        const double oracle = cfg.deform_D * cfg.deform_D /
                              (c::hbar * cfg.c_LA * cfg.c_LA * cfg.rho_s * cfg.d * cfg.d * cfg.r0);
        CHECK(base == doctest::Approx(oracle).epsilon(1e-14));

        const RingScales s = derive_scales(cfg);
        const double F = phonon_form_factor(s.omega_F * cfg.d / cfg.c_LA);
        CHECK(gamma_coherent_phonon(cfg, s) == doctest::Approx(base * F).epsilon(1e-14));
    }

    TEST_CASE("coherent phonon formula refuses frequencies above the Debye cutoff")
    {
        RingConfig cfg = support::small_ring();
        const RingScales s = derive_scales(cfg);
        cfg.omega_D = 0.5 * s.omega_F;
        CHECK_THROWS_AS(gamma_coherent_phonon(cfg, s), ValidityError);
        cfg.omega_D = s.omega_F;
        CHECK_THROWS_AS(gamma_coherent_phonon(cfg, s), ValidityError);
    }

    TEST_CASE("no phonon emission from the band bottom at zero temperature")
    {
        const RingConfig cfg = support::small_ring(0.0);
        const RingScales s = derive_scales(cfg);
        CHECK(gamma_incoherent_phonon(0, 0, cfg, s) == 0.0);
    }

    TEST_CASE("rate tables are symmetric and non-negative")
    {
        const RingConfig cfg = support::small_ring(4.0);
        const RingScales s = derive_scales(cfg);
        const RateTable t = build_rate_table(cfg, s);
        const int n = s.dim();
        for (const Eigen::MatrixXd* m : {&t.gamma_sp, &t.gamma_ssp, &t.Gamma_total}) {
            CHECK(m->rows() == n);
            CHECK((*m - m->transpose()).cwiseAbs().maxCoeff() == 0.0);
            CHECK(m->minCoeff() >= 0.0);
        }
        for (int a = 0; a < n; ++a) {
            CHECK(t.gamma_sp(a, a) == 0.0);
            CHECK(t.Gamma_total(a, a) == 0.0);
        }
        IncoherentPhonons ip(cfg, s);
        CHECK(ip.rate(3, 7) == doctest::Approx(ip.rate(7, 3)));
        CHECK(t.gamma_ssp(3 + s.M_cut, 7 + s.M_cut) == doctest::Approx(ip.rate(3, 7)));
    }

    TEST_CASE("total decay adds the channels")
    {
        const RingConfig cfg = support::small_ring(4.0);
        const RingScales s = derive_scales(cfg);
        const RateTable off = build_rate_table(cfg, s, RateToggles::none());
        CHECK(off.Gamma_total.cwiseAbs().maxCoeff() == 0.0);
        CHECK(total_offdiag_decay(1, 0, RateTable::zero(s.M_cut)) == 0.0);

        const RateTable t = build_rate_table(cfg, s);
        for (int m = -s.M_cut; m <= s.M_cut; m += 3)
            for (int mp = -s.M_cut; mp <= s.M_cut; mp += 5) {
                if (m == mp)
                    continue;
                const double G = t.total(m, mp);
                const int a = m + s.M_cut;
                const int b = mp + s.M_cut;
                CHECK(G >= t.gamma_rad);
                CHECK(G >= t.gamma_s);
                CHECK(G >= t.gamma_sp(a, b));
                CHECK(G >= t.gamma_ssp(a, b));
                CHECK(G == doctest::Approx(t.gamma_rad + t.gamma_s + t.gamma_sp(a, b) +
                                           t.gamma_ssp(a, b)));
                CHECK(total_offdiag_decay(m, mp, t) == doctest::Approx(G));
            }

        RateToggles only_rad = RateToggles::none();
        only_rad.radiative = true;
        const RateTable r = build_rate_table(cfg, s, only_rad);
        CHECK(r.total(2, 1) == doctest::Approx(gamma_rad(cfg, s)));
    }

    TEST_CASE("incoherent phonon dipole decay rises with temperature")
    {
        const double targets[][2] = {{1.0, 1e8}, {10.0, 1e10}};
        for (const auto& [T, reference] : targets) {
            const RingConfig cfg = support::small_ring(T);
            const RingScales s = derive_scales(cfg);
            const RateTable t = build_rate_table(cfg, s);
            const double eff = effective_dipole_rate(t.gamma_ssp, s);
            MESSAGE("T = " << T << " K: effective incoherent-phonon rate " << eff << " 1/s");
            CHECK(within_factor(eff, reference) <= 10.0);
        }
    }

    TEST_CASE("incoherent phonons dominate the dipole decay at 4 K")
    {
        const RingConfig cfg = support::small_ring(4.0);
        const RingScales s = derive_scales(cfg);
        const RateTable t = build_rate_table(cfg, s);
        const double ssp = effective_dipole_rate(t.gamma_ssp, s);
        CHECK(ssp > 100.0 * t.gamma_rad);
        CHECK(ssp > effective_dipole_rate(t.gamma_sp, s));
        CHECK(ssp > t.gamma_s);
    }

    TEST_CASE("widening the Debye window does not change near-Fermi rates")
    {
        RingConfig cfg = support::small_ring(4.0);
        const RingScales s = derive_scales(cfg);
        IncoherentPhonons base(cfg, s);
        cfg.omega_D *= 1.5;
        IncoherentPhonons wide(cfg, s);
        for (int m = s.m_F - 3; m <= s.m_F + 3; ++m)
            CHECK(wide.rate(m, m - 1) == doctest::Approx(base.rate(m, m - 1)).epsilon(0.05));
    }
}
