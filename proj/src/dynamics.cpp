#include <ringburst/dynamics.hpp>

#include <ringburst/constants.hpp>
#include <ringburst/diagnostics.hpp>
#include <ringburst/errors.hpp>

#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

namespace ringburst {

namespace c = constants;

void DipoleSeries::write_csv(std::ostream& os) const
{
    char buf[160];
    os << "t,mu_x,mu_y,mu_ddot_x,mu_ddot_y\n";
    for (std::size_t k = 0; k < size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", time(k), mu_x[k],
                      mu_y[k], mu_ddot_x[k], mu_ddot_y[k]);
        os << buf;
    }
}

void DipoleSeries::write_impulses_csv(std::ostream& os) const
{
    char buf[96];
    os << "t,dmu_dot_x,dmu_dot_y\n";
    for (const auto& imp : impulses) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", imp.t, imp.dmu_dot_x,
                      imp.dmu_dot_y);
        os << buf;
    }
}

DipoleSeries DipoleSeries::shifted(double shift) const
{
    DipoleSeries out = *this;
    out.t0 += shift;
    for (auto& imp : out.impulses)
        imp.t += shift;
    return out;
}

DensityMatrix free_propagate(const DensityMatrix& rho, double dt, const RingScales& scales,
                             const RateTable& rates)
{
    if (dt < 0)
        throw DomainError("free propagation step must be non-negative");
    if (rho.dim() != scales.dim() || rates.M_cut != scales.M_cut)
        throw RangeError("density matrix, scales and rates have different cutoffs");
    DensityMatrix out = rho;
    out.set_time(rho.time() + dt);
    if (dt == 0.0)
        return out;
    const int n = rho.dim();
    auto& m = out.matrix();
    for (int b = 0; b < n; ++b) {
        for (int a = 0; a < n; ++a) {
            if (a == b)
                continue;
            const double w = (scales.eps[static_cast<std::size_t>(a)] -
                              scales.eps[static_cast<std::size_t>(b)]) / c::hbar;
            const double g = rates.Gamma_total(a, b);
            m(a, b) *= std::exp(complex(-g * dt, -w * dt));
        }
    }
    return out;
}

Eigen::Vector2d dipole_of(const Eigen::MatrixXcd& m, int M_cut, double r0)
{
    complex s{};
    // <a+_m a_{m-1}> is element (m-1, m)
    for (int a = 0; a + 1 < 2 * M_cut + 1; ++a)
        s += m(a, a + 1);
    const double pref = spin_factor * c::carrier_charge * r0;
    return {pref * s.real(), pref * s.imag()};
}

Eigen::Vector2d dipole_moment(const DensityMatrix& rho, double r0)
{
    return dipole_of(rho.matrix(), rho.cutoff(), r0);
}

namespace {

/// Complex frequency -i w - Gamma of the coherence (a, a+1).
std::vector<complex> first_coherence_rates(const RingScales& scales, const RateTable& rates)
{
    std::vector<complex> z(static_cast<std::size_t>(scales.dim() - 1));
    for (int a = 0; a + 1 < scales.dim(); ++a) {
        const double w = (scales.eps[static_cast<std::size_t>(a)] -
                          scales.eps[static_cast<std::size_t>(a + 1)]) / c::hbar;
        z[static_cast<std::size_t>(a)] = complex(-rates.Gamma_total(a, a + 1), -w);
    }
    return z;
}

Eigen::Vector2d dipole_derivative(const DensityMatrix& rho, const std::vector<complex>& z,
                                  int order, double r0)
{
    complex s{};
    for (int a = 0; a + 1 < rho.dim(); ++a) {
        const complex f = order == 1 ? z[static_cast<std::size_t>(a)]
                                     : z[static_cast<std::size_t>(a)] * z[static_cast<std::size_t>(a)];
        s += f * rho.matrix()(a, a + 1);
    }
    const double pref = spin_factor * c::carrier_charge * r0;
    return {pref * s.real(), pref * s.imag()};
}

} // namespace

Eigen::Vector2d dipole_velocity(const DensityMatrix& rho, const RingScales& scales,
                                const RateTable& rates, double r0)
{
    return dipole_derivative(rho, first_coherence_rates(scales, rates), 1, r0);
}

Eigen::Vector2d dipole_acceleration(const DensityMatrix& rho, const RingScales& scales,
                                    const RateTable& rates, double r0)
{
    return dipole_derivative(rho, first_coherence_rates(scales, rates), 2, r0);
}

double linear_response_dipole(double t, double alpha, const RingScales& s, double r0)
{
    double sum = 0.0;
    for (int m = -s.M_cut + 1; m <= s.M_cut; ++m) {
        const double df = s.occupation(m - 1) - s.occupation(m);
        if (df == 0.0)
            continue;
        const double w = (s.energy(m) - s.energy(m - 1)) / c::hbar;
        sum += df * std::sin(w * t);
    }
    // g_s/2 = 1 for the spin-summed dipole
    return 0.5 * spin_factor * alpha * c::carrier_charge * r0 * sum;
}

SimulationGrid SimulationGrid::per_period(const RingScales& scales, double span_tauF,
                                          int samples_per_tauF, double t_start)
{
    if (!(span_tauF > 0) || samples_per_tauF < 1)
        throw ConfigError("simulation span and sampling must be positive");
    SimulationGrid g;
    g.t_start = t_start;
    g.dt = scales.tau_F / samples_per_tauF;
    g.samples = static_cast<std::size_t>(std::llround(span_tauF * samples_per_tauF)) + 1;
    return g;
}

SimulationResult simulate(const RingConfig& cfg, const PulseSequence& seq,
                          const SimulationGrid& grid, const SimulationOptions& options)
{
    const RingConfig resolved = with_resolved_cutoff(cfg);
    RingScales scales = derive_scales(resolved);
    RateTable rates = build_rate_table(resolved, scales, options.rates);
    return simulate(resolved, scales, rates, seq, grid, options);
}

namespace {

class Recorder
{
public:
    Recorder(DipoleSeries& s, const RingScales& scales, const RateTable& rates, double r0)
        : m_s(s), m_z(first_coherence_rates(scales, rates)), m_r0(r0)
    {
    }

    /// Records the freely evolving state `rho` advanced to time t.
    void free(double t, const DensityMatrix& rho)
    {
        const double tau = t - rho.time();
        complex mu{}, acc{};
        for (int a = 0; a + 1 < rho.dim(); ++a) {
            const complex z = m_z[static_cast<std::size_t>(a)];
            const complex v = rho.matrix()(a, a + 1) * std::exp(z * tau);
            mu += v;
            acc += z * z * v;
        }
        const double pref = spin_factor * c::carrier_charge * m_r0;
        push(pref * mu, pref * acc);
    }

    void driven(const DensityMatrix& rho, const Eigen::MatrixXcd& rho_ddot)
    {
        const Eigen::Vector2d mu = dipole_of(rho.matrix(), rho.cutoff(), m_r0);
        const Eigen::Vector2d acc = dipole_of(rho_ddot, rho.cutoff(), m_r0);
        m_s.mu_x.push_back(mu.x());
        m_s.mu_y.push_back(mu.y());
        m_s.mu_ddot_x.push_back(acc.x());
        m_s.mu_ddot_y.push_back(acc.y());
    }

private:
    void push(complex mu, complex acc)
    {
        m_s.mu_x.push_back(mu.real());
        m_s.mu_y.push_back(mu.imag());
        m_s.mu_ddot_x.push_back(acc.real());
        m_s.mu_ddot_y.push_back(acc.imag());
    }

    DipoleSeries& m_s;
    std::vector<complex> m_z;
    double m_r0;
};

} // namespace

SimulationResult simulate(const RingConfig& cfg, const RingScales& scales,
                          const RateTable& rates, const PulseSequence& seq,
                          const SimulationGrid& grid, const SimulationOptions& options)
{
    if (rates.M_cut != scales.M_cut)
        throw RangeError("rate table and scales have different cutoffs");
    if (grid.samples == 0)
        throw ConfigError("simulation grid has no samples");
    const double max_dt = scales.tau_F / 64.0;
    if (!(grid.dt > 0) || grid.dt > max_dt * (1 + 1e-12)) {
        std::ostringstream os;
        os << "simulation grid step " << grid.dt << " s exceeds tau_F/64 = " << max_dt << " s";
        throw StepSizeError(os.str(), max_dt);
    }
    seq.validate();

    SimulationResult result;
    result.scales = scales;
    result.rates = rates;
    DipoleSeries& series = result.series;
    series.t0 = grid.t_start;
    series.dt = grid.dt;
    series.mu_x.reserve(grid.samples);
    series.mu_y.reserve(grid.samples);
    series.mu_ddot_x.reserve(grid.samples);
    series.mu_ddot_y.reserve(grid.samples);

    auto note = [&](const std::string& msg) {
        warn(msg);
        result.warnings.push_back(msg);
    };

    const auto events = seq.expanded();
    series.quiescent_before = events.empty() || grid.t_start <= onset(events.front());
    const double t_first = events.empty() ? grid.t_start : std::min(grid.t_start, onset(events.front()));

    DensityMatrix rho = DensityMatrix::equilibrium(scales, t_first);
    Recorder rec(series, scales, rates, cfg.r0);
    std::map<std::pair<double, int>, Eigen::MatrixXcd> kick_cache;
    bool saturation_reported = false;

    std::size_t k = 0;
    auto emit_until = [&](double t_stop) {
        while (k < grid.samples && grid.t_start + grid.dt * static_cast<double>(k) < t_stop) {
            rec.free(grid.t_start + grid.dt * static_cast<double>(k), rho);
            ++k;
        }
    };
    auto check_saturation = [&]() {
        if (saturation_reported)
            return;
        const double edge = rho.edge_population(5);
        if (edge > 1e-6) {
            std::ostringstream os;
            os << "population " << edge << " within 5 indices of the cutoff M_cut="
               << scales.M_cut << "; suggested M_cut >= " << scales.M_cut + 20;
            note(os.str());
            saturation_reported = true;
        }
    };

    const double t_grid_end = grid.t_start + grid.dt * static_cast<double>(grid.samples - 1);
    for (const auto& ev : events) {
        const double t_on = onset(ev);
        if (t_on > t_grid_end)
            break;
        emit_until(t_on);
        rho = free_propagate(rho, t_on - rho.time(), scales, rates);

        if (const auto* kick = std::get_if<KickEvent>(&ev)) {
            kick->check_impulsive(scales.tau_F);
            const auto key = std::make_pair(kick->alpha, kick->axis == Axis::x ? 0 : 1);
            auto it = kick_cache.find(key);
            if (it == kick_cache.end())
                it = kick_cache.emplace(key, kick_operator(kick->alpha, kick->axis, scales.M_cut)).first;
            const Eigen::Vector2d v0 = dipole_velocity(rho, scales, rates, cfg.r0);
            rho = apply_kick(rho, it->second);
            const Eigen::Vector2d v1 = dipole_velocity(rho, scales, rates, cfg.r0);
            series.impulses.push_back({t_on, v1.x() - v0.x(), v1.y() - v0.y()});
        } else {
            const auto& wave = std::get<WaveformEvent>(ev);
            const double h = options.driven_dt > 0 ? options.driven_dt
                                                   : 0.5 * max_driven_step(wave, scales);
            std::vector<double> obs;
            for (std::size_t j = k; j < grid.samples; ++j) {
                const double t = grid.t_start + grid.dt * static_cast<double>(j);
                if (t > wave.t_end())
                    break;
                if (t > wave.t_on || (t == wave.t_on && j == k))
                    obs.push_back(t);
            }
            // a sample exactly at the onset sees the undriven state
            if (!obs.empty() && obs.front() == wave.t_on) {
                rec.free(obs.front(), rho);
                ++k;
                obs.erase(obs.begin());
            }
            rho = propagate_driven(rho, wave, scales, cfg.r0, h, obs,
                                   [&](double, const DensityMatrix& r, const Eigen::MatrixXcd& rdd) {
                                       rec.driven(r, rdd);
                                       ++k;
                                   });
        }
        check_saturation();
    }
    emit_until(std::numeric_limits<double>::infinity());

    const double t_last = series.t_end();
    if (t_last >= rho.time())
        rho = free_propagate(rho, t_last - rho.time(), scales, rates);
    result.final_state = std::move(rho);
    return result;
}

} // namespace ringburst
