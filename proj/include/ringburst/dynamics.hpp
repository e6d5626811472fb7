#pragma once

#include <ringburst/density_matrix.hpp>
#include <ringburst/excitation.hpp>
#include <ringburst/relaxation.hpp>
#include <ringburst/ring_model.hpp>

#include <Eigen/Dense>

#include <iosfwd>
#include <vector>

namespace ringburst {

/// Spin degeneracy carried by every dipole observable.
inline constexpr double spin_factor = 2.0;

/// Jump of the dipole velocity at an impulsive kick. The dipole itself is
/// continuous there, so its second derivative holds dmu_dot * delta(t - t).
struct DipoleImpulse
{
    double t = 0.0;
    double dmu_dot_x = 0.0; ///< [C m / s]
    double dmu_dot_y = 0.0;
};

/// Dipole trajectory on a uniform grid t_k = t0 + k dt.
struct DipoleSeries
{
    double t0 = 0.0;
    double dt = 0.0;
    std::vector<double> mu_x;      ///< [C m]
    std::vector<double> mu_y;
    std::vector<double> mu_ddot_x; ///< [C m / s^2], regular part
    std::vector<double> mu_ddot_y;
    std::vector<DipoleImpulse> impulses;
    /// The dipole is identically zero for t < t0.
    bool quiescent_before = true;

    std::size_t size() const { return mu_x.size(); }
    double time(std::size_t k) const { return t0 + dt * static_cast<double>(k); }
    double t_end() const { return size() ? time(size() - 1) : t0; }

    /// Columns t, mu_x, mu_y, mu_ddot_x, mu_ddot_y at 17 significant digits.
    void write_csv(std::ostream& os) const;
    /// Columns t, dmu_dot_x, dmu_dot_y.
    void write_impulses_csv(std::ostream& os) const;

    /// Copy delayed by shift seconds (grid and impulses).
    DipoleSeries shifted(double shift) const;
};

/// Exact interaction-free step: rho_{mm'} *= exp(-i(eps_m - eps_m') dt / hbar
/// - Gamma_{mm'} dt) for m != m'; diagonal untouched. Throws DomainError for dt < 0.
DensityMatrix free_propagate(const DensityMatrix& rho, double dt, const RingScales& scales,
                             const RateTable& rates);

/// (mu_x, mu_y) = g_s q r0 (Re, Im) sum_m <a+_m a_{m-1}> with q = -e.
Eigen::Vector2d dipole_moment(const DensityMatrix& rho, double r0);

/// Dipole velocity and acceleration of a freely evolving state, from the
/// first coherences and their complex frequencies -i w - Gamma.
Eigen::Vector2d dipole_velocity(const DensityMatrix& rho, const RingScales& scales,
                                const RateTable& rates, double r0);
Eigen::Vector2d dipole_acceleration(const DensityMatrix& rho, const RingScales& scales,
                                    const RateTable& rates, double r0);

/// Same sum applied to an arbitrary matrix (e.g. a state derivative).
Eigen::Vector2d dipole_of(const Eigen::MatrixXcd& m, int M_cut, double r0);

/// Weak-kick response to an x kick at t = 0:
/// mu_x(t) = alpha q r0 sum_m (f0_{m-1} - f0_m) sin((eps_m - eps_{m-1}) t / hbar).
double linear_response_dipole(double t, double alpha, const RingScales& scales, double r0);

struct SimulationGrid
{
    double t_start = 0.0;
    double dt = 0.0;
    std::size_t samples = 0;

    /// samples_per_tauF points per ballistic period over span_tauF periods.
    static SimulationGrid per_period(const RingScales& scales, double span_tauF,
                                     int samples_per_tauF = 256, double t_start = 0.0);
};

struct SimulationOptions
{
    RateToggles rates;
    /// RK4 step for waveform events; 0 picks half the largest allowed step.
    double driven_dt = 0.0;
};

struct SimulationResult
{
    DipoleSeries series;
    DensityMatrix final_state; ///< stamped at the last grid time
    RateTable rates;
    RingScales scales;
    std::vector<std::string> warnings;
};

/// Event loop over the pulse sequence: exact free evolution between events,
/// Bessel kicks or driven propagation at events, dipole recorded on the grid.
/// Throws StepSizeError when dt > tau_F / 64.
SimulationResult simulate(const RingConfig& cfg, const PulseSequence& seq,
                          const SimulationGrid& grid, const SimulationOptions& options = {});

/// Same with precomputed scales and rates (cutoffs must agree).
SimulationResult simulate(const RingConfig& cfg, const RingScales& scales,
                          const RateTable& rates, const PulseSequence& seq,
                          const SimulationGrid& grid, const SimulationOptions& options = {});

} // namespace ringburst
