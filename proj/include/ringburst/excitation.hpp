#pragma once

#include <ringburst/density_matrix.hpp>
#include <ringburst/ring_model.hpp>

#include <Eigen/Dense>

#include <functional>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace ringburst {

enum class Axis { x, y };

/// Impulsive half-cycle-pulse kick: exp(i alpha cos(phi)) for x,
/// exp(i alpha sin(phi)) for y, applied at t_on.
struct KickEvent
{
    double t_on = 0.0;
    Axis axis = Axis::x;
    double alpha = 0.0;
    double tau_d = 0.0; ///< nominal duration, metadata only

    /// Warns when tau_d > tau_F / 10, where the impulsive limit degrades.
    void check_impulsive(double tau_F) const;
};

enum class WaveformKind { hcp_x, hcp_y, cpp_plus, cpp_minus, custom };

std::string to_string(WaveformKind kind);
WaveformKind waveform_kind_from_string(const std::string& s);

/// Sampled in-plane field (E_x, E_y) [V/m] on a uniform grid starting at
/// t_on. Between samples the field is linear, so the trapezoid sum of the
/// samples is the exact pulse area.
struct WaveformEvent
{
    double t_on = 0.0;
    double dt = 0.0;
    std::vector<double> Ex;
    std::vector<double> Ey;
    std::vector<double> envelope; ///< CPP envelope S_p, empty otherwise
    double carrier_omega = 0.0;   ///< CPP centre frequency, 0 for unipolar pulses
    WaveformKind kind = WaveformKind::custom;

    double duration() const;
    double t_end() const { return t_on + duration(); }

    /// Field at absolute time t (zero outside the pulse).
    Eigen::Vector2d field(double t) const;
    /// Time derivative of the piecewise-linear field.
    Eigen::Vector2d field_rate(double t) const;

    /// Trapezoid integrals of E_x and E_y [V s/m].
    Eigen::Vector2d area() const;

    void validate() const;

    /// Two columns, t [s] and E [V/m]; E is E_x for HCP-x and CPPs, E_y
    /// for HCP-y. write_csv_xy adds both components.
    void write_csv(std::ostream& os) const;
    void write_csv_xy(std::ostream& os) const;
};

using PulseEvent = std::variant<KickEvent, WaveformEvent>;

double onset(const PulseEvent& ev);
/// Time after which the event no longer acts (t_on for kicks).
double finish(const PulseEvent& ev);

/// Time-ordered events, optionally repeated with a fixed period.
class PulseSequence
{
public:
    PulseSequence() = default;
    explicit PulseSequence(std::vector<PulseEvent> events, double repeat_period = 0.0,
                           int repeat_count = 1);

    const std::vector<PulseEvent>& events() const { return m_events; }
    double repeat_period() const { return m_period; }
    int repeat_count() const { return m_count; }

    /// Every event of every repetition, in time order.
    std::vector<PulseEvent> expanded() const;

    /// Throws ConfigError if events are unordered or waveforms overlap.
    void validate() const;

private:
    std::vector<PulseEvent> m_events;
    double m_period = 0.0;
    int m_count = 1;
};

/// Smallest n with |J_k(alpha)| < 1e-14 for every k >= n.
int bessel_bandwidth(double alpha);

/// Kick unitary truncated to [-M_cut, M_cut]:
/// U(m, m') = i^(m-m') J_(m-m')(alpha) for x, J_(m-m')(alpha) for y.
/// Throws TruncationError when the Bessel band does not fit in the window.
Eigen::MatrixXcd kick_operator(double alpha, Axis axis, int M_cut);

/// U rho U^+.
DensityMatrix apply_kick(const DensityMatrix& rho, const Eigen::MatrixXcd& U);

/// Single positive-area half-sine lobe of duration tau_d whose momentum
/// transfer -e int E dt equals hbar alpha / r0.
WaveformEvent hcp_waveform(double tau_d, double alpha, Axis axis, double r0,
                           double t_on = 0.0, int samples = 401);

/// Peak field [V/m] of the half-sine HCP, signed.
double hcp_peak_field(double tau_d, double alpha, double r0);

enum class Sense { plus, minus };

/// Circularly polarized pulse E_x = S_p cos(w t + cep), E_y = +-S_p sin(w t + cep)
/// with a sine-squared envelope over n_cycles periods, normalized so that
/// -e int S_p dt = 2 hbar alpha' / r0.
WaveformEvent cpp_waveform(double alpha_prime, int n_cycles, double omega_c, Sense sense,
                           double r0, double t_on = 0.0, double cep = 0.0,
                           int samples_per_cycle = 128);

/// Called at requested times inside a driven propagation with the
/// lab-frame state and its second time derivative.
using DrivenObserver =
    std::function<void(double t, const DensityMatrix& rho, const Eigen::MatrixXcd& rho_ddot)>;

/// Largest RK4 step accepted by propagate_driven for this event.
double max_driven_step(const WaveformEvent& ev, const RingScales& scales);

/// Integrates d rho/dt = -(i/hbar)[H0 + H_drive(t), rho] across the waveform
/// (interaction picture, classical RK4), with H_drive = -q r0 (E_x cos phi +
/// E_y sin phi) for carriers of charge q = -e. rho must be given at ev.t_on;
/// the result is stamped ev.t_end(). Relaxation is off during the pulse.
/// Observer times must lie in (t_on, t_end].
DensityMatrix propagate_driven(const DensityMatrix& rho, const WaveformEvent& ev,
                               const RingScales& scales, double r0, double dt,
                               const std::vector<double>& observe_at = {},
                               const DrivenObserver& observer = {});

} // namespace ringburst
