#include <ringburst/excitation.hpp>

#include <ringburst/constants.hpp>
#include <ringburst/diagnostics.hpp>
#include <ringburst/errors.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace ringburst {

namespace c = constants;

void KickEvent::check_impulsive(double tau_F) const
{
    if (tau_d > tau_F / 10.0) {
        std::ostringstream os;
        os << "kick at t=" << t_on << " s has tau_d=" << tau_d
           << " s > tau_F/10; impulsive approximation is questionable";
        warn(os.str());
    }
}

std::string to_string(WaveformKind kind)
{
    switch (kind) {
    case WaveformKind::hcp_x: return "HCP-x";
    case WaveformKind::hcp_y: return "HCP-y";
    case WaveformKind::cpp_plus: return "CPP+";
    case WaveformKind::cpp_minus: return "CPP-";
    case WaveformKind::custom: return "custom";
    }
    return "custom";
}

WaveformKind waveform_kind_from_string(const std::string& s)
{
    if (s == "HCP-x") return WaveformKind::hcp_x;
    if (s == "HCP-y") return WaveformKind::hcp_y;
    if (s == "CPP+") return WaveformKind::cpp_plus;
    if (s == "CPP-") return WaveformKind::cpp_minus;
    if (s == "custom") return WaveformKind::custom;
    throw ConfigError("unknown waveform kind '" + s + "'");
}

double WaveformEvent::duration() const
{
    return Ex.size() < 2 ? 0.0 : dt * static_cast<double>(Ex.size() - 1);
}

Eigen::Vector2d WaveformEvent::field(double t) const
{
    const double u = (t - t_on) / dt;
    const auto last = static_cast<double>(Ex.size() - 1);
    if (!(u >= 0.0) || u > last)
        return Eigen::Vector2d::Zero();
    auto k = static_cast<std::size_t>(std::floor(u));
    if (k + 1 >= Ex.size())
        k = Ex.size() - 2;
    const double w = u - static_cast<double>(k);
    return {(1 - w) * Ex[k] + w * Ex[k + 1], (1 - w) * Ey[k] + w * Ey[k + 1]};
}

Eigen::Vector2d WaveformEvent::field_rate(double t) const
{
    const double u = (t - t_on) / dt;
    const auto last = static_cast<double>(Ex.size() - 1);
    if (!(u >= 0.0) || u > last)
        return Eigen::Vector2d::Zero();
    auto k = static_cast<std::size_t>(std::floor(u));
    if (k + 1 >= Ex.size())
        k = Ex.size() - 2;
    return {(Ex[k + 1] - Ex[k]) / dt, (Ey[k + 1] - Ey[k]) / dt};
}

namespace {

double trapezoid(const std::vector<double>& v, double h)
{
    if (v.size() < 2)
        return 0.0;
    double s = 0.5 * (v.front() + v.back());
    for (std::size_t i = 1; i + 1 < v.size(); ++i)
        s += v[i];
    return s * h;
}

} // namespace

Eigen::Vector2d WaveformEvent::area() const
{
    return {trapezoid(Ex, dt), trapezoid(Ey, dt)};
}

void WaveformEvent::validate() const
{
    if (!(dt > 0) || !std::isfinite(dt))
        throw ConfigError("waveform sample step must be positive");
    if (Ex.size() < 2 || Ex.size() != Ey.size())
        throw ConfigError("waveform needs at least two (E_x, E_y) samples");
    for (std::size_t i = 0; i < Ex.size(); ++i)
        if (!std::isfinite(Ex[i]) || !std::isfinite(Ey[i]))
            throw ConfigError("waveform samples must be finite");
    if (!std::isfinite(t_on))
        throw ConfigError("waveform onset must be finite");
}

void WaveformEvent::write_csv(std::ostream& os) const
{
    const bool use_y = kind == WaveformKind::hcp_y;
    char buf[64];
    os << "t,E\n";
    for (std::size_t i = 0; i < Ex.size(); ++i) {
        const double t = t_on + dt * static_cast<double>(i);
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", t, use_y ? Ey[i] : Ex[i]);
        os << buf;
    }
}

void WaveformEvent::write_csv_xy(std::ostream& os) const
{
    char buf[96];
    os << "t,Ex,Ey\n";
    for (std::size_t i = 0; i < Ex.size(); ++i) {
        const double t = t_on + dt * static_cast<double>(i);
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", t, Ex[i], Ey[i]);
        os << buf;
    }
}

double onset(const PulseEvent& ev)
{
    return std::visit([](const auto& e) { return e.t_on; }, ev);
}

double finish(const PulseEvent& ev)
{
    if (const auto* w = std::get_if<WaveformEvent>(&ev))
        return w->t_end();
    return std::get<KickEvent>(ev).t_on;
}

PulseSequence::PulseSequence(std::vector<PulseEvent> events, double repeat_period,
                             int repeat_count)
    : m_events(std::move(events)), m_period(repeat_period), m_count(repeat_count)
{
    validate();
}

void PulseSequence::validate() const
{
    if (m_period < 0 || !std::isfinite(m_period))
        throw ConfigError("pulses.repeat_period must be non-negative");
    if (m_count < 1)
        throw ConfigError("pulses.repeat_count must be at least 1");
    if (m_count > 1 && m_period == 0.0)
        throw ConfigError("pulses.repeat_count > 1 needs a positive repeat_period");
    for (const auto& ev : m_events) {
        if (const auto* k = std::get_if<KickEvent>(&ev)) {
            if (!std::isfinite(k->alpha) || !std::isfinite(k->t_on))
                throw ConfigError("kick alpha and t_on must be finite");
            if (k->tau_d < 0)
                throw ConfigError("kick tau_d must be non-negative");
        } else {
            std::get<WaveformEvent>(ev).validate();
        }
    }
    for (std::size_t i = 1; i < m_events.size(); ++i) {
        if (onset(m_events[i]) < onset(m_events[i - 1]))
            throw ConfigError("pulse events must be time-ordered");
        if (onset(m_events[i]) < finish(m_events[i - 1]))
            throw ConfigError("pulse events overlap a preceding waveform");
    }
    if (m_count > 1 && !m_events.empty()) {
        const double span = finish(m_events.back()) - onset(m_events.front());
        if (span > m_period)
            throw ConfigError("pulse sequence is longer than its repeat period");
        if (span == m_period && std::holds_alternative<WaveformEvent>(m_events.back()))
            throw ConfigError("repeated waveform would overlap the next repetition");
    }
}

std::vector<PulseEvent> PulseSequence::expanded() const
{
    std::vector<PulseEvent> out;
    out.reserve(m_events.size() * static_cast<std::size_t>(m_count));
    for (int r = 0; r < m_count; ++r) {
        const double shift = m_period * r;
        for (auto ev : m_events) {
            std::visit([shift](auto& e) { e.t_on += shift; }, ev);
            out.push_back(std::move(ev));
        }
    }
    return out;
}

int bessel_bandwidth(double alpha)
{
    const double a = std::abs(alpha);
    if (a == 0.0)
        return 1;
    // J_n decays monotonically once n exceeds a
    int n = static_cast<int>(std::ceil(a)) + 1;
    while (std::abs(std::cyl_bessel_j(static_cast<double>(n), a)) >= 1e-14)
        ++n;
    return n;
}

namespace {

/// J_n(x) for any integer n and real x.
double bessel_j(int n, double x)
{
    const int an = std::abs(n);
    double v = std::cyl_bessel_j(static_cast<double>(an), std::abs(x));
    // J_{-n} = (-1)^n J_n, J_n(-x) = (-1)^n J_n(x)
    if (n < 0 && (an % 2) == 1)
        v = -v;
    if (x < 0 && (an % 2) == 1)
        v = -v;
    return v;
}

complex ipow(int n)
{
    switch (((n % 4) + 4) % 4) {
    case 0: return {1, 0};
    case 1: return {0, 1};
    case 2: return {-1, 0};
    default: return {0, -1};
    }
}

} // namespace

Eigen::MatrixXcd kick_operator(double alpha, Axis axis, int M_cut)
{
    if (!std::isfinite(alpha))
        throw DomainError("kick strength must be finite");
    const int band = bessel_bandwidth(alpha);
    if (2 * band > M_cut) {
        std::ostringstream os;
        os << "kick strength alpha=" << alpha << " needs a Bessel band of " << band
           << " which does not fit in M_cut=" << M_cut << "; need M_cut >= " << 2 * band;
        throw TruncationError(os.str(), 2 * band);
    }
    const int dim = 2 * M_cut + 1;
    Eigen::MatrixXcd U = Eigen::MatrixXcd::Zero(dim, dim);
    std::vector<double> J(static_cast<std::size_t>(2 * band + 1));
    for (int n = -band; n <= band; ++n)
        J[static_cast<std::size_t>(n + band)] = bessel_j(n, alpha);
    for (int a = 0; a < dim; ++a) {
        for (int b = std::max(0, a - band); b <= std::min(dim - 1, a + band); ++b) {
            const int n = a - b;
            const double j = J[static_cast<std::size_t>(n + band)];
            U(a, b) = axis == Axis::x ? ipow(n) * j : complex(j, 0.0);
        }
    }
    return U;
}

DensityMatrix apply_kick(const DensityMatrix& rho, const Eigen::MatrixXcd& U)
{
    if (U.rows() != rho.dim() || U.cols() != rho.dim())
        throw RangeError("kick operator dimension does not match the density matrix");
    Eigen::MatrixXcd out = U * rho.matrix() * U.adjoint();
    return DensityMatrix(rho.cutoff(), std::move(out), rho.time());
}

double hcp_peak_field(double tau_d, double alpha, double r0)
{
    // -e * E_peak * 2 tau_d / pi = hbar alpha / r0
    return -c::pi * c::hbar * alpha / (2.0 * c::elementary_charge * r0 * tau_d);
}

WaveformEvent hcp_waveform(double tau_d, double alpha, Axis axis, double r0,
                           double t_on, int samples)
{
    if (!(tau_d > 0))
        throw DomainError("HCP duration must be positive");
    if (samples < 3)
        throw DomainError("HCP needs at least 3 samples");
    WaveformEvent ev;
    ev.t_on = t_on;
    ev.dt = tau_d / (samples - 1);
    ev.kind = axis == Axis::x ? WaveformKind::hcp_x : WaveformKind::hcp_y;
    std::vector<double> shape(static_cast<std::size_t>(samples));
    for (int k = 0; k < samples; ++k)
        shape[static_cast<std::size_t>(k)] = std::sin(c::pi * k / (samples - 1));
    shape.front() = 0.0;
    shape.back() = 0.0;
    const double target = -c::hbar * alpha / (c::elementary_charge * r0);
    const double scale = target / trapezoid(shape, ev.dt);
    for (auto& v : shape)
        v *= scale;
    const std::vector<double> zero(shape.size(), 0.0);
    if (axis == Axis::x) {
        ev.Ex = std::move(shape);
        ev.Ey = zero;
    } else {
        ev.Ey = std::move(shape);
        ev.Ex = zero;
    }
    return ev;
}

WaveformEvent cpp_waveform(double alpha_prime, int n_cycles, double omega_c, Sense sense,
                           double r0, double t_on, double cep, int samples_per_cycle)
{
    if (n_cycles < 1)
        throw DomainError("CPP needs at least one cycle");
    if (!(omega_c > 0))
        throw DomainError("CPP carrier frequency must be positive");
    if (samples_per_cycle < 8)
        throw DomainError("CPP needs at least 8 samples per cycle");
    if (n_cycles > 10)
        warn("CPP with " + std::to_string(n_cycles) +
             " cycles is spectrally narrow; transitions near the Fermi level may be missed");

    const double duration = n_cycles * 2.0 * c::pi / omega_c;
    const int samples = n_cycles * samples_per_cycle + 1;
    WaveformEvent ev;
    ev.t_on = t_on;
    ev.dt = duration / (samples - 1);
    ev.carrier_omega = omega_c;
    ev.kind = sense == Sense::plus ? WaveformKind::cpp_plus : WaveformKind::cpp_minus;

    ev.envelope.resize(static_cast<std::size_t>(samples));
    for (int k = 0; k < samples; ++k) {
        const double s = std::sin(c::pi * k / (samples - 1));
        ev.envelope[static_cast<std::size_t>(k)] = s * s;
    }
    ev.envelope.front() = 0.0;
    ev.envelope.back() = 0.0;
    const double target = -2.0 * c::hbar * alpha_prime / (c::elementary_charge * r0);
    const double scale = target / trapezoid(ev.envelope, ev.dt);
    for (auto& v : ev.envelope)
        v *= scale;

    const double sign = sense == Sense::plus ? 1.0 : -1.0;
    ev.Ex.resize(ev.envelope.size());
    ev.Ey.resize(ev.envelope.size());
    for (std::size_t k = 0; k < ev.envelope.size(); ++k) {
        const double ph = omega_c * ev.dt * static_cast<double>(k) + cep;
        ev.Ex[k] = ev.envelope[k] * std::cos(ph);
        ev.Ey[k] = sign * ev.envelope[k] * std::sin(ph);
    }
    return ev;
}

double max_driven_step(const WaveformEvent& ev, const RingScales& scales)
{
    const int M = scales.M_cut;
    const double spacing = (scales.energy(M) - scales.energy(M - 1)) / c::hbar;
    const double omega_max = std::max(spacing, ev.carrier_omega);
    return 0.02 * 2.0 * c::pi / omega_max;
}

namespace {

/// Band structure of the drive: lower(a) = V(a, a-1) for a >= 1.
/// V(a, a+1) = conj(lower(a+1)).
struct DriveBand
{
    Eigen::VectorXcd lower;
};

/// V(m+1, m) = -q r0 (E_x - i E_y) / 2 (matrix elements of cos and sin phi).
complex raising_element(const Eigen::Vector2d& E, double r0)
{
    return -c::carrier_charge * r0 * 0.5 * complex(E.x(), -E.y());
}

/// [V, X] for a Hermitian tridiagonal-off-diagonal V given by its lower band.
Eigen::MatrixXcd commutator(const Eigen::VectorXcd& lower, const Eigen::MatrixXcd& X)
{
    const Eigen::Index n = X.rows();
    Eigen::MatrixXcd out(n, n);
    // (V X)(a, b) = V(a,a-1) X(a-1,b) + V(a,a+1) X(a+1,b)
    // (X V)(a, b) = X(a,b-1) V(b-1,b) + X(a,b+1) V(b+1,b)
    for (Eigen::Index b = 0; b < n; ++b) {
        const complex v_bm1_b = b >= 1 ? std::conj(lower(b)) : complex{};
        const complex v_bp1_b = b + 1 < n ? lower(b + 1) : complex{};
        for (Eigen::Index a = 0; a < n; ++a) {
            complex s{};
            if (a >= 1)
                s += lower(a) * X(a - 1, b);
            if (a + 1 < n)
                s += std::conj(lower(a + 1)) * X(a + 1, b);
            if (b >= 1)
                s -= X(a, b - 1) * v_bm1_b;
            if (b + 1 < n)
                s -= X(a, b + 1) * v_bp1_b;
            out(a, b) = s;
        }
    }
    return out;
}

class DrivenStepper
{
public:
    DrivenStepper(const WaveformEvent& ev, const RingScales& scales, double r0)
        : m_ev(ev), m_r0(r0), m_dim(scales.dim())
    {
        m_eps_over_hbar.resize(m_dim);
        for (int i = 0; i < m_dim; ++i)
            m_eps_over_hbar(i) = scales.eps[static_cast<std::size_t>(i)] / c::hbar;
    }

    /// Interaction-picture drive band at absolute time t.
    Eigen::VectorXcd interaction_band(double t) const
    {
        const double s = t - m_ev.t_on;
        const complex v = raising_element(m_ev.field(t), m_r0);
        Eigen::VectorXcd lower = Eigen::VectorXcd::Zero(m_dim);
        for (int a = 1; a < m_dim; ++a) {
            const double w = m_eps_over_hbar(a) - m_eps_over_hbar(a - 1);
            lower(a) = v * std::polar(1.0, w * s);
        }
        return lower;
    }

    Eigen::MatrixXcd rhs(double t, const Eigen::MatrixXcd& sigma_I) const
    {
        return complex(0, -1.0 / c::hbar) * commutator(interaction_band(t), sigma_I);
    }

    Eigen::MatrixXcd rk4(double t, double h, const Eigen::MatrixXcd& y) const
    {
        const Eigen::MatrixXcd k1 = rhs(t, y);
        const Eigen::MatrixXcd k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1);
        const Eigen::MatrixXcd k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2);
        const Eigen::MatrixXcd k4 = rhs(t + h, y + h * k3);
        return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }

    /// Lab-frame matrix from the interaction picture at absolute time t.
    Eigen::MatrixXcd to_lab(double t, const Eigen::MatrixXcd& sigma_I) const
    {
        const double s = t - m_ev.t_on;
        Eigen::VectorXcd ph(m_dim);
        for (int i = 0; i < m_dim; ++i)
            ph(i) = std::polar(1.0, -m_eps_over_hbar(i) * s);
        // sigma(a,b) = sigma_I(a,b) exp(-i(eps_a - eps_b) s / hbar)
        return ph.asDiagonal() * sigma_I * ph.conjugate().asDiagonal();
    }

    /// Second time derivative of the lab-frame state.
    Eigen::MatrixXcd second_derivative(double t, const Eigen::MatrixXcd& sigma) const
    {
        const complex mi(0, -1.0 / c::hbar);
        Eigen::VectorXcd band = Eigen::VectorXcd::Zero(m_dim);
        Eigen::VectorXcd rate_band = Eigen::VectorXcd::Zero(m_dim);
        const complex v = raising_element(m_ev.field(t), m_r0);
        const complex vdot = raising_element(m_ev.field_rate(t), m_r0);
        for (int a = 1; a < m_dim; ++a) {
            band(a) = v;
            rate_band(a) = vdot;
        }
        auto h0_comm = [&](const Eigen::MatrixXcd& X) {
            Eigen::MatrixXcd out(X.rows(), X.cols());
            for (int b = 0; b < m_dim; ++b)
                for (int a = 0; a < m_dim; ++a)
                    out(a, b) = c::hbar * (m_eps_over_hbar(a) - m_eps_over_hbar(b)) * X(a, b);
            return out;
        };
        const Eigen::MatrixXcd sdot = mi * (h0_comm(sigma) + commutator(band, sigma));
        return mi * (commutator(rate_band, sigma) + h0_comm(sdot) + commutator(band, sdot));
    }

private:
    const WaveformEvent& m_ev;
    double m_r0;
    int m_dim;
    Eigen::VectorXd m_eps_over_hbar;
};

} // namespace

DensityMatrix propagate_driven(const DensityMatrix& rho, const WaveformEvent& ev,
                               const RingScales& scales, double r0, double dt,
                               const std::vector<double>& observe_at,
                               const DrivenObserver& observer)
{
    ev.validate();
    if (rho.dim() != scales.dim())
        throw RangeError("density matrix and ring scales have different cutoffs");
    const double limit = max_driven_step(ev, scales);
    if (!(dt > 0) || dt > limit * (1 + 1e-12)) {
        std::ostringstream os;
        os << "driven step dt=" << dt << " s does not resolve the fastest frequency; use dt <= "
           << limit << " s";
        throw StepSizeError(os.str(), limit);
    }

    DrivenStepper stepper(ev, scales, r0);
    const auto per_sample = static_cast<long>(std::ceil(ev.dt / dt - 1e-9));
    const double h = ev.dt / static_cast<double>(per_sample);
    const long steps = per_sample * static_cast<long>(ev.Ex.size() - 1);

    Eigen::MatrixXcd y = rho.matrix();
    std::size_t next_obs = 0;
    std::vector<double> obs(observe_at);
    std::sort(obs.begin(), obs.end());
    while (next_obs < obs.size() && obs[next_obs] <= ev.t_on)
        ++next_obs;

    for (long k = 0; k < steps; ++k) {
        const double t = ev.t_on + h * static_cast<double>(k);
        const double t_next = ev.t_on + h * static_cast<double>(k + 1);
        while (observer && next_obs < obs.size() && obs[next_obs] < t_next &&
               obs[next_obs] <= ev.t_end()) {
            const double to = obs[next_obs++];
            const Eigen::MatrixXcd yo = to > t ? stepper.rk4(t, to - t, y) : y;
            DensityMatrix lab(rho.cutoff(), stepper.to_lab(to, yo), to);
            observer(to, lab, stepper.second_derivative(to, lab.matrix()));
        }
        y = stepper.rk4(t, h, y);
    }

    DensityMatrix out(rho.cutoff(), stepper.to_lab(ev.t_end(), y), ev.t_end());
    while (observer && next_obs < obs.size() && obs[next_obs] <= ev.t_end() + 1e-9 * ev.dt) {
        const double to = obs[next_obs++];
        observer(to, out, stepper.second_derivative(to, out.matrix()));
    }
    return out;
}

} // namespace ringburst
