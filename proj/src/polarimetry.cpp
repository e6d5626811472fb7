#include <ringburst/polarimetry.hpp>

#include <ringburst/constants.hpp>
#include <ringburst/diagnostics.hpp>
#include <ringburst/errors.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ringburst {

namespace c = constants;
using cplx = std::complex<double>;

std::vector<double> UniformGrid::values() const
{
    std::vector<double> v(count);
    for (std::size_t i = 0; i < count; ++i)
        v[i] = at(i);
    return v;
}

namespace {

void check_grid(const UniformGrid& g, const char* name)
{
    if (g.count == 0)
        return;
    if (!std::isfinite(g.start) || !std::isfinite(g.step) || (g.count > 1 && !(g.step > 0))) {
        std::ostringstream os;
        os << name << " grid must be finite with a positive step";
        throw ConfigError(os.str());
    }
}

} // namespace

void DetectorSpec::validate() const
{
    if (!(DeltaT > 0) || !std::isfinite(DeltaT))
        throw ConfigError("detector gate DeltaT must be positive");
    if (!std::isfinite(t_d))
        throw ConfigError("detector delay t_d must be finite");
    check_grid(omega, "frequency");
    check_grid(time, "time");
}

DetectorSpec DetectorSpec::resolved(const DipoleSeries& series, double omega_F) const
{
    validate();
    DetectorSpec out = *this;
    if (out.omega.count == 0) {
        out.omega.count = 512;
        out.omega.start = 0.0;
        out.omega.step = 4.0 * omega_F / 511.0;
    }
    if (out.time.count == 0) {
        out.time.start = series.t0;
        out.time.step = DeltaT / 4.0;
        const double span = series.t_end() - series.t0;
        out.time.count = static_cast<std::size_t>(std::floor(span / out.time.step + 1e-9)) + 1;
    }
    return out;
}

double detector_window(double t, double DeltaT)
{
    static const double norm = std::pow(2.0 / c::pi, 0.25);
    const double u = t / DeltaT;
    return norm / std::sqrt(DeltaT) * std::exp(-u * u);
}

namespace {

/// Sample range and trapezoid weights dt * G(t_k - t_d - t) of one window.
struct Window
{
    std::size_t k0 = 0;
    std::vector<double> w;
    bool covered = true;
};

Window make_window(std::size_t n, double t0, double dt, double t, const DetectorSpec& det,
                   bool quiescent_before)
{
    Window win;
    if (n == 0)
        return win;
    const double centre = t + det.t_d;
    const double half = DetectorSpec::support * det.DeltaT;
    const double t_end = t0 + dt * static_cast<double>(n - 1);
    const double slack = 1e-9 * dt;
    if ((!quiescent_before && centre - half < t0 - slack) || centre + half > t_end + slack)
        win.covered = false;

    const double lo = std::ceil((centre - half - t0) / dt - 1e-9);
    const double hi = std::floor((centre + half - t0) / dt + 1e-9);
    const long k_lo = static_cast<long>(std::max(lo, 0.0));
    const long k_hi = static_cast<long>(std::min(hi, static_cast<double>(n - 1)));
    if (k_hi < k_lo)
        return win;
    win.k0 = static_cast<std::size_t>(k_lo);
    win.w.resize(static_cast<std::size_t>(k_hi - k_lo + 1));
    for (long k = k_lo; k <= k_hi; ++k) {
        double w = dt * detector_window(t0 + dt * static_cast<double>(k) - centre, det.DeltaT);
        // trapezoid end weights at the ends of the record
        if (k == 0 || k == static_cast<long>(n - 1))
            w *= 0.5;
        win.w[static_cast<std::size_t>(k - k_lo)] = w;
    }
    return win;
}

/// sum_j a_j exp(i omega (t_first + j dt)) with a drift-free phasor recurrence.
cplx phasor_sum(const double* a, std::size_t n, double t_first, double dt, double omega)
{
    constexpr std::size_t reset = 256;
    const cplx step = std::polar(1.0, omega * dt);
    cplx acc{};
    for (std::size_t j0 = 0; j0 < n; j0 += reset) {
        cplx ph = std::polar(1.0, omega * (t_first + dt * static_cast<double>(j0)));
        const std::size_t j1 = std::min(n, j0 + reset);
        for (std::size_t j = j0; j < j1; ++j) {
            acc += a[j] * ph;
            ph *= step;
        }
    }
    return acc;
}

} // namespace

GatedValue gated_transform(std::span<const double> f, double t0, double dt, double omega,
                           double t, const DetectorSpec& det, bool quiescent_before)
{
    det.validate();
    if (!(dt > 0))
        throw ConfigError("sample step must be positive");
    const Window win = make_window(f.size(), t0, dt, t, det, quiescent_before);
    std::vector<double> a(win.w.size());
    for (std::size_t j = 0; j < a.size(); ++j)
        a[j] = f[win.k0 + j] * win.w[j];
    GatedValue out;
    out.covered = win.covered;
    out.value = phasor_sum(a.data(), a.size(), t0 + dt * static_cast<double>(win.k0), dt, omega);
    if (!win.covered)
        warn("gated transform window extends beyond the sampled record");
    return out;
}

namespace {

void add_impulses(const DipoleSeries& s, double omega, double t, const DetectorSpec& det,
                  cplx& X, cplx& Y)
{
    for (const auto& imp : s.impulses) {
        const double g = detector_window(imp.t - det.t_d - t, det.DeltaT);
        if (g == 0.0)
            continue;
        const cplx ph = std::polar(g, omega * imp.t);
        X += imp.dmu_dot_x * ph;
        Y += imp.dmu_dot_y * ph;
    }
}

} // namespace

GatedPair gated_dipole(const DipoleSeries& series, double omega, double t,
                       const DetectorSpec& det)
{
    det.validate();
    const Window win = make_window(series.size(), series.t0, series.dt, t, det,
                                   series.quiescent_before);
    std::vector<double> ax(win.w.size()), ay(win.w.size());
    for (std::size_t j = 0; j < ax.size(); ++j) {
        ax[j] = series.mu_ddot_x[win.k0 + j] * win.w[j];
        ay[j] = series.mu_ddot_y[win.k0 + j] * win.w[j];
    }
    const double tf = series.time(win.k0);
    GatedPair p;
    p.covered = win.covered;
    p.X = phasor_sum(ax.data(), ax.size(), tf, series.dt, omega);
    p.Y = phasor_sum(ay.data(), ay.size(), tf, series.dt, omega);
    if (det.kick_impulses)
        add_impulses(series, omega, t, det, p.X, p.Y);
    return p;
}

double stokes_prefactor(double kappa)
{
    const double c3 = c::speed_of_light * c::speed_of_light * c::speed_of_light;
    return std::sqrt(kappa) / (4.0 * c::pi * c3 * 4.0 * c::pi * c::epsilon0);
}

std::array<double, 4> stokes_from_pair(cplx X, cplx Y, double p)
{
    const double xx = std::norm(X);
    const double yy = std::norm(Y);
    const cplx xy = std::conj(X) * Y;
    return {p * (xx + yy), p * (xx - yy), 2.0 * p * xy.real(), 2.0 * p * xy.imag()};
}

double polarized_intensity(cplx X, cplx Y, const Eigen::Vector2cd& e, double p)
{
    return p * std::norm(std::conj(e(0)) * X + std::conj(e(1)) * Y);
}

const Eigen::MatrixXd& StokesSpectrogram::component(int j) const
{
    if (j < 0 || j > 3)
        throw RangeError("Stokes index must be 0..3");
    if ((j == 1 || j == 2) && !has_linear())
        throw UnsupportedError("linear Stokes components are only available at theta = 0");
    return S[static_cast<std::size_t>(j)];
}

StokesSpectrogram stokes_perp(const DipoleSeries& series, const DetectorSpec& det_in,
                              double kappa, double omega_F)
{
    const DetectorSpec det = det_in.resolved(series, omega_F);
    const double pf = stokes_prefactor(kappa);
    StokesSpectrogram out;
    out.times = det.time.values();
    out.omegas = det.omega.values();
    const auto nt = static_cast<Eigen::Index>(out.times.size());
    const auto nw = static_cast<Eigen::Index>(out.omegas.size());
    for (auto& m : out.S)
        m.resize(nt, nw);
    out.covered.assign(out.times.size(), true);

    std::size_t uncovered = 0;
    std::vector<double> ax, ay;
    for (Eigen::Index i = 0; i < nt; ++i) {
        const double t = out.times[static_cast<std::size_t>(i)];
        const Window win = make_window(series.size(), series.t0, series.dt, t, det,
                                       series.quiescent_before);
        out.covered[static_cast<std::size_t>(i)] = win.covered;
        uncovered += win.covered ? 0 : 1;
        ax.resize(win.w.size());
        ay.resize(win.w.size());
        for (std::size_t j = 0; j < ax.size(); ++j) {
            ax[j] = series.mu_ddot_x[win.k0 + j] * win.w[j];
            ay[j] = series.mu_ddot_y[win.k0 + j] * win.w[j];
        }
        const double tf = series.time(win.k0);
        for (Eigen::Index k = 0; k < nw; ++k) {
            const double w = out.omegas[static_cast<std::size_t>(k)];
            cplx X = phasor_sum(ax.data(), ax.size(), tf, series.dt, w);
            cplx Y = phasor_sum(ay.data(), ay.size(), tf, series.dt, w);
            if (det.kick_impulses)
                add_impulses(series, w, t, det, X, Y);
            const auto s = stokes_from_pair(X, Y, pf);
            for (std::size_t j = 0; j < 4; ++j)
                out.S[j](i, k) = s[j];
        }
    }
    if (uncovered) {
        std::ostringstream os;
        os << uncovered << " of " << nt
           << " detection times have windows reaching past the simulated record";
        warn(os.str());
    }
    return out;
}

StokesSpectrogram stokes_angular(const StokesSpectrogram& perp, double theta, double phi)
{
    if (!(theta >= 0.0) || !(theta <= c::pi))
        throw DomainError("polar angle must lie in [0, pi]");
    if (!perp.has_linear())
        throw DomainError("angular scaling expects a normal-observer spectrogram");
    StokesSpectrogram out = perp;
    out.theta = theta;
    out.phi = phi;
    if (theta == 0.0)
        return out;
    const double ct = std::cos(theta);
    out.S[0] *= 0.5 * (1.0 + ct * ct);
    out.S[3] *= ct;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out.S[1].setConstant(nan);
    out.S[2].setConstant(nan);
    return out;
}

double band_integral(const std::vector<double>& om, const double* y, std::ptrdiff_t stride,
                     double lo, double hi)
{
    const std::size_t n = om.size();
    if (n < 2)
        throw RangeError("band integration needs at least two frequencies");
    const double h = om[1] - om[0];
    const double tol = 1e-9 * h;
    if (!(lo < hi) || lo < om.front() - tol || hi > om.back() + tol) {
        std::ostringstream os;
        os << "band [" << lo << ", " << hi << "] rad/s outside the frequency grid ["
           << om.front() << ", " << om.back() << "]";
        throw RangeError(os.str());
    }
    auto val = [&](std::size_t i) { return y[static_cast<std::ptrdiff_t>(i) * stride]; };
    auto interp = [&](double w) {
        const double u = std::clamp((w - om.front()) / h, 0.0, static_cast<double>(n - 1));
        const auto i = std::min(static_cast<std::size_t>(u), n - 2);
        const double f = u - static_cast<double>(i);
        return (1.0 - f) * val(i) + f * val(i + 1);
    };
    // nodes strictly inside (lo, hi)
    const double ulo = (lo - om.front()) / h;
    const double uhi = (hi - om.front()) / h;
    auto i_first = static_cast<long>(std::floor(ulo + 1e-9)) + 1;
    auto i_last = static_cast<long>(std::ceil(uhi - 1e-9)) - 1;
    double sum = 0.0;
    double w_prev = lo;
    double y_prev = interp(lo);
    for (long i = i_first; i <= i_last; ++i) {
        const double w = om[static_cast<std::size_t>(i)];
        const double yv = val(static_cast<std::size_t>(i));
        sum += 0.5 * (w - w_prev) * (yv + y_prev);
        w_prev = w;
        y_prev = yv;
    }
    sum += 0.5 * (hi - w_prev) * (interp(hi) + y_prev);
    return sum / c::pi;
}

BandTraces band_integrate(const StokesSpectrogram& spec, double omega_lo, double omega_hi)
{
    BandTraces out;
    out.times = spec.times;
    out.covered = spec.covered;
    const auto nt = spec.times.size();
    for (int j = 0; j < 4; ++j) {
        if ((j == 1 || j == 2) && !spec.has_linear())
            continue;
        const Eigen::MatrixXd& m = spec.S[static_cast<std::size_t>(j)];
        auto& tr = out.S[static_cast<std::size_t>(j)];
        tr.resize(nt);
        for (std::size_t i = 0; i < nt; ++i) {
            // column-major storage: consecutive omegas are nt apart
            const double* row = m.data() + i;
            tr[i] = band_integral(spec.omegas, row, m.outerStride(), omega_lo, omega_hi);
        }
    }
    return out;
}

PcircTrace p_circ(const std::vector<double>& S3, const std::vector<double>& S0,
                  const std::vector<bool>& covered, double floor)
{
    if (S3.size() != S0.size() || (!covered.empty() && covered.size() != S0.size()))
        throw RangeError("P_circ inputs have different lengths");
    double peak = 0.0;
    for (std::size_t i = 0; i < S0.size(); ++i)
        if (covered.empty() || covered[i])
            peak = std::max(peak, S0[i]);
    PcircTrace out;
    out.value.assign(S0.size(), std::numeric_limits<double>::quiet_NaN());
    out.defined.assign(S0.size(), false);
    for (std::size_t i = 0; i < S0.size(); ++i) {
        if (!covered.empty() && !covered[i])
            continue;
        if (!(peak > 0) || !(S0[i] >= floor * peak) || S0[i] == 0.0)
            continue;
        out.value[i] = std::clamp(S3[i] / S0[i], -1.0, 1.0);
        out.defined[i] = true;
    }
    return out;
}

double stokes_norm(const RingConfig& cfg, const RingScales& scales)
{
    const double c3 = c::speed_of_light * c::speed_of_light * c::speed_of_light;
    const double w3 = scales.omega_F * scales.omega_F * scales.omega_F;
    return std::sqrt(cfg.kappa) * c::e2_gaussian * cfg.r0 * cfg.r0 * w3 / (4.0 * c::pi * c3);
}

} // namespace ringburst
