#pragma once

#include <ringburst/dynamics.hpp>
#include <ringburst/ring_model.hpp>

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace ringburst {

/// start + i * step for i < count.
struct UniformGrid
{
    double start = 0.0;
    double step = 0.0;
    std::size_t count = 0;

    double at(std::size_t i) const { return start + step * static_cast<double>(i); }
    double last() const { return count ? at(count - 1) : start; }
    std::vector<double> values() const;
};

/// Gated detector with Gaussian window G(t) = (2/pi)^(1/4) DeltaT^(-1/2) exp(-t^2/DeltaT^2).
struct DetectorSpec
{
    double DeltaT = 100e-12; ///< gate width [s]
    double t_d = 0.0;        ///< detector delay [s]
    /// Frequency grid [rad/s]; count 0 means [0, 4 omega_F] with 512 points.
    UniformGrid omega;
    /// Detection times [s]; count 0 means the span of the series in steps of DeltaT/4.
    UniformGrid time;
    /// Add the delta-function part of the dipole acceleration at kicks.
    bool kick_impulses = false;

    /// Half-width of the truncated window in units of DeltaT.
    static constexpr double support = 5.0;

    /// Throws ConfigError for a non-positive gate or a malformed grid.
    void validate() const;

    /// Copy with automatic grids filled in for this series and ring.
    DetectorSpec resolved(const DipoleSeries& series, double omega_F) const;
};

double detector_window(double t, double DeltaT);

struct GatedValue
{
    std::complex<double> value;
    bool covered = true; ///< false when the series misses part of the window
};

/// (f)_d(omega, t) = int f(t') G(t' - t_d - t) exp(i omega t') dt' for f
/// sampled at t0 + k dt, by the rectangle rule over the window support.
/// With quiescent_before, f is taken as zero before t0.
GatedValue gated_transform(std::span<const double> f, double t0, double dt, double omega,
                           double t, const DetectorSpec& det, bool quiescent_before = false);

/// Gated transforms X = (mu_ddot_x)_d and Y = (mu_ddot_y)_d of a dipole series,
/// impulses included when the detector asks for them.
struct GatedPair
{
    std::complex<double> X, Y;
    bool covered = true;
};

GatedPair gated_dipole(const DipoleSeries& series, double omega, double t,
                       const DetectorSpec& det);

/// sqrt(kappa) / (4 pi c^3) with the Gaussian e^2 mapped to SI.
double stokes_prefactor(double kappa);

/// Stokes vector at theta = 0 from the gated pair:
/// S0 = p(|X|^2 + |Y|^2), S1 = p(|X|^2 - |Y|^2), S2 = 2p Re(X* Y), S3 = 2p Im(X* Y).
std::array<double, 4> stokes_from_pair(std::complex<double> X, std::complex<double> Y,
                                       double prefactor);

/// p |e* . (X, Y)|^2 for a unit polarization vector e in the (sigma, pi) basis.
double polarized_intensity(std::complex<double> X, std::complex<double> Y,
                           const Eigen::Vector2cd& e, double prefactor);

/// Stokes parameters on a time x frequency grid. Matrices are indexed (t, omega).
struct StokesSpectrogram
{
    std::vector<double> times;
    std::vector<double> omegas;
    std::array<Eigen::MatrixXd, 4> S;
    std::vector<bool> covered;
    double theta = 0.0;
    double phi = 0.0;

    /// Linear components exist only for a normal observer.
    bool has_linear() const { return theta == 0.0; }

    /// S_j; throws UnsupportedError for j = 1, 2 away from theta = 0.
    const Eigen::MatrixXd& component(int j) const;
};

/// Normal-observer spectrogram over the detector grids.
StokesSpectrogram stokes_perp(const DipoleSeries& series, const DetectorSpec& det,
                              double kappa, double omega_F);

/// Observer at polar angle theta: S3 cos(theta), phi-averaged S0 (1 + cos^2 theta)/2.
StokesSpectrogram stokes_angular(const StokesSpectrogram& perp, double theta, double phi);

/// S_bar_j(t) = 2 int dw/(2 pi) S_j over [lo, hi] (trapezoid, interpolated edges).
/// Linear components are left empty when unavailable.
struct BandTraces
{
    std::vector<double> times;
    std::array<std::vector<double>, 4> S;
    std::vector<bool> covered;
};

BandTraces band_integrate(const StokesSpectrogram& spec, double omega_lo, double omega_hi);

/// Trapezoid integral of samples y on grid over [lo, hi] times 1/pi.
double band_integral(const std::vector<double>& omegas, const double* y, std::ptrdiff_t stride,
                     double lo, double hi);

struct PcircTrace
{
    std::vector<double> value; ///< NaN where undefined
    std::vector<bool> defined;
};

/// S_bar_3 / S_bar_0, undefined where S_bar_0 < floor * max S_bar_0 (or uncovered).
PcircTrace p_circ(const std::vector<double>& S3, const std::vector<double>& S0,
                  const std::vector<bool>& covered = {}, double floor = 1e-12);

/// sqrt(kappa) e^2 r0^2 omega_F^3 / (4 pi c^3).
double stokes_norm(const RingConfig& cfg, const RingScales& scales);

} // namespace ringburst
