#pragma once

#include <ringburst/constants.hpp>
#include <ringburst/dynamics.hpp>
#include <ringburst/ring_model.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

namespace support {

namespace c = ringburst::constants;

/// Small ring of the first figure: 0.3 um radius, 20 nm width, 160 carriers.
inline ringburst::RingConfig small_ring(double T = 4.0, int M_cut = 0)
{
    auto cfg = ringburst::RingConfig::from_material(ringburst::gaas(), 0.3e-6, 20e-9, 160, T);
    cfg.M_cut = M_cut;
    return cfg;
}

/// Large ring of the second figure: 1.35 um radius, 50 nm width, 400 carriers.
inline ringburst::RingConfig large_ring(double T = 4.0, int M_cut = 0)
{
    auto cfg = ringburst::RingConfig::from_material(ringburst::gaas(), 1.35e-6, 50e-9, 400, T);
    cfg.M_cut = M_cut;
    return cfg;
}

/// Power series of J_n(x) summed in long double.
inline double bessel_series(int n, double x)
{
    const int an = n < 0 ? -n : n;
    long double term = 1.0L;
    for (int k = 1; k <= an; ++k)
        term *= static_cast<long double>(x) / 2.0L / k;
    long double sum = term;
    const long double q = -static_cast<long double>(x) * x / 4.0L;
    for (int k = 1; k < 200; ++k) {
        term *= q / (static_cast<long double>(k) * (k + an));
        sum += term;
        if (std::fabs(static_cast<double>(term)) < 1e-30)
            break;
    }
    const double v = static_cast<double>(sum);
    return (n < 0 && (an % 2)) ? -v : v;
}

/// Fermi function in long double.
inline double fermi_ld(double e, double mu, double kT)
{
    const long double x = (static_cast<long double>(e) - mu) / kT;
    return static_cast<double>(1.0L / (std::exp(x) + 1.0L));
}

/// Radial form factor by a fixed-step midpoint rule after x = y sin(theta).
inline double form_factor_midpoint(double y, int nodes = 200000)
{
    if (y == 0.0)
        return 0.0;
    const long double pi = 3.141592653589793238462643383279L;
    const long double h = pi / 2.0L / nodes;
    long double sum = 0.0L;
    for (int k = 0; k < nodes; ++k) {
        const long double th = (k + 0.5L) * h;
        const long double x = y * std::sin(th);
        const long double s = std::sin(x / 2.0L);
        const long double den = x * x - 4.0L * pi * pi;
        long double g;
        if (std::fabs(static_cast<double>(den)) < 1e-9) {
            // sin^2(x/2) / (x - 2 pi)^2 -> 1/4 at the double zero
            g = 0.25L / (x * x * (x + 2.0L * pi) * (x + 2.0L * pi));
        } else {
            g = s * s / (x * x * den * den);
        }
        sum += g;
    }
    return static_cast<double>(8.0L * pi * pi * y * y * sum * h);
}

/// Closed form of int exp(z t') G(t' - tau) exp(i w t') dt' over the real line
/// for the Gaussian gate of width DeltaT.
inline std::complex<double> gaussian_window_response(std::complex<double> z, double omega,
                                                     double tau, double DeltaT)
{
    const double A = std::pow(2.0 / c::pi, 0.25) / std::sqrt(DeltaT);
    const std::complex<double> k = z + std::complex<double>(0.0, omega);
    return A * std::sqrt(c::pi) * DeltaT * std::exp(k * tau + k * k * DeltaT * DeltaT / 4.0);
}

inline double max_abs(const std::vector<double>& v)
{
    double m = 0.0;
    for (double x : v)
        m = std::max(m, std::fabs(x));
    return m;
}

/// Fresh empty directory under the system temp path.
inline std::filesystem::path scratch_dir(const std::string& name)
{
    const auto p = std::filesystem::temp_directory_path() / ("ringburst_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

inline std::string read_file(const std::filesystem::path& p)
{
    std::FILE* f = std::fopen(p.string().c_str(), "rb");
    if (!f)
        return {};
    std::string s;
    char buf[65536];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, f)) > 0)
        s.append(buf, n);
    std::fclose(f);
    return s;
}

inline std::filesystem::path source_dir() { return RINGBURST_SOURCE_DIR; }

} // namespace support
