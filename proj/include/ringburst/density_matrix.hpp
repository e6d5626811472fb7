#pragma once

#include <ringburst/ring_model.hpp>

#include <Eigen/Dense>

#include <complex>

namespace ringburst {

using complex = std::complex<double>;

/// One-spin density operator on the angular-momentum window [-M, M].
///
/// Elements are stored in operator convention, element (m, m') = <m|rho|m'>,
/// so free evolution multiplies it by exp(-i (eps_m - eps_m') t / hbar). The
/// second-quantized average <a+_m a_m'> is element (m', m).
class DensityMatrix
{
public:
    DensityMatrix() = default;
    DensityMatrix(int M_cut, Eigen::MatrixXcd elements, double time = 0.0);

    /// Diagonal thermal state f0 of the given scales.
    static DensityMatrix equilibrium(const RingScales& scales, double time = 0.0);

    int cutoff() const { return m_cut; }
    int dim() const { return 2 * m_cut + 1; }
    int index(int m) const { return m + m_cut; }

    complex operator()(int m, int mp) const { return m_rho(index(m), index(mp)); }
    complex& operator()(int m, int mp) { return m_rho(index(m), index(mp)); }

    /// <a+_m a_m'>, the ordering used when writing rho_{m m'} for the dipole.
    complex correlation(int m, int mp) const { return (*this)(mp, m); }

    const Eigen::MatrixXcd& matrix() const { return m_rho; }
    Eigen::MatrixXcd& matrix() { return m_rho; }

    double time() const { return m_time; }
    void set_time(double t) { m_time = t; }

    complex trace() const { return m_rho.trace(); }

    /// max |rho - rho^+| over all elements.
    double hermiticity_error() const;

    /// Smallest eigenvalue of the Hermitian part.
    double min_eigenvalue() const;

    /// Total occupation of indices with |m| > M - band.
    double edge_population(int band) const;

private:
    int m_cut = 0;
    Eigen::MatrixXcd m_rho;
    double m_time = 0.0;
};

} // namespace ringburst
