#include <ringburst/density_matrix.hpp>

#include <ringburst/errors.hpp>

#include <cmath>

namespace ringburst {

DensityMatrix::DensityMatrix(int M_cut, Eigen::MatrixXcd elements, double time)
    : m_cut(M_cut), m_rho(std::move(elements)), m_time(time)
{
    if (m_rho.rows() != dim() || m_rho.cols() != dim())
        throw RangeError("density matrix dimension does not match cutoff " +
                         std::to_string(M_cut));
}

DensityMatrix DensityMatrix::equilibrium(const RingScales& scales, double time)
{
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(scales.dim(), scales.dim());
    for (int i = 0; i < scales.dim(); ++i)
        rho(i, i) = scales.f0[static_cast<std::size_t>(i)];
    return DensityMatrix(scales.M_cut, std::move(rho), time);
}

double DensityMatrix::hermiticity_error() const
{
    return (m_rho - m_rho.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const
{
    const Eigen::MatrixXcd herm = 0.5 * (m_rho + m_rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

double DensityMatrix::edge_population(int band) const
{
    double p = 0.0;
    for (int m = -m_cut; m <= m_cut; ++m)
        if (std::abs(m) > m_cut - band)
            p += std::abs((*this)(m, m).real());
    return p;
}

} // namespace ringburst
