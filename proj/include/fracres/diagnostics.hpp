#ifndef FRACRES_DIAGNOSTICS_HPP
#define FRACRES_DIAGNOSTICS_HPP

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <stdexcept>
#include <vector>

#include "fracres/dense_matrix.hpp"

namespace fracres {

/// Eigenvalues of a Hermitian matrix, ascending. Backed by Eigen's
/// self-adjoint solver; used for positivity checks and as the second route
/// of the purity cross-check.
inline std::vector<double> hermitian_eigenvalues(const DenseMatrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("hermitian_eigenvalues: not square");
    using EMat = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic>;
    Eigen::Map<const EMat> map(m.data(), static_cast<Eigen::Index>(m.rows()),
                               static_cast<Eigen::Index>(m.cols()));
    Eigen::SelfAdjointEigenSolver<EMat> solver(map, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("hermitian_eigenvalues: eigensolver failed");
    std::vector<double> ev(m.rows());
    for (std::size_t i = 0; i < ev.size(); ++i)
        ev[i] = solver.eigenvalues()[static_cast<Eigen::Index>(i)];
    return ev;
}

inline double min_eigenvalue(const DenseMatrix& m) {
    return hermitian_eigenvalues(m).front();
}

/// Structural health of a density matrix at one instant.
struct CptpDiagnostics {
    double trace_defect = 0.0;       // |tr rho - 1|
    double hermiticity_defect = 0.0; // max |rho - rho^dag| entry
    double min_eigenvalue = 0.0;
};

inline CptpDiagnostics cptp_diagnostics(const DensityMatrix& rho, bool with_eigenvalues = true) {
    CptpDiagnostics d;
    d.trace_defect = std::abs(rho.elements.trace() - cplx{1.0, 0.0});
    d.hermiticity_defect = rho.elements.hermiticity_defect();
    d.min_eigenvalue = with_eigenvalues ? min_eigenvalue(rho.elements) : 0.0;
    return d;
}

}  // namespace fracres

#endif
