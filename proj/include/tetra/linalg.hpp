#pragma once

#include <Eigen/Dense>

#include "errors.hpp"
#include "random.hpp"

namespace tetra {

inline Matrix hermitize(const Matrix& h) { return 0.5 * (h + h.adjoint()); }

inline double lambda_min(const Matrix& h, Vector* eigvec = nullptr) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(h));
    if (es.info() != Eigen::Success) throw EigenFailure("self-adjoint eigensolve failed");
    if (eigvec) *eigvec = es.eigenvectors().col(0);
    return es.eigenvalues()(0);
}

/// Frobenius-nearest PSD matrix: clip negative eigenvalues to zero.
inline Matrix project_psd(const Matrix& h) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(h));
    if (es.info() != Eigen::Success) throw EigenFailure("project_psd: eigensolve failed");
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

inline double op_norm(const Matrix& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0.0;
    return m.jacobiSvd().singularValues()(0);
}

}  // namespace tetra
