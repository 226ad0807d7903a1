#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "geometry.hpp"
#include "linalg.hpp"

namespace tetra {

struct NodeSet {
    std::vector<TetraPoint> points;

    int size() const { return static_cast<int>(points.size()); }

    void validate(const AlphaGrid& grid) const {
        for (int i = 0; i < size(); ++i) {
            if (!membership(points[i], grid).inside)
                throw OutsideDomain("node " + std::to_string(i) + " not inside the domain");
            for (int j = 0; j < i; ++j) {
                double d = std::abs(points[i].z1 - points[j].z1) +
                           std::abs(points[i].z2 - points[j].z2) +
                           std::abs(points[i].z3 - points[j].z3);
                if (d <= 1e-10) throw NodeMismatch("nodes " + std::to_string(j) + "," +
                                                   std::to_string(i) + " coincide");
            }
        }
    }
};

struct HermitianKernel {
    NodeSet nodes;
    Matrix matrix;

    void check_hermitian(double tol = 1e-10) const {
        if (matrix.rows() != matrix.cols() || matrix.rows() != nodes.size())
            throw ShapeMismatch("kernel matrix shape does not match node count");
        if ((matrix - matrix.adjoint()).cwiseAbs().maxCoeff() > tol)
            throw NotHermitian("kernel matrix is not Hermitian");
    }
};

struct AdmissibleKernel {
    HermitianKernel base;
    bool unit_diag = false;
    double certified_margin = 0.0;  // smallest eigenvalue over all checked constraints
};

inline Matrix schur_product(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw ShapeMismatch("schur_product: shapes differ");
    return a.cwiseProduct(b);
}

/// psi_alpha evaluated at every node.
inline Vector psi_vector(Complex alpha, const NodeSet& nodes) {
    Vector v(nodes.size());
    for (int i = 0; i < nodes.size(); ++i) v(i) = psi(alpha, nodes.points[i]);
    return v;
}

/// Constraint coefficient matrix (1 - psi_alpha(z_i) conj(psi_alpha(z_j))).
inline Matrix psi_constraint(Complex alpha, const NodeSet& nodes) {
    Vector p = psi_vector(alpha, nodes);
    return Matrix::Ones(nodes.size(), nodes.size()) - p * p.adjoint();
}

/// Constraint coefficient matrix (1 - z_i^{(2)} conj(z_j^{(2)})).
inline Matrix z2_constraint(const NodeSet& nodes) {
    Vector z2(nodes.size());
    for (int i = 0; i < nodes.size(); ++i) z2(i) = nodes.points[i].z2;
    return Matrix::Ones(nodes.size(), nodes.size()) - z2 * z2.adjoint();
}

struct AdmissibilityCheck {
    bool ok = false;
    double margin = 0.0;
    std::string violated;  // "", "hermitian", "psd", "z2", "psi"
    std::optional<Complex> alpha;
    Vector witness;
};

/// Validates PSD-ness of k and of the Schur products with every constraint
/// matrix over the grid (boundary sweep + local refinement + interior guard).
/// The boundary-only sweep is justified for PSD k: the quadratic-form deficit
/// is subharmonic in alpha, so the worst alpha lies on the unit circle.
inline AdmissibilityCheck check_admissible(const HermitianKernel& k, const AlphaGrid& grid,
                                           double tolPSD = 1e-9) {
    AdmissibilityCheck res;
    if (k.matrix.rows() != k.matrix.cols() || k.matrix.rows() != k.nodes.size())
        throw ShapeMismatch("check_admissible: kernel shape mismatch");
    if ((k.matrix - k.matrix.adjoint()).cwiseAbs().maxCoeff() > 1e-8) {
        res.violated = "hermitian";
        return res;
    }
    Matrix km = hermitize(k.matrix);

    Vector w;
    double margin = lambda_min(km, &w);
    res.margin = margin;
    if (margin < -tolPSD) {
        res.violated = "psd";
        res.witness = w;
        return res;
    }

    double l2 = lambda_min(schur_product(z2_constraint(k.nodes), km), &w);
    if (l2 < res.margin) {
        res.margin = l2;
        res.witness = w;
    }
    if (l2 < -tolPSD) {
        res.violated = "z2";
        return res;
    }

    auto eval_alpha = [&](Complex a, Vector* vec) {
        return lambda_min(schur_product(psi_constraint(a, k.nodes), km), vec);
    };
    double worst = std::numeric_limits<double>::infinity();
    Complex worst_alpha(1, 0);
    int worst_j = 0;
    const int nb = static_cast<int>(grid.boundary.size());
    for (int j = 0; j < nb; ++j) {
        double v = eval_alpha(grid.boundary[j], nullptr);
        if (v < worst) {
            worst = v;
            worst_alpha = grid.boundary[j];
            worst_j = j;
        }
    }
    // local angle refinement around the boundary argmin
    {
        double h = 2.0 * M_PI / nb;
        double th0 = std::arg(grid.boundary[worst_j]);
        double lo = th0 - h, hi = th0 + h;
        auto at = [&](double th) {
            return eval_alpha(Complex(std::cos(th), std::sin(th)), nullptr);
        };
        for (int d = 0; d < grid.refine_depth; ++d) {
            double m1 = lo + (hi - lo) / 3.0;
            double m2 = hi - (hi - lo) / 3.0;
            if (at(m1) > at(m2))
                lo = m1;
            else
                hi = m2;
        }
        double th = 0.5 * (lo + hi);
        double v = at(th);
        if (v < worst) {
            worst = v;
            worst_alpha = Complex(std::cos(th), std::sin(th));
        }
    }
    for (Complex a : grid.interior) {
        double v = eval_alpha(a, nullptr);
        if (v < worst) {
            worst = v;
            worst_alpha = a;
        }
    }
    if (worst < res.margin) {
        res.margin = worst;
        eval_alpha(worst_alpha, &res.witness);
    }
    if (worst < -tolPSD) {
        res.violated = "psi";
        res.alpha = worst_alpha;
        return res;
    }
    res.ok = true;
    return res;
}

/// Throwing wrapper around check_admissible.
inline AdmissibleKernel certify_admissible(const HermitianKernel& k, const AlphaGrid& grid,
                                           double tolPSD = 1e-9, bool unit_diag = false) {
    AdmissibilityCheck c = check_admissible(k, grid, tolPSD);
    if (!c.ok) {
        if (c.violated == "hermitian") throw NotHermitian("kernel not Hermitian");
        if (c.violated == "psd")
            throw NotPSD("kernel not PSD, lambda_min = " + std::to_string(c.margin));
        throw SchurConstraintViolated("constraint " + c.violated +
                                      " violated, lambda_min = " + std::to_string(c.margin));
    }
    AdmissibleKernel a;
    a.base = k;
    a.base.matrix = hermitize(k.matrix);
    a.unit_diag = unit_diag;
    a.certified_margin = c.margin;
    return a;
}

/// Conjugate k by a positive diagonal so that the diagonal becomes all-ones.
/// Admissibility is preserved: every constraint Schur product conjugates by
/// the same diagonal.
inline Matrix unit_diag_rescale(const Matrix& k) {
    int n = static_cast<int>(k.rows());
    Eigen::VectorXd d(n);
    for (int i = 0; i < n; ++i) {
        double di = k(i, i).real();
        if (di <= 0.0) throw NotStrictlyPD("unit_diag_rescale: nonpositive diagonal entry");
        d(i) = 1.0 / std::sqrt(di);
    }
    Matrix out = k;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out(i, j) *= d(i) * d(j);
    return out;
}

/// Random admissible kernel by cyclic corrections: whenever a constraint
/// Schur product M o k fails PSD, replace it by its PSD projection and pull
/// the correction back entrywise (all constraint entries are nonzero at
/// interior nodes).  This is the exact projection in a Schur-weighted metric,
/// which is all a feasibility generator needs.
inline AdmissibleKernel random_admissible(const NodeSet& nodes, const AlphaGrid& grid,
                                          std::uint64_t seed, bool unit_diag,
                                          double tolPSD = 1e-9, int max_iter = 500) {
    const int n = nodes.size();
    std::mt19937_64 rng(seed);
    Matrix A = randn_matrix(rng, n, n);
    Matrix k = A * A.adjoint() / double(n) + Matrix::Identity(n, n);

    // correction constraints: the z2 matrix plus a coarse boundary subset;
    // violating alphas found by the full check are appended as they appear
    std::vector<Matrix> cons;
    cons.push_back(z2_constraint(nodes));
    int stride = std::max<std::size_t>(1, grid.boundary.size() / 16);
    for (std::size_t j = 0; j < grid.boundary.size(); j += stride)
        cons.push_back(psi_constraint(grid.boundary[j], nodes));

    for (int iter = 0; iter < max_iter; ++iter) {
        bool touched = false;
        {
            Vector dummy;
            double l = lambda_min(k);
            if (l < -tolPSD / 2) {
                k = project_psd(k);
                touched = true;
            }
        }
        for (const Matrix& M : cons) {
            Matrix S = schur_product(M, k);
            if (lambda_min(S) < -tolPSD / 2) {
                Matrix Sp = project_psd(S);
                k = hermitize(k + (Sp - S).cwiseQuotient(M));
                touched = true;
            }
        }
        if (unit_diag)
            k = unit_diag_rescale(k);
        else {
            double tr = k.real().trace();
            if (tr > 0) k *= double(n) / tr;
        }
        if (!touched) {
            HermitianKernel hk{nodes, hermitize(k)};
            AdmissibilityCheck c = check_admissible(hk, grid, tolPSD);
            if (c.ok) {
                AdmissibleKernel out;
                out.base = hk;
                out.unit_diag = unit_diag;
                out.certified_margin = c.margin;
                return out;
            }
            if (c.violated == "psi" && c.alpha)
                cons.push_back(psi_constraint(*c.alpha, nodes));
            else if (c.violated == "z2" || c.violated == "psd") {
                // nudge toward the (always admissible) diagonal part
                k = hermitize(0.9 * k + 0.1 * Matrix(k.diagonal().asDiagonal()));
            }
        }
    }
    throw GeneratorStalled("random_admissible: no certified kernel after max_iter cycles");
}

/// Pick-style matrix (1 - w_i conj(w_j)) o k.
inline HermitianKernel pick_matrix(const AdmissibleKernel& k, const std::vector<Complex>& targets) {
    const int n = k.base.nodes.size();
    if (static_cast<int>(targets.size()) != n)
        throw ShapeMismatch("pick_matrix: target count != node count");
    Vector w(n);
    for (int i = 0; i < n; ++i) w(i) = targets[i];
    Matrix G = Matrix::Ones(n, n) - w * w.adjoint();
    return {k.base.nodes, schur_product(G, k.base.matrix)};
}

}  // namespace tetra
