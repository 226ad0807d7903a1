#pragma once

#include <vector>

#include "realization.hpp"

namespace tetra {

struct CoronaProblem {
    NodeSet nodes;
    Matrix phi;    // m x n: phi(j, i) = value of the j-th function at node i
    double delta = 0.0;

    int m() const { return static_cast<int>(phi.rows()); }

    void validate() const {
        if (phi.cols() != nodes.size())
            throw ShapeMismatch("corona: phi column count != node count");
        if (!(delta > 0.0)) throw OutsideDomain("corona: delta must be positive");
    }
};

/// Target matrix G_il = sum_j phi_j(z_i) conj(phi_j(z_l)) - delta^2.
inline Matrix corona_target(const CoronaProblem& p) {
    p.validate();
    const int n = p.nodes.size();
    Matrix G = (p.phi.adjoint() * p.phi).transpose();
    return G - p.delta * p.delta * Matrix::Ones(n, n);
}

inline SolveReport corona_feasibility(const CoronaProblem& p, const AlphaGrid& grid,
                                      const FeasOpts& opts = {}) {
    HermitianKernel G{p.nodes, hermitize(corona_target(p))};
    return cone_decompose(G, grid, opts);
}

/// The solution column is carried by an m x m matrix transfer function
/// Y(z) = A + B X(z) (I - D X(z))^{-1} C with Y(z_i) Phi(z_i) = delta e_1;
/// the solution itself is f_j(z) = Y(z)_{1j} / delta.
struct CoronaSolution {
    Matrix A;  // m x m
    Matrix B;  // m x d
    Matrix C;  // d x m
    Matrix D;  // d x d
    SimpleRepresentation rep;
    int d2 = 0;
    double delta = 0.0;
    std::vector<double> residuals;  // |sum_j phi_j(z_i) f_j(z_i) - 1| at the nodes

    Vector X_diag(const TetraPoint& z) const {
        Colligation c;
        c.rep = rep;
        c.d2 = d2;
        return c.X_diag(z);
    }

    /// Row 1 of Y(z), scaled by 1/delta and returned as the solution column.
    Vector eval(const TetraPoint& z) const {
        int d = static_cast<int>(D.rows());
        Eigen::RowVectorXcd row;
        if (d == 0) {
            row = A.row(0);
        } else {
            Vector x = X_diag(z);
            if (std::abs(z.z2) >= 1.0 || x.cwiseAbs().maxCoeff() >= 1.0 + 1e-12)
                throw OutsideDomain("corona eval: point outside the domain");
            Matrix M = Matrix::Identity(d, d) - D * x.asDiagonal();
            Matrix Y = A + B * x.asDiagonal() * Eigen::PartialPivLU<Matrix>(M).solve(C);
            row = Y.row(0);
        }
        return row.transpose() / delta;
    }
};

inline CoronaSolution corona_solve(const CoronaProblem& p, const AlphaGrid& grid,
                                   const FeasOpts& opts = {}, double tolCorona = 1e-6,
                                   double tolRank = 1e-10, double tolIso = 1e-7) {
    p.validate();
    SolveReport rep = corona_feasibility(p, grid, opts);
    if (rep.status != Status::FEASIBLE)
        throw GramMismatch("corona_solve: feasibility not certified");
    const ConeCertificate& cert = *rep.certificate;
    const int n = p.nodes.size();
    const int m = p.m();

    CertFactors f = factor_certificate(cert, tolRank);
    const int dd2 = static_cast<int>(f.Gf.cols());
    int d1 = 0;
    for (int r : f.ranks) d1 += r;
    const int d = d1 + dd2;

    // lurking isometry between
    //   a_i = (Phi(z_i); psi_k(z_i) l_i^k; z_i^{(2)} g_i)    in C^m + H
    //   b_i = (delta e_1; l_i^k; g_i)                        in C^m + H
    Matrix U(m + d, n), W(m + d, n);
    U.setZero();
    W.setZero();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) U(j, i) = p.phi(j, i);
        W(0, i) = p.delta;
        int off = m;
        for (std::size_t k = 0; k < cert.alphas.size(); ++k) {
            Complex ps = psi(cert.alphas[k], p.nodes.points[i]);
            for (int t = 0; t < f.ranks[k]; ++t) {
                U(off, i) = ps * f.L[k](i, t);
                W(off, i) = f.L[k](i, t);
                ++off;
            }
        }
        for (int t = 0; t < dd2; ++t) {
            U(off, i) = p.nodes.points[i].z2 * f.Gf(i, t);
            W(off, i) = f.Gf(i, t);
            ++off;
        }
    }

    double tolGram = 10.0 * n * std::max(cert.residual, 1e-12);
    Matrix Vop = lurking_unitary(U, W, tolGram, tolIso);

    CoronaSolution sol;
    sol.rep.alphas = cert.alphas;
    sol.rep.block_sizes = f.ranks;
    sol.d2 = dd2;
    sol.delta = p.delta;
    sol.A = Vop.block(0, 0, m, m);
    sol.B = Vop.block(0, m, m, d);
    sol.C = Vop.block(m, 0, d, m);
    sol.D = Vop.block(m, m, d, d);

    for (int i = 0; i < n; ++i) {
        Vector fv = sol.eval(p.nodes.points[i]);
        Complex s(0, 0);
        for (int j = 0; j < m; ++j) s += p.phi(j, i) * fv(j);
        double r = std::abs(s - Complex(1, 0));
        sol.residuals.push_back(r);
        if (r > tolCorona)
            throw GramMismatch("corona_solve: node residual " + std::to_string(r));
    }
    return sol;
}

/// Largest delta for which the corona instance stays feasible, by bisection.
/// min_i ||Phi(z_i)|| is an exact upper bound (the diagonal entry of the
/// target goes negative beyond it).
inline double max_delta(const NodeSet& nodes, const Matrix& phi, const AlphaGrid& grid,
                        FeasOpts opts = {}) {
    const int n = nodes.size();
    if (phi.cols() != n) throw ShapeMismatch("max_delta: phi column count != node count");
    double hi_bound = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) hi_bound = std::min(hi_bound, phi.col(i).norm());
    if (!(hi_bound > 0.0)) throw OutsideDomain("max_delta: a node with all-zero phi values");

    opts.max_iter = std::min(opts.max_iter, 8000);
    opts.witness_iter = std::min(opts.witness_iter, 150);

    auto probe = [&](double delta) {
        CoronaProblem q{nodes, phi, delta};
        return corona_feasibility(q, grid, opts);
    };
    const double tolBis = 1e-5 * hi_bound;
    if (probe(hi_bound).status == Status::FEASIBLE) return hi_bound;

    // every admissible kernel caps delta through the smallest generalized
    // eigenvalue of ((Phi* Phi)^T o k, k); descend over kernels
    Matrix A = (phi.adjoint() * phi).transpose();
    KernelBound kb = kernel_pencil_opt(nodes, A, grid, false, opts, 200);
    double hi = std::min(hi_bound, kb.value);
    double dual_cap = hi;

    double lo = hi / 2;
    int calls = 1;
    while (probe(lo).status != Status::FEASIBLE) {
        ++calls;
        hi = lo;
        lo /= 2;
        if (calls > 40 || lo < 1e-12)
            throw BisectionIndeterminate("max_delta: no feasible lower bound found");
    }
    bool indeterminate = false;
    while (hi - lo > tolBis && calls < 40) {
        double mid = 0.5 * (lo + hi);
        SolveReport rep = probe(mid);
        ++calls;
        if (rep.status == Status::FEASIBLE) {
            lo = mid;
        } else if (rep.status == Status::INFEASIBLE) {
            hi = std::min(mid, pencil_ceiling(A, rep.witness->kernel.base.matrix));
            dual_cap = std::min(dual_cap, hi);
        } else {
            indeterminate = true;
            break;
        }
    }
    if (hi - lo <= tolBis || !indeterminate) return lo;
    // indeterminate bracket: fall back on the certified dual cap
    return std::min(std::max(dual_cap, lo), hi);
}

}  // namespace tetra
