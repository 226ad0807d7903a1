#pragma once

#include <functional>
#include <vector>

#include "interpolation.hpp"

namespace tetra {

/// Finite simple representation: H1 = oplus_k C^{r_k} with the coordinate
/// projections, so rho(h) acts blockwise as h(alpha_k) * I.
struct SimpleRepresentation {
    std::vector<Complex> alphas;
    std::vector<int> block_sizes;

    int d1() const {
        int s = 0;
        for (int b : block_sizes) s += b;
        return s;
    }
    Matrix projection(int j) const {
        int d = d1(), off = 0;
        for (int t = 0; t < j; ++t) off += block_sizes[t];
        Matrix P = Matrix::Zero(d, d);
        for (int t = 0; t < block_sizes[j]; ++t) P(off + t, off + t) = 1.0;
        return P;
    }
};

struct Colligation {
    Complex A{0, 0};
    Eigen::RowVectorXcd B;
    Vector C;
    Matrix D;
    SimpleRepresentation rep;
    int d2 = 0;

    int dim() const { return rep.d1() + d2; }

    Matrix V() const {
        int d = dim();
        Matrix v(1 + d, 1 + d);
        v(0, 0) = A;
        v.block(0, 1, 1, d) = B;
        v.block(1, 0, d, 1) = C;
        v.block(1, 1, d, d) = D;
        return v;
    }

    /// X(z) is diagonal: psi_{alpha_k}(z) on block k, z^{(2)} on the tail.
    Vector X_diag(const TetraPoint& z) const {
        Vector x(dim());
        int off = 0;
        for (std::size_t k = 0; k < rep.alphas.size(); ++k) {
            Complex p = psi(rep.alphas[k], z);
            for (int t = 0; t < rep.block_sizes[k]; ++t) x(off++) = p;
        }
        for (int t = 0; t < d2; ++t) x(off++) = z.z2;
        return x;
    }
};

struct TransferFunction {
    Colligation col;
};

struct CertFactors {
    std::vector<Matrix> L;      // n x r_k factor of Gamma_k
    Matrix Gf;                  // n x d2 factor of Delta
    std::vector<int> ranks;
};

/// Eigen-factor each PSD certificate block, truncating eigenvalues < tolRank.
inline CertFactors factor_certificate(const ConeCertificate& cert, double tolRank = 1e-10) {
    auto factor = [&](const Matrix& M) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(M));
        if (es.info() != Eigen::Success) throw EigenFailure("factor_certificate: eigensolve");
        int n = static_cast<int>(M.rows());
        std::vector<int> keep;
        for (int j = 0; j < n; ++j)
            if (es.eigenvalues()(j) > tolRank) keep.push_back(j);
        Matrix L(n, keep.size());
        for (std::size_t c = 0; c < keep.size(); ++c)
            L.col(c) = es.eigenvectors().col(keep[c]) * std::sqrt(es.eigenvalues()(keep[c]));
        return L;
    };
    CertFactors f;
    for (const Matrix& g : cert.gammas) {
        f.L.push_back(factor(g));
        f.ranks.push_back(static_cast<int>(f.L.back().cols()));
    }
    f.Gf = factor(cert.delta);
    return f;
}

/// Core lurking-isometry step: given column stacks U, W of the same shape
/// with U*U ~= W*W (Gram equality up to the certificate residual), build a
/// unitary V with V U.col(i) ~= W.col(i): a partial isometry on span(U) via
/// SVD, completed by mapping the orthocomplement onto the orthocomplement.
inline Matrix lurking_unitary(const Matrix& U, const Matrix& W, double gram_budget,
                              double tolIso) {
    const int dim = static_cast<int>(U.rows());
    const int n = static_cast<int>(U.cols());
    double gram_err = (U.adjoint() * U - W.adjoint() * W).cwiseAbs().maxCoeff();
    if (gram_err > std::max(gram_budget, 1e-9))
        throw GramMismatch("gram mismatch " + std::to_string(gram_err) +
                           " exceeds tolerance; tighten the certificate residual");

    Eigen::JacobiSVD<Matrix> svd(U, Eigen::ComputeFullU | Eigen::ComputeThinV);
    double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    int r = 0;
    for (int j = 0; j < svd.singularValues().size(); ++j)
        if (svd.singularValues()(j) > 1e-9 * std::max(smax, 1.0)) ++r;
    Matrix Q = svd.matrixU().leftCols(r);
    Matrix Qperp = svd.matrixU().rightCols(dim - r);
    Matrix R = W * svd.matrixV().leftCols(r) *
               svd.singularValues().head(r).cwiseInverse().asDiagonal();

    // re-orthonormalize R (it is an approximate isometry already)
    Eigen::HouseholderQR<Matrix> qr(R);
    Matrix Rt = Matrix(qr.householderQ()).leftCols(r);
    Matrix T = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
    for (int j = 0; j < r; ++j) {
        Complex t = T(j, j);
        double a = std::abs(t);
        if (a > 0) Rt.col(j) *= t / a;  // keep Rt close to R, not just same span
    }
    Matrix proj = Matrix::Identity(dim, dim) - Rt * Rt.adjoint();
    Eigen::JacobiSVD<Matrix> csvd(proj, Eigen::ComputeFullU);
    Matrix Rperp = csvd.matrixU().leftCols(dim - r);

    Matrix Vop = Rt * Q.adjoint() + Rperp * Qperp.adjoint();

    double iso_err = 0.0;
    for (int i = 0; i < n; ++i) iso_err = std::max(iso_err, (Vop * U.col(i) - W.col(i)).norm());
    double unit_err = (Vop.adjoint() * Vop - Matrix::Identity(dim, dim)).norm();
    if (unit_err > 1e-8)
        throw CompletionFailure("completed operator not unitary, defect " +
                                std::to_string(unit_err));
    if (iso_err > std::max(tolIso, 100.0 * gram_err))
        throw GramMismatch("isometry residual " + std::to_string(iso_err));
    return Vop;
}

/// Lurking isometry: from the Gram equality between the domain family
/// u_i = (1; psi_{a_k}(z_i) l_i^k; z_i^{(2)} g_i) and the range family
/// v_i = (w_i; l_i^k; g_i), build a unitary V on C oplus H with
/// V u_i = v_i, and read off the colligation blocks.
inline Colligation build_colligation(const ConeCertificate& cert, const InterpolationProblem& p,
                                     double tolRank = 1e-10, double tolIso = 1e-7) {
    p.validate();
    const int n = p.nodes.size();
    CertFactors f = factor_certificate(cert, tolRank);
    const int d2 = static_cast<int>(f.Gf.cols());
    int d1 = 0;
    for (int r : f.ranks) d1 += r;
    const int d = d1 + d2;

    Colligation col;
    col.rep.alphas = cert.alphas;
    col.rep.block_sizes = f.ranks;
    col.d2 = d2;

    if (d == 0) {
        // all blocks vanished: only consistent with a constant unimodular target
        Complex w0 = p.targets.empty() ? Complex(1, 0) : p.targets[0];
        for (Complex w : p.targets)
            if (std::abs(w - w0) > 1e-8 || std::abs(std::abs(w) - 1.0) > 1e-8)
                throw GramMismatch("degenerate certificate with non-constant targets");
        col.A = w0;
        col.B = Eigen::RowVectorXcd(0);
        col.C = Vector(0);
        col.D = Matrix(0, 0);
        return col;
    }

    Matrix U(1 + d, n), W(1 + d, n);
    for (int i = 0; i < n; ++i) {
        U(0, i) = Complex(1, 0);
        W(0, i) = p.targets[i];
        int off = 1;
        for (std::size_t k = 0; k < cert.alphas.size(); ++k) {
            Complex ps = psi(cert.alphas[k], p.nodes.points[i]);
            for (int t = 0; t < f.ranks[k]; ++t) {
                U(off, i) = ps * f.L[k](i, t);
                W(off, i) = f.L[k](i, t);
                ++off;
            }
        }
        for (int t = 0; t < d2; ++t) {
            U(off, i) = p.nodes.points[i].z2 * f.Gf(i, t);
            W(off, i) = f.Gf(i, t);
            ++off;
        }
    }

    double tolGram = 10.0 * n * std::max(cert.residual, 1e-12);
    Matrix Vop = lurking_unitary(U, W, tolGram, tolIso);

    col.A = Vop(0, 0);
    col.B = Vop.block(0, 1, 1, d);
    col.C = Vop.block(1, 0, d, 1);
    col.D = Vop.block(1, 1, d, d);
    return col;
}

/// f(z) = A + B X(z) (I - D X(z))^{-1} C.
inline Complex eval_transfer(const TransferFunction& f, const TetraPoint& z,
                             double tolEval = 1e-6) {
    const Colligation& c = f.col;
    int d = c.dim();
    if (d == 0) return c.A;
    if (std::abs(z.z2) >= 1.0) throw OutsideDomain("eval_transfer: |z2| >= 1");
    Vector x = c.X_diag(z);
    if (x.cwiseAbs().maxCoeff() >= 1.0 + 1e-12)
        throw OutsideDomain("eval_transfer: ||X(z)|| >= 1");
    Matrix M = Matrix::Identity(d, d) - c.D * x.asDiagonal().toDenseMatrix();
    Eigen::PartialPivLU<Matrix> lu(M);
    Vector y = lu.solve(c.C);
    if (!y.allFinite()) throw LinearSolveFailure("eval_transfer: resolvent solve failed");
    Complex val = c.A + (c.B * x.asDiagonal() * y)(0);
    if (std::abs(val) > 1.0 + std::max(tolEval, 1e-6) * 10)
        throw NumericalBreakdown("eval_transfer: value escaped the closed disc");
    return val;
}

/// Defect identity right-hand side: C*(I - X*D*)^{-1}(I - X*X)(I - DX)^{-1}C.
inline double transfer_defect(const TransferFunction& f, const TetraPoint& z) {
    const Colligation& c = f.col;
    int d = c.dim();
    if (d == 0) return 0.0;
    Vector x = c.X_diag(z);
    Matrix M = Matrix::Identity(d, d) - c.D * x.asDiagonal().toDenseMatrix();
    Vector y = Eigen::PartialPivLU<Matrix>(M).solve(c.C);
    Vector ImXX = Vector::Ones(d) - x.cwiseAbs2();
    return (y.adjoint() * ImXX.asDiagonal() * y)(0).real();
}

inline std::function<Complex(const TetraPoint&)> hat_transfer(const TransferFunction& f) {
    return [f](const TetraPoint& z) { return std::conj(eval_transfer(f, conjugate(z))); };
}

/// Haar-random unitary colligation with equal-size projection blocks.
inline TransferFunction random_colligation(std::uint64_t seed, int d1, int d2,
                                           const std::vector<Complex>& alphas) {
    if (!alphas.empty() && d1 % static_cast<int>(alphas.size()) != 0)
        throw ShapeMismatch("random_colligation: d1 not divisible into blocks");
    if (alphas.empty() && d1 != 0)
        throw ShapeMismatch("random_colligation: d1 > 0 needs alphas");
    std::mt19937_64 rng(seed);
    int d = d1 + d2;
    Matrix V = haar_unitary(rng, 1 + d);
    TransferFunction f;
    f.col.rep.alphas = alphas;
    f.col.rep.block_sizes.assign(alphas.size(),
                                 alphas.empty() ? 0 : d1 / static_cast<int>(alphas.size()));
    f.col.d2 = d2;
    f.col.A = V(0, 0);
    f.col.B = V.block(0, 1, 1, d);
    f.col.C = V.block(1, 0, d, 1);
    f.col.D = V.block(1, 1, d, d);
    return f;
}

}  // namespace tetra
