#pragma once

#include <optional>
#include <vector>

#include "kernels.hpp"

namespace tetra {

struct ConeCertificate {
    std::vector<Complex> alphas;  // decomposition grid alpha_1..alpha_N
    std::vector<Matrix> gammas;   // PSD blocks Gamma_k
    Matrix delta;                 // PSD block for the z2 constraint
    double residual = 0.0;        // Frobenius reconstruction error
};

struct DualWitness {
    AdmissibleKernel kernel;
    double pairing = 0.0;  // sum_{ij} G_ij k_ij, required < 0
};

enum class Status { FEASIBLE, INFEASIBLE, INDETERMINATE };

struct SolveReport {
    Status status = Status::INDETERMINATE;
    std::optional<ConeCertificate> certificate;
    std::optional<DualWitness> witness;
    int iterations = 0;
    double margin = 0.0;
};

struct FeasOpts {
    double tolResRel = 1e-7;  // residual tolerance, relative to ||G||_F
    double tolSep = 1e-6;
    double tolPSD = 1e-9;
    int max_iter = 20000;
    int decomp_grid = 16;  // alphas carried by the decomposition variables
    int witness_iter = 400;
    std::uint64_t seed = 12345;
};

inline double pairing_value(const Matrix& G, const Matrix& k) {
    return G.cwiseProduct(k).sum().real();
}

inline Matrix reconstruct(const ConeCertificate& c, const std::vector<Matrix>& cons,
                          const Matrix& m2) {
    Matrix r = c.delta.cwiseProduct(m2);
    for (std::size_t j = 0; j < cons.size(); ++j) r += c.gammas[j].cwiseProduct(cons[j]);
    return r;
}

/// Separating-kernel search: minimize the linear pairing over admissible
/// kernels of trace n by projected subgradient; a negative diagonal entry of
/// G gives an immediate diagonal (hence admissible) witness.
inline DualWitness witness_search(const HermitianKernel& G, const AlphaGrid& grid,
                                  const FeasOpts& opts = {}) {
    G.check_hermitian(1e-8);
    const int n = G.nodes.size();
    const Matrix& g = G.matrix;

    auto certify = [&](Matrix k) -> std::optional<DualWitness> {
        k = hermitize(k);
        double p = pairing_value(g, k);
        if (p >= -opts.tolSep) return std::nullopt;
        HermitianKernel hk{G.nodes, k};
        AdmissibilityCheck c = check_admissible(hk, grid, opts.tolPSD);
        if (!c.ok) return std::nullopt;
        DualWitness w;
        w.kernel.base = hk;
        w.kernel.unit_diag = false;
        w.kernel.certified_margin = c.margin;
        w.pairing = p;
        return w;
    };

    // diagonal scan: diagonal PSD kernels are always admissible
    for (int i = 0; i < n; ++i) {
        if (g(i, i).real() < 0) {
            Matrix k = Matrix::Zero(n, n);
            k(i, i) = double(n);
            if (auto w = certify(k)) return *w;
        }
    }

    // projected subgradient on {admissible, trace = n}
    Matrix cg = g.conjugate();  // gradient of k -> sum G_ij k_ij
    double gn = cg.norm();
    if (gn == 0.0) throw NoWitnessFound("witness_search: zero target");
    std::vector<Matrix> cons;
    cons.push_back(z2_constraint(G.nodes));
    int stride = std::max<std::size_t>(1, grid.boundary.size() / 16);
    for (std::size_t j = 0; j < grid.boundary.size(); j += stride)
        cons.push_back(psi_constraint(grid.boundary[j], G.nodes));

    Matrix k = Matrix::Identity(n, n);
    for (int iter = 1; iter <= opts.witness_iter; ++iter) {
        double eta = double(n) / (gn * std::sqrt(double(iter)));
        k = hermitize(k - eta * cg);
        for (int sweep = 0; sweep < 4; ++sweep) {
            k = project_psd(k);
            for (const Matrix& M : cons) {
                Matrix S = schur_product(M, k);
                if (lambda_min(S) < -opts.tolPSD / 2) {
                    Matrix Sp = project_psd(S);
                    k = hermitize(k + (Sp - S).cwiseQuotient(M));
                }
            }
        }
        k = project_psd(k);
        double tr = k.real().trace();
        if (tr <= 1e-14)
            k = Matrix::Identity(n, n);
        else
            k *= double(n) / tr;
        if (pairing_value(g, k) < -2 * opts.tolSep || iter == opts.witness_iter) {
            if (auto w = certify(k)) return *w;
        }
    }
    throw NoWitnessFound("witness_search: pairing never certified below -tolSep");
}

/// Extremal generalized eigenvalue of the pencil (A o k, k), with a small
/// diagonal regularizer folded into the kernel so the denominator is PD.
/// The regularized kernel stays admissible whenever k is, because adding a
/// multiple of the identity adds a nonnegative diagonal to every Schur
/// product constraint.
inline double pencil_extreme(const Matrix& A, Matrix k, bool largest, Vector* vec = nullptr) {
    const int n = static_cast<int>(k.rows());
    k = hermitize(k);
    k += (1e-12 * std::max(k.real().trace(), 1.0) / n) * Matrix::Identity(n, n);
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ges(hermitize(schur_product(A, k)), k);
    if (ges.info() != Eigen::Success) throw EigenFailure("pencil_extreme: eigensolver failed");
    int idx = largest ? n - 1 : 0;
    if (vec) *vec = ges.eigenvectors().col(idx);
    return ges.eigenvalues()(idx);
}

/// Certified lower bound on the minimal interpolation norm carried by a
/// single admissible kernel.
inline double pencil_floor(const Matrix& A, const Matrix& k) {
    return std::sqrt(std::max(pencil_extreme(A, k, true), 0.0));
}

/// Certified upper bound on the corona delta carried by a single admissible
/// kernel.
inline double pencil_ceiling(const Matrix& A, const Matrix& k) {
    return std::sqrt(std::max(pencil_extreme(A, k, false), 0.0));
}

struct KernelBound {
    double value = 0.0;  // certified sqrt of the extremal pencil eigenvalue
    Matrix kernel;
};

/// Optimize the extremal pencil eigenvalue of (A o k, k) over admissible
/// kernels of trace n by projected supergradient steps.  Every certified
/// iterate yields a valid bound (a lower bound on the minimal interpolation
/// norm when maximizing, an upper bound on the corona delta when
/// minimizing), so the best certified value is returned.
inline KernelBound kernel_pencil_opt(const NodeSet& nodes, const Matrix& A,
                                     const AlphaGrid& grid, bool maximize,
                                     const FeasOpts& opts = {}, int iters = 400) {
    const int n = nodes.size();
    std::vector<Matrix> cons;
    cons.push_back(z2_constraint(nodes));
    int stride = std::max<std::size_t>(1, grid.boundary.size() / 16);
    for (std::size_t j = 0; j < grid.boundary.size(); j += stride)
        cons.push_back(psi_constraint(grid.boundary[j], nodes));

    auto sweep = [&](Matrix k) {
        for (int pass = 0; pass < 4; ++pass) {
            k = project_psd(k);
            for (const Matrix& M : cons) {
                Matrix S = schur_product(M, k);
                if (lambda_min(S) < -opts.tolPSD / 2) {
                    Matrix Sp = project_psd(S);
                    k = hermitize(k + (Sp - S).cwiseQuotient(M));
                }
            }
        }
        k = project_psd(k);
        double tr = k.real().trace();
        return (tr <= 1e-14) ? Matrix(Matrix::Identity(n, n)) : Matrix(k * (double(n) / tr));
    };

    const Matrix ones = Matrix::Ones(n, n);
    KernelBound best;
    best.kernel = Matrix::Identity(n, n);
    best.value = std::sqrt(std::max(pencil_extreme(A, best.kernel, maximize), 0.0));

    auto consider = [&](const Matrix& k) {
        double lam = pencil_extreme(A, k, maximize);
        double v = std::sqrt(std::max(lam, 0.0));
        bool improves = maximize ? (v > best.value) : (v < best.value);
        if (!improves) return;
        if (!check_admissible({nodes, k}, grid, opts.tolPSD).ok) return;
        best.value = v;
        best.kernel = k;
    };

    // structured candidates: Szego-type product kernels built from psi_alpha
    // and the second coordinate; on embedded-disc data these are extremal
    std::vector<Complex> cand_alphas{Complex(0, 0)};
    for (int j = 0; j < 16; ++j) {
        double th = 2.0 * M_PI * j / 16;
        cand_alphas.emplace_back(std::cos(th), std::sin(th));
    }
    for (Complex a : cand_alphas) {
        Matrix ka(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Complex pi = psi(a, nodes.points[i]);
                Complex pj = psi(a, nodes.points[j]);
                Complex z2i = nodes.points[i].z2, z2j = nodes.points[j].z2;
                ka(i, j) = 1.0 / ((1.0 - pi * std::conj(pj)) * (1.0 - z2i * std::conj(z2j)));
            }
        ka = hermitize(ka);
        ka *= double(n) / std::max(ka.real().trace(), 1e-14);
        consider(ka);
    }

    // a dense starting kernel keeps the pencil eigenvector away from the
    // coordinate axes, where the supergradient degenerates to zero
    std::mt19937_64 rng(opts.seed);
    Matrix k = sweep(Matrix::Identity(n, n) + Matrix::Ones(n, n));
    consider(k);
    if (best.value > 0 && lambda_min(best.kernel) > -opts.tolPSD) k = best.kernel;
    for (int t = 1; t <= iters; ++t) {
        Vector x;
        double lam = pencil_extreme(A, k, maximize, &x);
        Matrix M = (A - lam * ones).cwiseProduct(x.conjugate() * x.transpose());
        Matrix dir = M.conjugate();
        double dn = dir.norm();
        if (dn < 1e-14 * std::max(1.0, std::abs(lam)))
            dir = hermitize(randn_matrix(rng, n, n)), dn = dir.norm();
        double eta = double(n) / (dn * std::sqrt(double(t)));
        k = hermitize(maximize ? Matrix(k + eta * dir) : Matrix(k - eta * dir));
        k = sweep(k);
        if (t % 20 == 0 || t == iters) consider(k);
    }
    return best;
}

/// Cone-membership test by Douglas-Rachford splitting over the PSD blocks
/// (Gamma_1..Gamma_N, Delta).  The two sets are the affine set
/// {sum_k Gamma_k o M_k + Delta o M2 = G}, whose projection is exact and
/// entrywise (the map's normal operator is diagonal), and the product of PSD
/// cones, projected blockwise.  On stall the dual witness search decides
/// INFEASIBLE vs INDETERMINATE.
inline SolveReport cone_decompose(const HermitianKernel& G, const AlphaGrid& grid,
                                  const FeasOpts& opts = {}) {
    G.check_hermitian(1e-8);
    if (grid.boundary.empty()) throw BadGrid("cone_decompose: empty grid");
    const int n = G.nodes.size();
    const int N = opts.decomp_grid;
    if (N <= 0) throw BadGrid("cone_decompose: no decomposition alphas");

    ConeCertificate cert;
    cert.alphas.reserve(N);
    for (int j = 0; j < N; ++j) {
        double th = 2.0 * M_PI * j / N;
        cert.alphas.emplace_back(std::cos(th), std::sin(th));
    }
    std::vector<Matrix> cons;
    cons.reserve(N);
    for (Complex a : cert.alphas) cons.push_back(psi_constraint(a, G.nodes));
    Matrix m2 = z2_constraint(G.nodes);

    // normal operator of the affine map is entrywise multiplication by s
    Eigen::MatrixXd s = m2.cwiseAbs2();
    for (const Matrix& M : cons) s += M.cwiseAbs2();
    if (s.minCoeff() <= 0)
        throw NumericalBreakdown("cone_decompose: degenerate constraint stack");

    const double gnorm = G.matrix.norm();
    const double tolRes = opts.tolResRel * std::max(gnorm, 1.0);

    // Douglas-Rachford state: one Hermitian block per constraint plus Delta
    std::vector<Matrix> u(N + 1, Matrix::Zero(n, n));
    cert.gammas.assign(N, Matrix::Zero(n, n));
    cert.delta = Matrix::Zero(n, n);

    auto affine_project = [&](const std::vector<Matrix>& x) {
        ConeCertificate c;
        c.alphas = cert.alphas;
        c.gammas.assign(x.begin(), x.begin() + N);
        c.delta = x[N];
        Matrix R = G.matrix - reconstruct(c, cons, m2);
        std::vector<Matrix> p(N + 1);
        for (int j = 0; j < N; ++j)
            p[j] = x[j] + cons[j].conjugate().cwiseProduct(R).cwiseQuotient(s);
        p[N] = x[N] + m2.conjugate().cwiseProduct(R).cwiseQuotient(s);
        return p;
    };

    SolveReport rep;
    double residual = gnorm;
    double window_best = std::numeric_limits<double>::infinity();
    double stall_ref = std::numeric_limits<double>::infinity();
    const int stall_window = 500;

    for (int iter = 0; iter < opts.max_iter; ++iter) {
        std::vector<Matrix> p = affine_project(u);
        // reflect through the affine set, project onto the PSD product,
        // and take the candidate from the PSD-exact shadow sequence
        for (int j = 0; j <= N; ++j) {
            Matrix q = project_psd(hermitize(2.0 * p[j] - u[j]));
            u[j] += q - p[j];
            ((j < N) ? cert.gammas[j] : cert.delta) = q;
        }
        residual = (G.matrix - reconstruct(cert, cons, m2)).norm();
        rep.iterations = iter + 1;
        if (residual <= tolRes) {
            cert.residual = residual;
            rep.status = Status::FEASIBLE;
            rep.certificate = cert;
            rep.margin = tolRes - residual;
            return rep;
        }
        window_best = std::min(window_best, residual);
        if ((iter + 1) % stall_window == 0) {
            if (window_best > 0.995 * stall_ref) break;
            stall_ref = window_best;
            window_best = std::numeric_limits<double>::infinity();
        }
    }

    rep.margin = residual;
    try {
        DualWitness w = witness_search(G, grid, opts);
        rep.status = Status::INFEASIBLE;
        rep.witness = w;
        rep.margin = w.pairing;
    } catch (const NoWitnessFound&) {
        rep.status = Status::INDETERMINATE;
    }
    return rep;
}

}  // namespace tetra
