#pragma once

#include <vector>

#include "realization.hpp"

namespace tetra {

struct CommutingTuple {
    Matrix T1, T2, T3;

    int dim() const { return static_cast<int>(T1.rows()); }

    double commute_defect() const {
        double d = (T1 * T2 - T2 * T1).norm();
        d = std::max(d, (T1 * T3 - T3 * T1).norm());
        d = std::max(d, (T2 * T3 - T3 * T2).norm());
        return d;
    }

    void check_commuting(double rel = 1e-8) const {
        double scale = std::max({T1.norm(), T2.norm(), T3.norm(), 1.0});
        if (commute_defect() > rel * scale * scale)
            throw ShapeMismatch("tuple does not commute within tolerance");
    }
};

struct ClassReport {
    bool in_M = false;
    bool in_Mprime = false;
    double norm_T2 = 0.0;
    double sup_psi_norm = 0.0;
    Complex argmax_alpha{1, 0};
};

/// psi_alpha(T) = (alpha T3 - T1)(alpha T2 - I)^{-1}.
inline Matrix psi_of_tuple(Complex alpha, const CommutingTuple& T) {
    int m = T.dim();
    Matrix den = alpha * T.T2 - Matrix::Identity(m, m);
    Eigen::FullPivLU<Matrix> lu(den);
    if (!lu.isInvertible())
        throw SingularResolvent("psi_of_tuple: alpha*T2 - I singular");
    return (alpha * T.T3 - T.T1) * lu.inverse();
}

/// Class M / M' membership via the boundary alpha sweep (the operator norm
/// of psi_alpha(T) is subharmonic in alpha when ||T2|| < 1) with local
/// refinement, plus interior guard points.
inline ClassReport classify(const CommutingTuple& T, const AlphaGrid& grid, double tol = 1e-9) {
    T.check_commuting();
    ClassReport rep;
    rep.norm_T2 = op_norm(T.T2);
    auto at = [&](Complex a) -> double {
        try {
            return op_norm(psi_of_tuple(a, T));
        } catch (const SingularResolvent&) {
            return std::numeric_limits<double>::infinity();
        }
    };
    double worst = -1.0;
    int worst_j = 0;
    const int nb = static_cast<int>(grid.boundary.size());
    for (int j = 0; j < nb; ++j) {
        double v = at(grid.boundary[j]);
        if (v > worst) {
            worst = v;
            worst_j = j;
            rep.argmax_alpha = grid.boundary[j];
        }
    }
    {
        double h = 2.0 * M_PI / nb;
        double th0 = std::arg(grid.boundary[worst_j]);
        double lo = th0 - h, hi = th0 + h;
        auto ang = [&](double th) { return at(Complex(std::cos(th), std::sin(th))); };
        for (int d = 0; d < grid.refine_depth; ++d) {
            double m1 = lo + (hi - lo) / 3.0;
            double m2 = hi - (hi - lo) / 3.0;
            if (ang(m1) < ang(m2))
                lo = m1;
            else
                hi = m2;
        }
        double th = 0.5 * (lo + hi);
        double v = ang(th);
        if (v > worst) {
            worst = v;
            rep.argmax_alpha = Complex(std::cos(th), std::sin(th));
        }
    }
    for (Complex a : grid.interior) {
        double v = at(a);
        if (v > worst) {
            worst = v;
            rep.argmax_alpha = a;
        }
    }
    rep.sup_psi_norm = worst;
    rep.in_M = rep.norm_T2 < 1.0 - tol && worst < 1.0 - tol;
    rep.in_Mprime = rep.norm_T2 <= 1.0 + tol && worst <= 1.0 + tol;
    return rep;
}

/// Model tuple attached to a strictly PD kernel: in the orthonormal
/// coordinates of the Cholesky factor k = L L*, the adjoints act as
/// T_i* = R conj(D_i) R^{-1} with R = L* and D_i the diagonal of i-th node
/// coordinates, so the joint eigenvalues are exactly the nodes.
inline CommutingTuple model_tuple(const AdmissibleKernel& k, double tolPD = 1e-12) {
    const int n = k.base.nodes.size();
    Matrix km = hermitize(k.base.matrix);
    if (lambda_min(km) <= tolPD) throw NotStrictlyPD("model_tuple: kernel not strictly PD");
    Eigen::LLT<Matrix> llt(km);
    if (llt.info() != Eigen::Success) throw NotStrictlyPD("model_tuple: Cholesky failed");
    Matrix L = llt.matrixL();
    Matrix R = L.adjoint();
    Eigen::PartialPivLU<Matrix> rlu(R);
    auto coord = [&](int which) {
        Vector d(n);
        for (int i = 0; i < n; ++i) {
            const TetraPoint& z = k.base.nodes.points[i];
            d(i) = (which == 0) ? z.z1 : (which == 1) ? z.z2 : z.z3;
        }
        return d;
    };
    auto make = [&](const Vector& d) {
        Matrix Tadj = R * d.conjugate().asDiagonal() * rlu.inverse();
        return Matrix(Tadj.adjoint());
    };
    CommutingTuple T{make(coord(0)), make(coord(1)), make(coord(2))};
    return T;
}

struct JointDiagonalization {
    Matrix S, Sinv;
    std::vector<TetraPoint> eigenvalues;  // joint eigenvalue triples, in S-column order
};

/// Simultaneous diagonalization through a random linear combination:
/// diagonalize c1 T1 + c2 T2 + c3 T3 and verify that the similarity also
/// diagonalizes each T_i.  Retries with fresh combinations.
inline JointDiagonalization joint_diagonalize(const CommutingTuple& T,
                                              double kappa_max = 1e8,
                                              std::uint64_t seed = 777) {
    T.check_commuting();
    const int m = T.dim();
    std::mt19937_64 rng(seed);
    std::string last = "no attempt";
    for (int attempt = 0; attempt < 5; ++attempt) {
        Complex c1 = randn_complex(rng), c2 = randn_complex(rng), c3 = randn_complex(rng);
        Matrix mix = c1 * T.T1 + c2 * T.T2 + c3 * T.T3;
        Eigen::ComplexEigenSolver<Matrix> es(mix);
        if (es.info() != Eigen::Success) {
            last = "eigensolver failed";
            continue;
        }
        Matrix S = es.eigenvectors();
        for (int j = 0; j < m; ++j) S.col(j) /= S.col(j).norm();
        Eigen::JacobiSVD<Matrix> svd(S);
        double kappa = svd.singularValues()(0) / svd.singularValues()(m - 1);
        if (!(kappa <= kappa_max)) {
            last = "condition number " + std::to_string(kappa);
            continue;
        }
        Matrix Sinv = S.inverse();
        JointDiagonalization jd;
        jd.S = S;
        jd.Sinv = Sinv;
        bool ok = true;
        double scale = std::max({T.T1.norm(), T.T2.norm(), T.T3.norm(), 1.0});
        std::vector<Vector> diags;
        for (const Matrix* Ti : {&T.T1, &T.T2, &T.T3}) {
            Matrix D = Sinv * (*Ti) * S;
            Vector diag = D.diagonal();
            D.diagonal().setZero();
            if (D.norm() > 1e-7 * kappa * scale) {
                ok = false;
                last = "off-diagonal residual " + std::to_string(D.norm());
                break;
            }
            diags.push_back(diag);
        }
        if (!ok) continue;
        jd.eigenvalues.resize(m);
        for (int j = 0; j < m; ++j)
            jd.eigenvalues[j] = TetraPoint{diags[0](j), diags[1](j), diags[2](j)};
        return jd;
    }
    throw NotDiagonalizable("joint_diagonalize: " + last);
}

/// f(T) for simultaneously diagonalizable T: S diag(f(lambda_j)) S^{-1}.
/// Every joint eigenvalue must lie inside the domain.
inline Matrix eval_on_tuple(const TransferFunction& f, const CommutingTuple& T,
                            const AlphaGrid& grid, double kappa_max = 1e8,
                            std::uint64_t seed = 777) {
    JointDiagonalization jd = joint_diagonalize(T, kappa_max, seed);
    const int m = T.dim();
    Vector vals(m);
    for (int j = 0; j < m; ++j) {
        if (!membership(jd.eigenvalues[j], grid).inside)
            throw EigenvalueOutsideDomain("eval_on_tuple: joint eigenvalue outside the domain");
        vals(j) = eval_transfer(f, jd.eigenvalues[j]);
    }
    return jd.S * vals.asDiagonal() * jd.Sinv;
}

/// von Neumann margin 1 - ||f(T)||; nonnegative (within tolerance) for every
/// class-M tuple and transfer function.
inline double von_neumann_margin(const TransferFunction& f, const CommutingTuple& T,
                                 const AlphaGrid& grid) {
    return 1.0 - op_norm(eval_on_tuple(f, T, grid));
}

/// Colligation realizing psi_{alpha0} itself: V = [[0,1],[1,0]] with a single
/// one-dimensional projection block at alpha0.
inline TransferFunction psi_colligation(Complex alpha0) {
    TransferFunction f;
    f.col.rep.alphas = {alpha0};
    f.col.rep.block_sizes = {1};
    f.col.d2 = 0;
    f.col.A = Complex(0, 0);
    f.col.B = Eigen::RowVectorXcd::Ones(1);
    f.col.C = Vector::Ones(1);
    f.col.D = Matrix::Zero(1, 1);
    return f;
}

/// Random class-M tuple: conjugate a diagonal tuple of deep interior joint
/// eigenvalues by a bounded-condition similarity, verify, retry on failure.
inline CommutingTuple random_m_tuple(std::uint64_t seed, int m, const AlphaGrid& grid) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> su(0.55, 1.0);
    for (int attempt = 0; attempt < 50; ++attempt) {
        std::vector<TetraPoint> ev =
            sample_interior(seed * 1315423911u + attempt * 2654435761u + 1, m, 0.55);
        Matrix Uh = haar_unitary(rng, m), Wh = haar_unitary(rng, m);
        Eigen::VectorXd sing(m);
        for (int j = 0; j < m; ++j) sing(j) = su(rng);
        Matrix S = Uh * sing.asDiagonal() * Wh;
        Matrix Sinv = S.inverse();
        auto make = [&](int which) {
            Vector d(m);
            for (int j = 0; j < m; ++j)
                d(j) = (which == 0) ? ev[j].z1 : (which == 1) ? ev[j].z2 : ev[j].z3;
            return Matrix(S * d.asDiagonal() * Sinv);
        };
        CommutingTuple T{make(0), make(1), make(2)};
        if (classify(T, grid).in_M) return T;
    }
    throw SamplerExhausted("random_m_tuple: no class-M tuple found");
}

/// Extremal witness tuple: the model tuple of the (regularized) separating
/// kernel just below rho nearly attains the minimal norm.
struct ExtremalResult {
    CommutingTuple tuple;
    double attained = 0.0;
};

inline ExtremalResult extremal_tuple(const InterpolationProblem& p, const RhoResult& rho,
                                     const AlphaGrid& grid, const FeasOpts& opts = {},
                                     double eps_below = 5e-4) {
    p.validate();
    const int n = p.nodes.size();
    double sigma_lo = rho.rho * (1.0 - eps_below);

    // separating kernel at sigma_lo
    InterpolationProblem q = p;
    for (Complex& w : q.targets) w /= sigma_lo;
    DualWitness w;
    try {
        w = witness_search(HermitianKernel{q.nodes, interpolation_target(q)}, grid, opts);
    } catch (const NoWitnessFound&) {
        throw WitnessUnavailable("extremal_tuple: no separating kernel below rho");
    }

    Matrix delta = hermitize(w.kernel.base.matrix);
    double eps_reg = 1e-8 * std::max(delta.real().trace(), 1.0) / n;
    delta += eps_reg * Matrix::Identity(n, n);
    delta = unit_diag_rescale(delta);
    AdmissibleKernel reg;
    reg.base = HermitianKernel{p.nodes, delta};
    reg.unit_diag = true;
    ExtremalResult out;
    out.tuple = model_tuple(reg);

    // extremal interpolant at the certified upper end of the bracket, where
    // the cone certificate is valid
    InterpolationProblem r = p;
    for (Complex& t : r.targets) t /= rho.hi;
    TransferFunction g{build_colligation(rho.extremal_certificate, r)};
    out.attained = rho.hi * op_norm(eval_on_tuple(g, out.tuple, grid));
    return out;
}

}  // namespace tetra
