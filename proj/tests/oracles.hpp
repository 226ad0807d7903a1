#pragma once

// Independent reference computations used to cross-check the solvers.

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace oracles {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

/// Classical disc Nevanlinna-Pick feasibility: the Pick matrix
/// [(1 - w_i conj(w_j)) / (1 - b_i conj(b_j))] must be PSD.
inline bool disc_pick_feasible(const std::vector<Complex>& b, const std::vector<Complex>& w) {
    int n = static_cast<int>(b.size());
    Matrix P(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            P(i, j) = (1.0 - w[i] * std::conj(w[j])) / (1.0 - b[i] * std::conj(b[j]));
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (P + P.adjoint()));
    return es.eigenvalues()(0) >= -1e-12;
}

/// Minimal disc interpolation norm by brute-force bisection on the Pick
/// matrix of the sigma-scaled targets.
inline double disc_minimal_norm(const std::vector<Complex>& b, const std::vector<Complex>& w) {
    double maxw = 0;
    for (Complex c : w) maxw = std::max(maxw, std::abs(c));
    if (maxw == 0) return 0;
    auto feasible = [&](double sigma) {
        std::vector<Complex> ws(w);
        for (Complex& c : ws) c /= sigma;
        return disc_pick_feasible(b, ws);
    };
    double hi = maxw;
    if (feasible(hi)) return hi;  // attained at the single-node floor
    while (!feasible(hi)) hi *= 2;
    double lo = maxw;
    for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        (feasible(mid) ? hi : lo) = mid;
    }
    return hi;
}

/// Direct matrix polynomial in three commuting matrices:
/// sum over terms c * T1^p T2^q T3^r.
struct PolyTerm {
    Complex c;
    int p, q, r;
};

inline Matrix eval_poly(const std::vector<PolyTerm>& terms, const Matrix& T1, const Matrix& T2,
                        const Matrix& T3) {
    int m = static_cast<int>(T1.rows());
    Matrix out = Matrix::Zero(m, m);
    for (const PolyTerm& t : terms) {
        Matrix acc = Matrix::Identity(m, m);
        for (int i = 0; i < t.p; ++i) acc *= T1;
        for (int i = 0; i < t.q; ++i) acc *= T2;
        for (int i = 0; i < t.r; ++i) acc *= T3;
        out += t.c * acc;
    }
    return out;
}

inline Complex eval_poly_scalar(const std::vector<PolyTerm>& terms, Complex z1, Complex z2,
                                Complex z3) {
    Complex out(0, 0);
    for (const PolyTerm& t : terms) {
        Complex acc(1, 0);
        for (int i = 0; i < t.p; ++i) acc *= z1;
        for (int i = 0; i < t.q; ++i) acc *= z2;
        for (int i = 0; i < t.r; ++i) acc *= z3;
        out += t.c * acc;
    }
    return out;
}

}  // namespace oracles
