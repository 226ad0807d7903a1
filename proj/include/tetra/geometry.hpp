#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "errors.hpp"
#include "random.hpp"

namespace tetra {

struct TetraPoint {
    Complex z1{0, 0}, z2{0, 0}, z3{0, 0};
};

inline bool finite_point(const TetraPoint& z) {
    auto ok = [](Complex c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); };
    return ok(z.z1) && ok(z.z2) && ok(z.z3);
}

/// Test-point parameters alpha: a uniform boundary grid on |alpha| = 1 plus
/// low-discrepancy interior guard points.  The sup over the closed disc is
/// attained on the boundary for the quantities we maximize, so the interior
/// points are only a numerical safety net.
struct AlphaGrid {
    std::vector<Complex> boundary;
    std::vector<Complex> interior;
    int refine_depth = 20;

    static AlphaGrid standard(int n_boundary = 256, int n_interior = 64, int depth = 20) {
        if (n_boundary <= 0) throw BadGrid("boundary grid must be non-empty");
        AlphaGrid g;
        g.refine_depth = depth;
        g.boundary.reserve(n_boundary);
        for (int j = 0; j < n_boundary; ++j) {
            double th = 2.0 * M_PI * j / n_boundary;
            g.boundary.emplace_back(std::cos(th), std::sin(th));
        }
        g.interior = sobol_disc(n_interior);
        if (n_interior > 0) g.interior[0] = Complex(0, 0);  // always probe alpha = 0
        return g;
    }
};

struct MembershipReport {
    bool inside = false;
    double margin = 0.0;  // 1 - max(|z2|, sup_alpha |psi_alpha(z)|)
    std::optional<Complex> witness_alpha;
};

constexpr double kEpsDen = 1e-12;

inline Complex psi(Complex alpha, const TetraPoint& z, double eps_den = kEpsDen) {
    Complex den = alpha * z.z2 - Complex(1, 0);
    if (std::abs(den) <= eps_den)
        throw DenominatorNearZero("psi: |alpha*z2 - 1| = " + std::to_string(std::abs(den)));
    return (alpha * z.z3 - z.z1) / den;
}

namespace detail {

inline double abs_psi_or_inf(Complex alpha, const TetraPoint& z) {
    Complex den = alpha * z.z2 - Complex(1, 0);
    double ad = std::abs(den);
    if (ad <= kEpsDen) return std::numeric_limits<double>::infinity();
    return std::abs((alpha * z.z3 - z.z1) / den);
}

}  // namespace detail

/// sup over the closed disc of |psi_alpha(z)|, computed by a boundary sweep
/// with local ternary refinement around the running argmax, plus the interior
/// guard points of the grid.
inline double sup_abs_psi(const TetraPoint& z, const AlphaGrid& grid, Complex* argmax = nullptr) {
    if (grid.boundary.empty()) throw BadGrid("empty boundary grid");
    const int nb = static_cast<int>(grid.boundary.size());
    double best = -1.0;
    int best_j = 0;
    for (int j = 0; j < nb; ++j) {
        double v = detail::abs_psi_or_inf(grid.boundary[j], z);
        if (v > best) {
            best = v;
            best_j = j;
        }
    }
    Complex best_alpha = grid.boundary[best_j];
    // refine the angle around the boundary argmax
    double h = 2.0 * M_PI / nb;
    double th0 = std::arg(best_alpha);
    double lo = th0 - h, hi = th0 + h;
    auto at = [&](double th) {
        return detail::abs_psi_or_inf(Complex(std::cos(th), std::sin(th)), z);
    };
    for (int d = 0; d < grid.refine_depth; ++d) {
        double m1 = lo + (hi - lo) / 3.0;
        double m2 = hi - (hi - lo) / 3.0;
        if (at(m1) < at(m2))
            lo = m1;
        else
            hi = m2;
    }
    double thr = 0.5 * (lo + hi);
    double vr = at(thr);
    if (vr > best) {
        best = vr;
        best_alpha = Complex(std::cos(thr), std::sin(thr));
    }
    for (Complex a : grid.interior) {
        double v = detail::abs_psi_or_inf(a, z);
        if (v > best) {
            best = v;
            best_alpha = a;
        }
    }
    if (argmax) *argmax = best_alpha;
    return best;
}

inline MembershipReport membership(const TetraPoint& z, const AlphaGrid& grid, double tol = 1e-9) {
    MembershipReport rep;
    double a2 = std::abs(z.z2);
    Complex am;
    double sup = sup_abs_psi(z, grid, &am);
    double worst = std::max(a2, sup);
    rep.margin = std::isinf(worst) ? -std::numeric_limits<double>::infinity() : 1.0 - worst;
    rep.inside = rep.margin > tol;
    if (!rep.inside) {
        if (sup >= a2)
            rep.witness_alpha = am;
        // prefer reporting an interior guard witness when one already violates
        for (Complex a : grid.interior) {
            if (detail::abs_psi_or_inf(a, z) >= 1.0 - tol) {
                rep.witness_alpha = a;
                break;
            }
        }
    }
    return rep;
}

inline TetraPoint scale(double s, const TetraPoint& z) {
    if (!(s > 0.0 && s <= 1.0)) throw OutsideDomain("scale: s must lie in (0,1]");
    return {s * z.z1, s * z.z2, s * s * z.z3};
}

inline TetraPoint conjugate(const TetraPoint& z) {
    return {std::conj(z.z1), std::conj(z.z2), std::conj(z.z3)};
}

/// Interior sampler through the 2x2 symmetric-contraction parametrization:
/// for symmetric A with ||A|| < 1 the triple (a11, a22, det A) lies inside.
/// Every draw is re-verified against the membership test.
inline std::vector<TetraPoint> sample_interior(std::uint64_t seed, int count, double margin) {
    if (!(margin > 0.0 && margin < 1.0)) throw OutsideDomain("sample_interior: margin in (0,1)");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.2, 1.0);
    AlphaGrid grid = AlphaGrid::standard();
    std::vector<TetraPoint> out;
    out.reserve(count);
    int fails = 0;
    while (static_cast<int>(out.size()) < count) {
        Complex a11 = randn_complex(rng), a12 = randn_complex(rng), a22 = randn_complex(rng);
        Eigen::Matrix2cd A;
        A << a11, a12, a12, a22;
        double nrm = A.jacobiSvd().singularValues()(0);
        if (nrm < 1e-14) {
            ++fails;
            continue;
        }
        double target = (1.0 - margin) * unif(rng);
        A *= target / nrm;
        TetraPoint z{A(0, 0), A(1, 1), A.determinant()};
        if (membership(z, grid).inside) {
            out.push_back(z);
            fails = 0;
        } else if (++fails > 500) {
            throw SamplerExhausted("sample_interior: repeated membership failures");
        }
    }
    return out;
}

}  // namespace tetra
