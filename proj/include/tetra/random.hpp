#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

namespace tetra {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline Complex randn_complex(std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    // unit-variance complex gaussian
    return Complex(g(rng), g(rng)) / std::sqrt(2.0);
}

inline Matrix randn_matrix(std::mt19937_64& rng, int rows, int cols) {
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = randn_complex(rng);
    return m;
}

/// Haar-distributed unitary via QR of a complex Gaussian matrix,
/// with the phase convention R_ii > 0.
inline Matrix haar_unitary(std::mt19937_64& rng, int n) {
    if (n == 0) return Matrix(0, 0);
    Matrix g = randn_matrix(rng, n, n);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < n; ++i) {
        Complex d = r(i, i);
        double a = std::abs(d);
        q.col(i) *= (a > 0.0) ? d / a : Complex(1, 0);
    }
    return q;
}

/// First `count` points of a 2-D Sobol sequence mapped into the open unit
/// disc (radius sqrt(u) keeps the density area-uniform).
inline std::vector<Complex> sobol_disc(int count, double radius = 0.95) {
    // dim 1: van der Corput base 2; dim 2: Sobol direction numbers for x^2+x+1
    std::vector<std::uint32_t> v(32);
    std::uint32_t m_prev = 1, m_prev2 = 1;
    v[0] = 1u << 31;
    for (int i = 1; i < 32; ++i) {
        std::uint32_t m = m_prev2 ^ (m_prev2 << 2) ^ (m_prev << 1);
        m &= (1u << (i + 1)) - 1;
        v[i] = m << (31 - i);
        m_prev2 = m_prev;
        m_prev = m;
    }
    std::vector<Complex> out;
    out.reserve(count);
    std::uint32_t x = 0, y = 0;
    for (int k = 0; k < count; ++k) {
        if (k > 0) {
            std::uint32_t c = 0, kk = k;
            while (kk & 1) {
                ++c;
                kk >>= 1;
            }
            x ^= 1u << (31 - c);
            y ^= v[c];
        }
        double u = (x + 0.5) / 4294967296.0;
        double t = (y + 0.5) / 4294967296.0;
        double r = radius * std::sqrt(u);
        double th = 2.0 * M_PI * t;
        out.emplace_back(r * std::cos(th), r * std::sin(th));
    }
    return out;
}

}  // namespace tetra
