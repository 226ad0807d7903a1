#include <catch2/catch_amalgamated.hpp>

#include "tetra/kernels.hpp"

using namespace tetra;

static AlphaGrid grid = AlphaGrid::standard();

static NodeSet disc_nodes(std::initializer_list<double> betas) {
    NodeSet n;
    for (double b : betas) n.points.push_back(TetraPoint{{b, 0}, {0, 0}, {0, 0}});
    return n;
}

TEST_CASE("schur_product") {
    Matrix I = Matrix::Identity(3, 3);
    CHECK((schur_product(I, I) - I).norm() < 1e-15);
    std::mt19937_64 rng(3);
    Matrix M = randn_matrix(rng, 3, 3);
    CHECK((schur_product(Matrix::Ones(3, 3), M) - M).norm() < 1e-15);
    CHECK_THROWS_AS(schur_product(Matrix::Ones(2, 2), Matrix::Ones(3, 3)), ShapeMismatch);
}

TEST_CASE("schur product of PSD matrices is PSD (fuzz)") {
    std::mt19937_64 rng(42);
    for (int t = 0; t < 30; ++t) {
        int n = 2 + static_cast<int>(rng() % 5);
        Matrix a = randn_matrix(rng, n, n), b = randn_matrix(rng, n, n);
        Matrix A = a * a.adjoint(), B = b * b.adjoint();
        CHECK(lambda_min(schur_product(A, B)) > -1e-9);
    }
}

TEST_CASE("scalar kernels and diagonal kernels are admissible") {
    auto pts = sample_interior(5, 3, 0.2);
    NodeSet one{{pts[0]}};
    HermitianKernel k1{one, Matrix::Ones(1, 1)};
    AdmissibilityCheck c1 = check_admissible(k1, grid);
    CHECK(c1.ok);
    double expect = std::min(1.0 - std::norm(pts[0].z2),
                             1.0 - std::pow(sup_abs_psi(pts[0], grid), 2));
    CHECK(c1.margin == Catch::Approx(expect).margin(1e-9));

    NodeSet three{{pts[0], pts[1], pts[2]}};
    HermitianKernel kid{three, Matrix::Identity(3, 3)};
    CHECK(check_admissible(kid, grid).ok);
}

TEST_CASE("embedded-disc Szego kernel is admissible") {
    NodeSet nodes = disc_nodes({0.0, 0.5, -0.3});
    int n = nodes.size();
    Matrix k(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            k(i, j) = 1.0 / (1.0 - nodes.points[i].z1 * std::conj(nodes.points[j].z1));
    AdmissibilityCheck c = check_admissible({nodes, k}, grid);
    CHECK(c.ok);
}

TEST_CASE("all-ones kernel on nodes with differing z2 is rejected") {
    auto pts = sample_interior(9, 6, 0.2);
    // pick two points with clearly different z2
    NodeSet nodes{{pts[0], pts[1]}};
    REQUIRE(std::abs(pts[0].z2 - pts[1].z2) > 1e-3);
    AdmissibilityCheck c = check_admissible({nodes, Matrix::Ones(2, 2)}, grid);
    CHECK_FALSE(c.ok);
    // 2x2 determinant of (1 - z2 z2') o ones is -|z2 - z2'|^2 < 0
}

TEST_CASE("non-hermitian and non-psd kernels are rejected") {
    auto pts = sample_interior(5, 2, 0.2);
    NodeSet nodes{{pts[0], pts[1]}};
    Matrix bad(2, 2);
    bad << Complex(1, 0), Complex(1, 1), Complex(0, 0), Complex(1, 0);
    CHECK(check_admissible({nodes, bad}, grid).violated == "hermitian");
    Matrix indef(2, 2);
    indef << Complex(1, 0), Complex(0, 0), Complex(0, 0), Complex(-1, 0);
    AdmissibilityCheck c = check_admissible({nodes, indef}, grid);
    CHECK(c.violated == "psd");
    CHECK_THROWS_AS(certify_admissible({nodes, indef}, grid), NotPSD);
}

TEST_CASE("random_admissible is self-consistent and deterministic") {
    auto pts = sample_interior(21, 4, 0.2);
    NodeSet nodes{{pts[0], pts[1], pts[2], pts[3]}};
    AdmissibleKernel a = random_admissible(nodes, grid, 99, false);
    CHECK(a.certified_margin >= -1e-9);
    CHECK(check_admissible(a.base, grid).ok);

    AdmissibleKernel b = random_admissible(nodes, grid, 99, false);
    CHECK((a.base.matrix - b.base.matrix).norm() == 0.0);

    AdmissibleKernel u = random_admissible(nodes, grid, 5, true);
    for (int i = 0; i < nodes.size(); ++i)
        CHECK(u.base.matrix(i, i).real() == Catch::Approx(1.0).margin(1e-9));

    NodeSet one{{pts[0]}};
    AdmissibleKernel s = random_admissible(one, grid, 1, true);
    CHECK(std::abs(s.base.matrix(0, 0) - Complex(1, 0)) < 1e-12);
}

TEST_CASE("admissibility invariant under unimodular diagonal conjugation") {
    auto pts = sample_interior(31, 3, 0.2);
    NodeSet nodes{{pts[0], pts[1], pts[2]}};
    std::mt19937_64 rng(8);
    AdmissibleKernel a = random_admissible(nodes, grid, 17, false);
    for (int t = 0; t < 5; ++t) {
        Vector d(3);
        for (int i = 0; i < 3; ++i) {
            Complex g = randn_complex(rng);
            d(i) = g / std::abs(g);
        }
        Matrix conj_k = d.asDiagonal() * a.base.matrix * d.asDiagonal().toDenseMatrix().adjoint();
        CHECK(check_admissible({nodes, conj_k}, grid).ok);
    }
}

TEST_CASE("embedded-disc admissibility matches the classical disc criterion") {
    NodeSet nodes = disc_nodes({0.1, 0.6, -0.4});
    std::mt19937_64 rng(12);
    int agree = 0;
    for (int t = 0; t < 20; ++t) {
        Matrix a = randn_matrix(rng, 3, 3);
        Matrix k = a * a.adjoint();
        if (t % 2 == 0) k = hermitize(k + 0.5 * randn_matrix(rng, 3, 3));  // sometimes indefinite
        // classical: k PSD and (1 - b_i conj(b_j)) o k PSD
        Vector b(3);
        for (int i = 0; i < 3; ++i) b(i) = nodes.points[i].z1;
        Matrix disc_con = Matrix::Ones(3, 3) - b * b.adjoint();
        bool classical = lambda_min(k) >= -1e-9 &&
                         lambda_min(schur_product(disc_con, k)) >= -1e-9;
        bool ours = check_admissible({nodes, k}, grid).ok;
        if (classical == ours) ++agree;
    }
    CHECK(agree == 20);
}

TEST_CASE("pick_matrix") {
    auto pts = sample_interior(41, 2, 0.2);
    NodeSet nodes{{pts[0], pts[1]}};
    AdmissibleKernel k = random_admissible(nodes, grid, 3, false);
    HermitianKernel p0 = pick_matrix(k, {Complex(0, 0), Complex(0, 0)});
    CHECK((p0.matrix - k.base.matrix).norm() < 1e-14);

    NodeSet one{{pts[0]}};
    AdmissibleKernel k1;
    k1.base = {one, Matrix::Ones(1, 1)};
    Complex c(0.3, 0.4);
    HermitianKernel p1 = pick_matrix(k1, {c});
    CHECK(p1.matrix(0, 0).real() == Catch::Approx(1.0 - std::norm(c)));
    CHECK_THROWS_AS(pick_matrix(k1, {c, c}), ShapeMismatch);
}

TEST_CASE("pick matrix on embedded-disc Szego fixture") {
    NodeSet nodes = disc_nodes({0.0, 0.5});
    Matrix k(2, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            k(i, j) = 1.0 / (1.0 - nodes.points[i].z1 * std::conj(nodes.points[j].z1));
    AdmissibleKernel ak = certify_admissible({nodes, k}, grid);
    HermitianKernel p = pick_matrix(ak, {Complex(0, 0), Complex(0.5, 0)});
    Matrix expect(2, 2);
    expect << 1, 1, 1, 1;
    CHECK((p.matrix - expect).norm() < 1e-12);
    CHECK(lambda_min(p.matrix) >= -1e-12);
}
