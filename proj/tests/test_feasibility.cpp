#include <catch2/catch_amalgamated.hpp>

#include "tetra/feasibility.hpp"

using namespace tetra;

static AlphaGrid grid = AlphaGrid::standard();

static NodeSet some_nodes(std::uint64_t seed, int n) {
    NodeSet s;
    s.points = sample_interior(seed, n, 0.25);
    return s;
}

TEST_CASE("project_psd") {
    Matrix I = Matrix::Identity(3, 3);
    CHECK((project_psd(I) - I).norm() < 1e-12);
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 1;
    d(1, 1) = -1;
    Matrix p = project_psd(d);
    CHECK(p(0, 0).real() == Catch::Approx(1.0));
    CHECK(std::abs(p(1, 1)) < 1e-14);
    // idempotence
    CHECK((project_psd(p) - p).norm() < 1e-12);
}

TEST_CASE("project_psd is the Frobenius-nearest PSD matrix (2x2 grid oracle)") {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 10; ++t) {
        Matrix h = hermitize(randn_matrix(rng, 2, 2));
        Matrix p = project_psd(h);
        double best = (h - p).norm();
        // dense search over PSD candidates u diag(a,b) u* near p
        for (int trial = 0; trial < 400; ++trial) {
            Matrix u = haar_unitary(rng, 2);
            Eigen::VectorXd ev(2);
            ev << std::abs(randn_complex(rng)) * 2, std::abs(randn_complex(rng)) * 2;
            Matrix cand = u * ev.asDiagonal() * u.adjoint();
            CHECK((h - cand).norm() >= best - 1e-9);
        }
    }
}

TEST_CASE("all-ones target is feasible via the z2 block") {
    NodeSet nodes = some_nodes(3, 3);
    HermitianKernel G{nodes, Matrix::Ones(3, 3)};
    SolveReport rep = cone_decompose(G, grid);
    REQUIRE(rep.status == Status::FEASIBLE);
    CHECK(rep.certificate->residual <= 1e-7 * G.matrix.norm() + 1e-12);
    // the closed-form certificate: Gamma = 0, Delta_ij = 1/(1 - z2_i conj(z2_j))
    Matrix delta(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            delta(i, j) = 1.0 / (1.0 - nodes.points[i].z2 * std::conj(nodes.points[j].z2));
    CHECK(lambda_min(delta) > 0);  // the reference Delta is PSD
    Matrix recon = schur_product(delta, z2_constraint(nodes));
    CHECK((recon - G.matrix).norm() < 1e-12);
}

TEST_CASE("PSD targets are feasible") {
    std::mt19937_64 rng(6);
    for (int t = 0; t < 5; ++t) {
        NodeSet nodes = some_nodes(100 + t, 3);
        Matrix a = randn_matrix(rng, 3, 3);
        HermitianKernel G{nodes, a * a.adjoint()};
        SolveReport rep = cone_decompose(G, grid);
        CHECK(rep.status == Status::FEASIBLE);
    }
}

TEST_CASE("certificate soundness") {
    NodeSet nodes = some_nodes(8, 4);
    std::mt19937_64 rng(9);
    Matrix a = randn_matrix(rng, 4, 4);
    HermitianKernel G{nodes, a * a.adjoint()};
    SolveReport rep = cone_decompose(G, grid);
    REQUIRE(rep.status == Status::FEASIBLE);
    const ConeCertificate& c = *rep.certificate;
    for (const Matrix& g : c.gammas) CHECK(lambda_min(g) >= -1e-9);
    CHECK(lambda_min(c.delta) >= -1e-9);
    Matrix recon = schur_product(c.delta, z2_constraint(nodes));
    for (std::size_t k = 0; k < c.alphas.size(); ++k)
        recon += schur_product(c.gammas[k], psi_constraint(c.alphas[k], nodes));
    CHECK((recon - G.matrix).norm() == Catch::Approx(c.residual).margin(1e-12));
    CHECK(c.residual <= 1e-7 * G.matrix.norm() + 1e-12);
}

TEST_CASE("diag(1,-1) is infeasible with an admissible witness") {
    NodeSet nodes = some_nodes(12, 2);
    Matrix G = Matrix::Zero(2, 2);
    G(0, 0) = 1;
    G(1, 1) = -1;
    SolveReport rep = cone_decompose({nodes, G}, grid);
    REQUIRE(rep.status == Status::INFEASIBLE);
    REQUIRE(rep.witness.has_value());
    CHECK(rep.witness->pairing < -1e-6);
    CHECK(check_admissible(rep.witness->kernel.base, grid).ok);
}

TEST_CASE("witness_search basics") {
    NodeSet one = some_nodes(14, 1);
    Matrix Gneg = -Matrix::Ones(1, 1);
    DualWitness w = witness_search({one, Gneg}, grid);
    CHECK(w.pairing == Catch::Approx(-1.0).margin(1e-6));

    // PSD target: no separating kernel exists
    NodeSet nodes = some_nodes(15, 2);
    std::mt19937_64 rng(2);
    Matrix a = randn_matrix(rng, 2, 2);
    Matrix P = a * a.adjoint() + 0.1 * Matrix::Identity(2, 2);
    CHECK_THROWS_AS(witness_search({nodes, P}, grid), NoWitnessFound);

    // diag(1,-1): a witness with negative pairing exists
    Matrix G = Matrix::Zero(2, 2);
    G(0, 0) = 1;
    G(1, 1) = -1;
    DualWitness w2 = witness_search({nodes, G}, grid);
    CHECK(w2.pairing < -1e-6);
}

TEST_CASE("scaling and monotonicity of feasibility") {
    NodeSet nodes = some_nodes(18, 3);
    std::mt19937_64 rng(5);
    Matrix a = randn_matrix(rng, 3, 3);
    Matrix G = (a * a.adjoint()).eval();
    for (double c : {0.5, 2.0}) {
        SolveReport rep = cone_decompose({nodes, c * G}, grid);
        CHECK(rep.status == Status::FEASIBLE);
    }
    Matrix b = randn_matrix(rng, 3, 3);
    Matrix P = b * b.adjoint();
    SolveReport rep = cone_decompose({nodes, G + P}, grid);
    CHECK(rep.status == Status::FEASIBLE);
}

TEST_CASE("mutual exclusion across random Hermitian targets") {
    std::mt19937_64 rng(77);
    for (int t = 0; t < 12; ++t) {
        int n = 2 + static_cast<int>(rng() % 3);
        NodeSet nodes = some_nodes(200 + t, n);
        Matrix h = hermitize(randn_matrix(rng, n, n));
        SolveReport rep = cone_decompose({nodes, h}, grid);
        CHECK_FALSE((rep.certificate.has_value() && rep.witness.has_value()));
        if (rep.status == Status::FEASIBLE)
            CHECK(rep.certificate->residual <= 1e-7 * h.norm() + 1e-12);
        if (rep.status == Status::INFEASIBLE) {
            CHECK(rep.witness->pairing < -1e-6);
            CHECK(check_admissible(rep.witness->kernel.base, grid).ok);
        }
    }
}

TEST_CASE("empty grid is rejected") {
    NodeSet nodes = some_nodes(19, 2);
    FeasOpts opts;
    opts.decomp_grid = 0;
    CHECK_THROWS_AS(cone_decompose({nodes, Matrix::Ones(2, 2)}, grid, opts), BadGrid);
}
