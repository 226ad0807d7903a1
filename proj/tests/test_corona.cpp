#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "tetra/corona.hpp"

using namespace tetra;

static AlphaGrid grid = AlphaGrid::standard();

TEST_CASE("single-node scalar corona") {
    auto pts = sample_interior(3, 1, 0.2);
    NodeSet one{{pts[0]}};
    Matrix phi(1, 1);
    phi(0, 0) = Complex(1, 0);

    SolveReport rep = corona_feasibility({one, phi, 1.0}, grid);
    CHECK(rep.status == Status::FEASIBLE);

    CoronaSolution sol = corona_solve({one, phi, 1.0}, grid);
    Vector f = sol.eval(pts[0]);
    CHECK(std::abs(f(0) - Complex(1, 0)) < 1e-6);

    CHECK(max_delta(one, phi, grid) == Catch::Approx(1.0).margin(1e-5));
}

TEST_CASE("pointwise shortfall forces infeasibility") {
    auto pts = sample_interior(5, 2, 0.2);
    NodeSet nodes{{pts[0], pts[1]}};
    Matrix phi(1, 2);
    phi(0, 0) = Complex(0.3, 0);
    phi(0, 1) = Complex(0.8, 0);
    // delta^2 above |phi(z_1)|^2: diagonal entry negative
    SolveReport rep = corona_feasibility({nodes, phi, 0.5}, grid);
    REQUIRE(rep.status == Status::INFEASIBLE);
    CHECK(check_admissible(rep.witness->kernel.base, grid).ok);
}

TEST_CASE("single node, two functions") {
    auto pts = sample_interior(7, 1, 0.2);
    NodeSet one{{pts[0]}};
    Matrix phi(2, 1);
    phi(0, 0) = Complex(1, 0);
    phi(1, 0) = Complex(0, 0);
    CoronaSolution sol = corona_solve({one, phi, 1.0}, grid);
    Vector f = sol.eval(pts[0]);
    CHECK(std::abs(f(0) - Complex(1, 0)) < 1e-6);
    CHECK(std::abs(f(1)) < 1e-6);
    CHECK(f.norm() <= 1.0 + 1e-6);
}

TEST_CASE("forward-constructed instances solve with small residuals") {
    // forward construction: a known bounded solution column Psi_j = g_j/(sqrt(m) delta0)
    // exists with column norm <= 1/delta0, and phi is chosen at the nodes so that
    // Phi Psi = 1; feasibility at delta < delta0 then has genuine slack
    int solved = 0;
    for (int t = 0; t < 4; ++t) {
        int m = 2 + t % 2;
        int n = 2 + t % 3;
        auto pts = sample_interior(100 + t, n, 0.2);
        NodeSet nodes;
        nodes.points = pts;
        Matrix g(m, n);
        for (int j = 0; j < m; ++j) {
            TransferFunction gj = random_colligation(200 + 10 * t + j, 2, 1, {Complex(1, 0)});
            for (int i = 0; i < n; ++i)
                g(j, i) = (j == 0) ? 0.5 * eval_transfer(gj, pts[i]) + Complex(0.5, 0)
                                   : eval_transfer(gj, pts[i]);
        }
        double delta0 = 0.5;
        Matrix phi(m, n);
        for (int i = 0; i < n; ++i) {
            double s2 = g.col(i).squaredNorm();
            REQUIRE(s2 > 1e-4);
            for (int j = 0; j < m; ++j)
                phi(j, i) = std::conj(g(j, i)) * std::sqrt(double(m)) * delta0 / s2;
        }
        double delta = 0.8 * delta0;
        CoronaProblem p{nodes, phi, delta};
        SolveReport rep = corona_feasibility(p, grid);
        CHECK(rep.status == Status::FEASIBLE);
        if (rep.status != Status::FEASIBLE) continue;
        CoronaSolution sol = corona_solve(p, grid);
        for (double r : sol.residuals) CHECK(r <= 1e-6);
        // column-norm bound at sampled points
        auto samples = sample_interior(300 + t, 20, 0.1);
        for (const TetraPoint& z : samples) CHECK(sol.eval(z).norm() <= 1.0 / delta + 1e-6);
        ++solved;
    }
    CHECK(solved == 4);
}

TEST_CASE("embedded-disc single-function max_delta matches the classical oracle") {
    // one function phi on disc nodes: corona at delta is solvable iff the
    // disc problem with targets delta/phi has minimal norm <= 1, so
    // delta_max = 1 / disc_minimal_norm(1/phi)
    NodeSet nodes;
    std::vector<Complex> b{{0.0, 0}, {0.4, 0}};
    for (Complex beta : b) nodes.points.push_back(TetraPoint{{beta.real(), 0}, {0, 0}, {0, 0}});
    Matrix phi(1, 2);
    phi(0, 0) = Complex(0.9, 0);
    phi(0, 1) = Complex(0.7, 0.2);
    std::vector<Complex> inv{1.0 / phi(0, 0), 1.0 / phi(0, 1)};
    double ref = 1.0 / oracles::disc_minimal_norm(b, inv);
    double ours = max_delta(nodes, phi, grid);
    CHECK(ours == Catch::Approx(ref).margin(2e-4));
}

TEST_CASE("max_delta is monotone when a function is appended") {
    auto pts = sample_interior(31, 2, 0.2);
    NodeSet nodes{{pts[0], pts[1]}};
    Matrix phi1(1, 2);
    phi1(0, 0) = Complex(0.6, 0.1);
    phi1(0, 1) = Complex(0.5, -0.2);
    Matrix phi2(2, 2);
    phi2.row(0) = phi1.row(0);
    phi2(1, 0) = Complex(0.3, 0);
    phi2(1, 1) = Complex(0.2, 0.1);
    double d1 = max_delta(nodes, phi1, grid);
    double d2 = max_delta(nodes, phi2, grid);
    CHECK(d2 >= d1 - 1e-4);
}

TEST_CASE("feasibility is monotone in delta") {
    auto pts = sample_interior(41, 2, 0.2);
    NodeSet nodes{{pts[0], pts[1]}};
    Matrix phi(1, 2);
    phi(0, 0) = Complex(0.8, 0);
    phi(0, 1) = Complex(0.6, 0.3);
    double dmax = max_delta(nodes, phi, grid);
    for (double frac : {0.2, 0.5, 0.9}) {
        SolveReport rep = corona_feasibility({nodes, phi, frac * dmax}, grid);
        CHECK(rep.status == Status::FEASIBLE);
    }
}
