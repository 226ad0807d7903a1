#pragma once

#include <utility>
#include <vector>

#include "feasibility.hpp"

namespace tetra {

struct InterpolationProblem {
    NodeSet nodes;
    std::vector<Complex> targets;

    void validate() const {
        if (targets.size() != static_cast<std::size_t>(nodes.size()))
            throw ShapeMismatch("interpolation: target count != node count");
    }
};

/// Target matrix G_ij = 1 - w_i conj(w_j).
inline Matrix interpolation_target(const InterpolationProblem& p) {
    p.validate();
    const int n = p.nodes.size();
    Vector w(n);
    for (int i = 0; i < n; ++i) w(i) = p.targets[i];
    return Matrix::Ones(n, n) - w * w.adjoint();
}

/// Smallest eigenvalue of the Pick matrix against a given admissible kernel;
/// nonnegativity is necessary for solvability.
inline double check_against_kernel(const InterpolationProblem& p, const AdmissibleKernel& k) {
    p.validate();
    if (k.base.nodes.size() != p.nodes.size())
        throw NodeMismatch("check_against_kernel: kernel over a different node set");
    return lambda_min(pick_matrix(k, p.targets).matrix);
}

inline SolveReport solve(const InterpolationProblem& p, const AlphaGrid& grid,
                         const FeasOpts& opts = {}) {
    HermitianKernel G{p.nodes, interpolation_target(p)};
    return cone_decompose(G, grid, opts);
}

struct RhoResult {
    double rho = 0.0;
    double lo = 0.0, hi = 0.0;
    ConeCertificate extremal_certificate;  // certificate at sigma = hi
    bool approximate = false;              // oracle went INDETERMINATE in the final bracket
    std::vector<std::pair<double, Status>> trace;
};

/// Minimal interpolation norm by bisection on sigma: the sigma-scaled
/// problem (targets w/sigma) is feasible for every sigma > rho and
/// infeasible below.  max|w| is an exact lower bound (single-node witness).
inline RhoResult minimal_norm(const InterpolationProblem& p, const AlphaGrid& grid,
                              FeasOpts opts = {}) {
    p.validate();
    RhoResult out;
    double maxw = 0.0;
    for (Complex w : p.targets) maxw = std::max(maxw, std::abs(w));
    if (maxw == 0.0) {
        SolveReport rep = solve(p, grid, opts);
        if (rep.status != Status::FEASIBLE)
            throw BisectionIndeterminate("minimal_norm: zero-target instance not certified");
        out.extremal_certificate = *rep.certificate;
        return out;
    }

    // bisection oracles get a trimmed iteration budget
    opts.max_iter = std::min(opts.max_iter, 8000);
    opts.witness_iter = std::min(opts.witness_iter, 150);

    const double tolBis = 1e-5 * maxw;
    const int max_calls = 40;
    int calls = 0;
    auto oracle = [&](double sigma) {
        InterpolationProblem q = p;
        for (Complex& w : q.targets) w /= sigma;
        SolveReport rep = solve(q, grid, opts);
        ++calls;
        out.trace.emplace_back(sigma, rep.status);
        return rep;
    };

    const int n = p.nodes.size();
    Vector wv(n);
    for (int i = 0; i < n; ++i) wv(i) = p.targets[i];
    Matrix A = wv * wv.adjoint();

    double lo = maxw, hi = maxw;
    Status lo_status = Status::INFEASIBLE;
    SolveReport at_hi = oracle(hi);
    if (at_hi.status != Status::FEASIBLE) {
        lo_status = at_hi.status;
        // every admissible kernel yields an exact lower bound through the
        // generalized eigenvalue of ((w w*) o k, k); ascend over kernels
        KernelBound kb = kernel_pencil_opt(p.nodes, A, grid, true, opts, 200);
        lo = std::max(lo, kb.value);
        // grow the upper end until the cone decomposition certifies it
        for (double factor : {1e-4, 3e-4, 1e-3, 1e-2, 1e-1, 1.0, 3.0, 15.0, 127.0, 1023.0, 8191.0}) {
            hi = lo * (1.0 + factor);
            at_hi = oracle(hi);
            if (at_hi.status == Status::FEASIBLE) break;
        }
        if (at_hi.status != Status::FEASIBLE)
            throw BisectionIndeterminate("minimal_norm: no feasible upper bound found");
        while (hi - lo > tolBis && calls < max_calls) {
            double mid = 0.5 * (lo + hi);
            SolveReport rep = oracle(mid);
            if (rep.status == Status::FEASIBLE) {
                hi = mid;
                at_hi = rep;
            } else if (rep.status == Status::INFEASIBLE) {
                // the witness kernel sharpens the certified lower bound
                lo = std::max(mid, pencil_floor(A, rep.witness->kernel.base.matrix));
                lo_status = Status::INFEASIBLE;
            } else {
                lo_status = Status::INDETERMINATE;
                break;
            }
        }
    }
    out.lo = lo;
    out.hi = hi;
    out.approximate = (lo_status == Status::INDETERMINATE);
    // with a tight bracket either end works; on an indeterminate bracket the
    // certified dual bound is the sharper estimate
    out.rho = (hi - lo <= tolBis || lo_status != Status::INDETERMINATE) ? hi : lo;
    out.extremal_certificate = *at_hi.certificate;
    return out;
}

}  // namespace tetra
