#pragma once

#include <json.hpp>

#include "corona.hpp"
#include "operator_tuples.hpp"

namespace tetra {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "tetra-schur/v1";

inline Json complex_to_json(Complex c) { return Json::array({c.real(), c.imag()}); }

inline Complex complex_from_json(const Json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ParseError("expected [re, im] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

inline Json matrix_to_json(const Matrix& m) {
    Json rows = Json::array();
    for (int i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
        rows.push_back(row);
    }
    return rows;
}

inline Matrix matrix_from_json(const Json& j) {
    if (!j.is_array()) throw ParseError("expected a matrix (array of rows)");
    int rows = static_cast<int>(j.size());
    int cols = rows ? static_cast<int>(j[0].size()) : 0;
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        if (static_cast<int>(j[i].size()) != cols) throw ParseError("ragged matrix rows");
        for (int c = 0; c < cols; ++c) m(i, c) = complex_from_json(j[i][c]);
    }
    return m;
}

inline Json point_to_json(const TetraPoint& z) {
    return Json{{"z1", complex_to_json(z.z1)},
                {"z2", complex_to_json(z.z2)},
                {"z3", complex_to_json(z.z3)}};
}

inline TetraPoint point_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("z1") || !j.contains("z2") || !j.contains("z3"))
        throw ParseError("point needs fields z1, z2, z3");
    return {complex_from_json(j["z1"]), complex_from_json(j["z2"]), complex_from_json(j["z3"])};
}

inline Json nodes_to_json(const NodeSet& n) {
    Json a = Json::array();
    for (const TetraPoint& z : n.points) a.push_back(point_to_json(z));
    return a;
}

inline NodeSet nodes_from_json(const Json& j) {
    if (!j.is_array()) throw ParseError("nodes must be an array");
    NodeSet n;
    for (const Json& p : j) n.points.push_back(point_from_json(p));
    return n;
}

inline Json kernel_to_json(const HermitianKernel& k, bool unit_diag = false) {
    return Json{{"nodes", nodes_to_json(k.nodes)},
                {"matrix", matrix_to_json(k.matrix)},
                {"unit_diag", unit_diag}};
}

inline HermitianKernel kernel_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("nodes") || !j.contains("matrix"))
        throw ParseError("kernel needs fields nodes, matrix");
    return {nodes_from_json(j["nodes"]), matrix_from_json(j["matrix"])};
}

inline Json problem_to_json(const InterpolationProblem& p) {
    Json t = Json::array();
    for (Complex w : p.targets) t.push_back(complex_to_json(w));
    return Json{{"nodes", nodes_to_json(p.nodes)}, {"targets", t}};
}

inline InterpolationProblem problem_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("nodes") || !j.contains("targets"))
        throw ParseError("problem needs fields nodes, targets");
    InterpolationProblem p;
    p.nodes = nodes_from_json(j["nodes"]);
    for (const Json& w : j["targets"]) p.targets.push_back(complex_from_json(w));
    return p;
}

inline CoronaProblem corona_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("nodes") || !j.contains("phi") || !j.contains("delta"))
        throw ParseError("corona problem needs fields nodes, phi, delta");
    CoronaProblem p;
    p.nodes = nodes_from_json(j["nodes"]);
    p.phi = matrix_from_json(j["phi"]);
    p.delta = j["delta"].get<double>();
    return p;
}

inline Json colligation_to_json(const Colligation& c) {
    Json alphas = Json::array();
    for (Complex a : c.rep.alphas) alphas.push_back(complex_to_json(a));
    Matrix Bm = c.B, Cm = c.C;
    Matrix Am(1, 1);
    Am(0, 0) = c.A;
    return Json{{"schema", kSchema},
                {"A", matrix_to_json(Am)},
                {"B", matrix_to_json(Bm)},
                {"C", matrix_to_json(Cm)},
                {"D", matrix_to_json(c.D)},
                {"alphas", alphas},
                {"block_sizes", c.rep.block_sizes},
                {"d2", c.d2}};
}

inline const char* status_name(Status s) {
    switch (s) {
        case Status::FEASIBLE: return "FEASIBLE";
        case Status::INFEASIBLE: return "INFEASIBLE";
        default: return "INDETERMINATE";
    }
}

inline Json certificate_to_json(const ConeCertificate& c) {
    Json alphas = Json::array(), gammas = Json::array();
    for (Complex a : c.alphas) alphas.push_back(complex_to_json(a));
    for (const Matrix& g : c.gammas) gammas.push_back(matrix_to_json(g));
    return Json{{"alphas", alphas},
                {"gammas", gammas},
                {"delta", matrix_to_json(c.delta)},
                {"residual", c.residual}};
}

inline Json report_to_json(const SolveReport& r) {
    Json j{{"status", status_name(r.status)}, {"iterations", r.iterations}, {"margin", r.margin}};
    if (r.certificate) j["certificate"] = certificate_to_json(*r.certificate);
    if (r.witness)
        j["witness"] = Json{{"kernel", kernel_to_json(r.witness->kernel.base,
                                                      r.witness->kernel.unit_diag)},
                            {"pairing", r.witness->pairing}};
    return j;
}

inline Json rho_to_json(const RhoResult& r) {
    Json trace = Json::array();
    for (auto& [sigma, st] : r.trace)
        trace.push_back(Json{{"sigma", sigma}, {"status", status_name(st)}});
    return Json{{"rho", r.rho},
                {"bracket", Json::array({r.lo, r.hi})},
                {"approximate", r.approximate},
                {"trace", trace},
                {"certificate", certificate_to_json(r.extremal_certificate)}};
}

inline Json tuple_to_json(const CommutingTuple& t) {
    return Json{{"T1", matrix_to_json(t.T1)},
                {"T2", matrix_to_json(t.T2)},
                {"T3", matrix_to_json(t.T3)}};
}

inline CommutingTuple tuple_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("T1") || !j.contains("T2") || !j.contains("T3"))
        throw ParseError("tuple needs fields T1, T2, T3");
    return {matrix_from_json(j["T1"]), matrix_from_json(j["T2"]), matrix_from_json(j["T3"])};
}

}  // namespace tetra
