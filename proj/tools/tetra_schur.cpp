// Command-line front end: membership checks, kernel validation,
// interpolation, minimal norm, corona solving and von Neumann fuzzing,
// with deterministic JSON reports.

#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "tetra/json_io.hpp"

using namespace tetra;

namespace {

struct CommonOpts {
    std::string config_path;
    std::uint64_t seed = 1;
    int grid_boundary = 256;
    std::vector<std::string> tol_overrides;
    std::string out_path;
    std::string format = "json";
    bool timings = false;
    std::string input_path;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_input = true) {
    cmd->add_option("--config", o.config_path, "JSON config file");
    cmd->add_option("--seed", o.seed, "random seed");
    cmd->add_option("--grid-boundary", o.grid_boundary, "boundary alpha count");
    cmd->add_option("--tol", o.tol_overrides, "tolerance override NAME=VAL")->allow_extra_args(false);
    cmd->add_option("--out", o.out_path, "output path (default stdout)");
    cmd->add_option("--format", o.format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
    cmd->add_flag("--timings", o.timings, "include stage timings (breaks byte-identical reports)");
    if (needs_input) cmd->add_option("input", o.input_path, "input JSON file")->required();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string fnv1a(const std::string& data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

struct ToleranceMap {
    std::map<std::string, double> vals;

    double get(const std::string& name, double dflt) const {
        auto it = vals.find(name);
        return it == vals.end() ? dflt : it->second;
    }
};

struct Runtime {
    CommonOpts opts;
    AlphaGrid grid;
    ToleranceMap tol;
    Json config;
    std::string input_text;
    Json input;
    std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();
};

Runtime prepare(const CommonOpts& o, bool needs_input = true) {
    Runtime rt;
    rt.opts = o;
    if (!o.config_path.empty()) {
        rt.config = Json::parse(slurp(o.config_path), nullptr, true);
        if (rt.config.contains("seed")) rt.opts.seed = rt.config["seed"].get<std::uint64_t>();
        if (rt.config.contains("grid_boundary"))
            rt.opts.grid_boundary = rt.config["grid_boundary"].get<int>();
        if (rt.config.contains("tolerances"))
            for (auto& [k, v] : rt.config["tolerances"].items())
                rt.tol.vals[k] = v.get<double>();
    }
    for (const std::string& s : o.tol_overrides) {
        auto eq = s.find('=');
        if (eq == std::string::npos) throw ParseError("--tol expects NAME=VAL, got " + s);
        rt.tol.vals[s.substr(0, eq)] = std::stod(s.substr(eq + 1));
    }
    rt.grid = AlphaGrid::standard(rt.opts.grid_boundary);
    if (needs_input && !o.input_path.empty()) {
        rt.input_text = slurp(o.input_path);
        try {
            rt.input = Json::parse(rt.input_text);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(std::string("input JSON: ") + e.what());
        }
    }
    return rt;
}

Json base_report(const Runtime& rt, const std::string& command) {
    std::string digest_src = command + "|" + rt.input_text + "|" +
                             std::to_string(rt.opts.seed) + "|" +
                             std::to_string(rt.opts.grid_boundary);
    return Json{{"schema", kSchema},
                {"command", command},
                {"inputs_digest", fnv1a(digest_src)},
                {"seed", rt.opts.seed}};
}

void emit(const Runtime& rt, Json report, const std::string& csv = "") {
    if (rt.opts.timings) {
        // opt-in only: timings vary run to run and break byte-identical output
        auto now = std::chrono::steady_clock::now();
        double ms = std::chrono::duration<double, std::milli>(now - rt.started).count();
        report["timings"] = Json{{"total_ms", ms}};
    }
    std::string text =
        (rt.opts.format == "csv" && !csv.empty()) ? csv : report.dump(2) + "\n";
    if (rt.opts.out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(rt.opts.out_path, std::ios::binary);
        out << text;
    }
}

FeasOpts feas_opts(const Runtime& rt) {
    FeasOpts f;
    f.tolResRel = rt.tol.get("tolRes", f.tolResRel);
    f.tolSep = rt.tol.get("tolSep", f.tolSep);
    f.tolPSD = rt.tol.get("tolPSD", f.tolPSD);
    f.seed = rt.opts.seed;
    return f;
}

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

int run_check_point(const CommonOpts& o) {
    Runtime rt = prepare(o);
    TetraPoint z = point_from_json(rt.input);
    MembershipReport m = membership(z, rt.grid, rt.tol.get("membership", 1e-9));
    Json rep = base_report(rt, "check-point");
    Json res{{"inside", m.inside}, {"margin", m.margin}};
    if (m.witness_alpha) res["witness_alpha"] = complex_to_json(*m.witness_alpha);
    rep["result"] = res;
    emit(rt, rep);
    return 0;
}

int run_check_kernel(const CommonOpts& o) {
    Runtime rt = prepare(o);
    HermitianKernel k = kernel_from_json(rt.input);
    AdmissibilityCheck c = check_admissible(k, rt.grid, rt.tol.get("tolPSD", 1e-9));
    Json rep = base_report(rt, "check-kernel");
    Json res{{"admissible", c.ok}, {"margin", c.margin}};
    if (!c.ok) {
        res["violated"] = c.violated;
        if (c.alpha) res["alpha"] = complex_to_json(*c.alpha);
        if (c.witness.size()) {
            Json w = Json::array();
            for (int i = 0; i < c.witness.size(); ++i)
                w.push_back(complex_to_json(c.witness(i)));
            res["witness"] = w;
        }
    }
    rep["result"] = res;
    emit(rt, rep);
    return c.ok ? 0 : 0;  // a negative verdict is a result, not an error
}

int run_interpolate(const CommonOpts& o) {
    Runtime rt = prepare(o);
    InterpolationProblem p = problem_from_json(rt.input);
    p.nodes.validate(rt.grid);
    SolveReport sr = solve(p, rt.grid, feas_opts(rt));
    Json rep = base_report(rt, "interpolate");
    Json res = report_to_json(sr);
    std::string csv;
    if (sr.status == Status::FEASIBLE) {
        TransferFunction f{build_colligation(*sr.certificate, p,
                                             rt.tol.get("tolRank", 1e-10),
                                             rt.tol.get("tolIso", 1e-7))};
        Json residuals = Json::array();
        for (int i = 0; i < p.nodes.size(); ++i) {
            Complex v = eval_transfer(f, p.nodes.points[i]);
            residuals.push_back(std::abs(v - p.targets[i]));
        }
        res["node_residuals"] = residuals;
        res["colligation"] = colligation_to_json(f.col);
        // |f| sample sweep
        std::vector<TetraPoint> samples = sample_interior(rt.opts.seed, 64, 0.05);
        std::ostringstream sweep;
        sweep << "re1,im1,re2,im2,re3,im3,abs_f\n";
        for (const TetraPoint& z : samples) {
            double a = std::abs(eval_transfer(f, z));
            sweep << fmt17(z.z1.real()) << ',' << fmt17(z.z1.imag()) << ','
                  << fmt17(z.z2.real()) << ',' << fmt17(z.z2.imag()) << ','
                  << fmt17(z.z3.real()) << ',' << fmt17(z.z3.imag()) << ','
                  << fmt17(a) << '\n';
        }
        csv = sweep.str();
    }
    rep["result"] = res;
    emit(rt, rep, csv);
    return 0;
}

int run_rho(const CommonOpts& o) {
    Runtime rt = prepare(o);
    InterpolationProblem p = problem_from_json(rt.input);
    p.nodes.validate(rt.grid);
    RhoResult r = minimal_norm(p, rt.grid, feas_opts(rt));
    Json rep = base_report(rt, "rho");
    rep["result"] = rho_to_json(r);
    emit(rt, rep);
    return 0;
}

int run_corona(const CommonOpts& o, bool with_max_delta) {
    Runtime rt = prepare(o);
    CoronaProblem p = corona_from_json(rt.input);
    p.nodes.validate(rt.grid);
    FeasOpts fo = feas_opts(rt);
    SolveReport sr = corona_feasibility(p, rt.grid, fo);
    Json rep = base_report(rt, "corona");
    Json res = report_to_json(sr);
    if (sr.status == Status::FEASIBLE) {
        CoronaSolution sol = corona_solve(p, rt.grid, fo, rt.tol.get("tolCorona", 1e-6));
        res["node_residuals"] = sol.residuals;
        Json values = Json::array();
        for (int i = 0; i < p.nodes.size(); ++i) {
            Vector fv = sol.eval(p.nodes.points[i]);
            Json col = Json::array();
            for (int j = 0; j < fv.size(); ++j) col.push_back(complex_to_json(fv(j)));
            values.push_back(col);
        }
        res["solution_at_nodes"] = values;
    }
    if (with_max_delta) res["max_delta"] = max_delta(p.nodes, p.phi, rt.grid, fo);
    rep["result"] = res;
    emit(rt, rep);
    return 0;
}

int run_fuzz_vn(const CommonOpts& o, int functions, int tuples, int dim) {
    Runtime rt = prepare(o, false);
    Json rep = base_report(rt, "fuzz-vn");
    Json res{{"functions", functions}, {"tuples", tuples}, {"dim", dim}};
    if (functions <= 0 || tuples <= 0) {
        res["evaluations"] = 0;
        rep["result"] = res;
        emit(rt, rep);
        return 0;
    }
    AlphaGrid grid = rt.grid;
    double worst = std::numeric_limits<double>::infinity();
    int evals = 0;
    std::vector<CommutingTuple> pool;
    for (int t = 0; t < tuples; ++t)
        pool.push_back(random_m_tuple(rt.opts.seed + 1000 + t, dim, grid));
    std::vector<Complex> alphas = {grid.boundary[0], grid.boundary[grid.boundary.size() / 4]};
    for (int c = 0; c < functions; ++c) {
        TransferFunction f = random_colligation(rt.opts.seed + c, 4, 2, alphas);
        for (const CommutingTuple& T : pool) {
            worst = std::min(worst, von_neumann_margin(f, T, grid));
            ++evals;
        }
    }
    res["evaluations"] = evals;
    res["worst_margin"] = worst;
    rep["result"] = res;
    emit(rt, rep);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    const char* threads = std::getenv("TETRA_SCHUR_THREADS");
    if (threads) Eigen::setNbThreads(std::max(1, std::atoi(threads)));

    CLI::App app{"tetrablock interpolation and realization toolkit"};
    app.require_subcommand(1);

    CommonOpts o_point, o_kernel, o_interp, o_rho, o_corona, o_fuzz;
    bool corona_max_delta = false;
    int fuzz_functions = 20, fuzz_tuples = 5, fuzz_dim = 4;

    add_common(app.add_subcommand("check-point", "domain membership"), o_point);
    add_common(app.add_subcommand("check-kernel", "kernel admissibility"), o_kernel);
    add_common(app.add_subcommand("interpolate", "interpolation feasibility + realization"),
               o_interp);
    add_common(app.add_subcommand("rho", "minimal interpolation norm"), o_rho);
    auto* corona_cmd = app.add_subcommand("corona", "finite-data corona");
    add_common(corona_cmd, o_corona);
    corona_cmd->add_flag("--max-delta", corona_max_delta, "also compute the largest feasible delta");
    auto* fuzz_cmd = app.add_subcommand("fuzz-vn", "von Neumann inequality fuzzing");
    add_common(fuzz_cmd, o_fuzz, false);
    fuzz_cmd->add_option("--functions", fuzz_functions, "number of random transfer functions");
    fuzz_cmd->add_option("--tuples", fuzz_tuples, "number of random tuples");
    fuzz_cmd->add_option("--dim", fuzz_dim, "tuple dimension");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("check-point")) return run_check_point(o_point);
        if (app.got_subcommand("check-kernel")) return run_check_kernel(o_kernel);
        if (app.got_subcommand("interpolate")) return run_interpolate(o_interp);
        if (app.got_subcommand("rho")) return run_rho(o_rho);
        if (app.got_subcommand("corona")) return run_corona(o_corona, corona_max_delta);
        if (app.got_subcommand("fuzz-vn"))
            return run_fuzz_vn(o_fuzz, fuzz_functions, fuzz_tuples, fuzz_dim);
    } catch (const Error& e) {
        Json err{{"schema", kSchema}, {"error", e.what()}};
        std::cerr << err.dump(2) << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
