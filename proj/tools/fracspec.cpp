// fracspec: batch driver for the nonlocal Neumann spectrum of the disk.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fracspec/solver.hpp"

namespace {

using namespace fracspec;
using nlohmann::json;

struct Flags {
    double s = 0.5;
    std::vector<double> s_list;
    int lmax = 2;
    int n = 32;
    int next = 24;
    double rinf = 0.0;
    double grading = 2.0;
    double tol = 1e-6;
    unsigned seed = 20240611;
    int count = 3;
    int angles = 32;
    std::string out;
    std::string format = "csv";
    // extend
    int l = 1;
    std::string profile = "r";
    // local
    int local_count = 8;
    int dim = 2;
    double radius = 1.0;
    // bbm-check
    std::string function = "x1";
};

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

SolverConfig config_from(const Flags& f) {
    SolverConfig c;
    c.n_int = f.n;
    c.n_ext = f.next;
    c.r_inf = f.rinf;
    c.grading = f.grading;
    c.tail_tol = f.tol;
    c.lmax = f.lmax;
    c.count = f.count;
    c.n_angles = f.angles;
    return c;
}

void emit(const Flags& f, const std::string& text) {
    if (f.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream o(f.out, std::ios::binary);
    if (!o) throw ConstructionError("cannot open output file " + f.out);
    o << text;
}

std::string cmd_eig(const Flags& f) {
    const FracOrder s(f.s);
    const SolverConfig c = config_from(f);
    const DiskSpectrum d = solve_disk(s, c);
    std::mt19937_64 rng(f.seed);
    std::normal_distribution<double> g;
    struct Row { int l, k; double mu; int mult; double res, weak; };
    std::vector<Row> rows;
    for (const auto& m : d.modes) {
        std::vector<Eigen::VectorXd> tests;
        const Eigen::MatrixXd Q = admissible_basis(m.problem);
        for (int t = 0; t < 20; ++t) {
            Eigen::VectorXd y(Q.cols());
            for (int i = 0; i < y.size(); ++i) y(i) = g(rng);
            tests.push_back(Q * y);
        }
        const int mult = harmonic_multiplicity(m.mode, Dimension(2));
        if (m.zero_mode) {
            rows.push_back({0, 0, m.zero_mode->mu, 1, pencil_residual(*m.zero_mode, m.problem),
                            weak_residual(*m.zero_mode, m.problem, tests)});
        }
        for (std::size_t k = 0; k < m.pairs.size(); ++k) {
            rows.push_back({m.mode, static_cast<int>(k) + 1, m.pairs[k].mu, mult, m.residuals[k],
                            weak_residual(m.pairs[k], m.problem, tests)});
        }
    }
    if (f.format == "json") {
        json j;
        j["s"] = f.s;
        j["grid"] = {{"n_int", c.n_int}, {"n_ext", c.n_ext}, {"r_inf", d.grid.R_inf}, {"grading", c.grading}};
        j["rows"] = json::array();
        for (const auto& r : rows)
            j["rows"].push_back({{"l", r.l}, {"k", r.k}, {"mu", r.mu}, {"multiplicity", r.mult},
                                 {"residual", r.res}, {"weak_residual", r.weak}});
        return j.dump(2) + "\n";
    }
    std::string out = "s,l,k,mu,multiplicity,residual,weak_residual\n";
    for (const auto& r : rows)
        out += num(f.s) + "," + std::to_string(r.l) + "," + std::to_string(r.k) + "," + num(r.mu) + "," +
               std::to_string(r.mult) + "," + num(r.res) + "," + num(r.weak) + "\n";
    return out;
}

std::string cmd_sweep(const Flags& f) {
    const std::vector<double> sl = f.s_list.empty() ? std::vector<double>{f.s} : f.s_list;
    const SweepResult res = run_sweep(sl, config_from(f), worker_count());
    if (f.format == "json") {
        json j;
        j["rows"] = json::array();
        for (const auto& r : res.rows)
            j["rows"].push_back({{"s", r.s}, {"l", r.l}, {"k", r.k}, {"mu", r.mu}, {"mu_local", r.mu_local},
                                 {"rel_gap", r.rel_gap}, {"n_int", r.n_int}, {"n_ext", r.n_ext},
                                 {"r_inf", r.r_inf}, {"grading", r.grading}});
        j["limit"] = json::array();
        for (const auto& e : res.limit)
            j["limit"].push_back({{"l", e.l}, {"k", e.k}, {"mu", e.mu}, {"multiplicity", e.multiplicity}});
        return j.dump(2) + "\n";
    }
    std::string out = "s,l,k,mu,mu_local,rel_gap,n_int,n_ext,r_inf,grading\n";
    for (const auto& r : res.rows)
        out += num(r.s) + "," + std::to_string(r.l) + "," + std::to_string(r.k) + "," + num(r.mu) + "," +
               num(r.mu_local) + "," + num(r.rel_gap) + "," + std::to_string(r.n_int) + "," +
               std::to_string(r.n_ext) + "," + num(r.r_inf) + "," + num(r.grading) + "\n";
    return out;
}

std::string cmd_local(const Flags& f) {
    const LocalSpectrum sp = local_spectrum(Dimension(f.dim), f.radius, f.local_count);
    if (f.format == "json") {
        json j;
        j["N"] = sp.N;
        j["R"] = sp.R;
        j["dirichlet_first"] = sp.dirichlet_first;
        j["neumann"] = json::array();
        for (const auto& e : sp.neumann_values)
            j["neumann"].push_back({{"l", e.l}, {"k", e.k}, {"root", e.root}, {"mu", e.mu}, {"multiplicity", e.multiplicity}});
        return j.dump(2) + "\n";
    }
    std::string out = "kind,l,k,root,mu,multiplicity\n";
    for (const auto& e : sp.neumann_values)
        out += "neumann," + std::to_string(e.l) + "," + std::to_string(e.k) + "," + num(e.root) + "," + num(e.mu) +
               "," + std::to_string(e.multiplicity) + "\n";
    out += "dirichlet,0,1," + num(std::sqrt(sp.dirichlet_first) * sp.R) + "," + num(sp.dirichlet_first) + ",1\n";
    return out;
}

std::string cmd_extend(const Flags& f) {
    const FracOrder s(f.s);
    const SolverConfig c = config_from(f);
    const RadialGrid grid = make_grid(c, s);
    const RadialHatBasis basis(grid);
    std::function<double(double)> prof;
    if (f.profile == "one") prof = [](double) { return 1.0; };
    else if (f.profile == "r") prof = [](double r) { return r; };
    else if (f.profile == "r2") prof = [](double r) { return r * r; };
    else throw ConstructionError("unknown profile '" + f.profile + "' (expected one, r or r2)");
    if (f.l < 0) throw ConstructionError("mode must be nonnegative");
    const auto coef = basis.interpolate(prof);
    const ModeExtension ext(basis, s, f.l);
    std::vector<std::pair<double, double>> pts;
    for (double r : grid.exterior_nodes) pts.emplace_back(r, ext.value(f.l, coef, r));
    if (f.format == "json") {
        json j;
        j["s"] = f.s;
        j["l"] = f.l;
        j["profile"] = f.profile;
        j["points"] = json::array();
        for (const auto& [r, v] : pts) j["points"].push_back({{"r", r}, {"value", v}});
        return j.dump(2) + "\n";
    }
    std::string out = "r,value\n";
    for (const auto& [r, v] : pts) out += num(r) + "," + num(v) + "\n";
    return out;
}

std::string cmd_symmetry(const Flags& f) {
    const FracOrder s(f.s);
    SolverConfig c = config_from(f);
    c.lmax = std::max(c.lmax, 2);
    const DiskSpectrum d = solve_disk(s, c);
    const PolarGrid pg(d.grid, c.n_angles);
    const auto members = first_multiplet(d, pg);
    const SymmetryReport rep = classify_eigenspace(members, s);
    json j = rep.to_json();
    j["branch_mode"] = first_nontrivial(d).second;
    return j.dump(2) + "\n";
}

std::string cmd_bbm(const Flags& f) {
    const std::vector<double> sl = f.s_list.empty() ? std::vector<double>{f.s} : f.s_list;
    const auto rows = bbm_check(sl, f.function, config_from(f), worker_count());
    std::vector<double> ss, vs;
    for (const auto& r : rows) {
        ss.push_back(r.s);
        vs.push_back(r.lhs);
    }
    const double target = rows.front().target;
    const double lim = rows.size() >= 2 ? extrapolate_to_one(ss, vs) : rows.back().lhs;
    const double lim_err = target > 0.0 ? std::abs(lim - target) / target : std::abs(lim);
    if (f.format == "json") {
        json j;
        j["function"] = f.function;
        j["rows"] = json::array();
        for (const auto& r : rows)
            j["rows"].push_back({{"s", r.s}, {"lhs", r.lhs}, {"target", r.target}, {"rel_err", r.rel_err}});
        j["extrapolated"] = {{"lhs", lim}, {"target", target}, {"rel_err", lim_err}};
        return j.dump(2) + "\n";
    }
    std::string out = "kind,s,lhs,target,rel_err\n";
    for (const auto& r : rows) out += "point," + num(r.s) + "," + num(r.lhs) + "," + num(r.target) + "," + num(r.rel_err) + "\n";
    out += "extrapolated,1," + num(lim) + "," + num(target) + "," + num(lim_err) + "\n";
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectra of the fractional Laplacian with nonlocal Neumann conditions on the disk"};
    app.require_subcommand(1);
    Flags f;
    auto grid_flags = [&](CLI::App* sc) {
        sc->add_option("--s", f.s, "fractional order in (0,1)");
        sc->add_option("--lmax", f.lmax, "highest angular mode")->check(CLI::Range(0, 32));
        sc->add_option("--n", f.n, "interior radial cells")->check(CLI::Range(4, 4096));
        sc->add_option("--next", f.next, "exterior radial cells")->check(CLI::Range(4, 4096));
        sc->add_option("--rinf", f.rinf, "exterior truncation radius (0: from --tol)");
        sc->add_option("--grading", f.grading, "interior grading exponent >= 1");
        sc->add_option("--tol", f.tol, "relative tail tolerance for the truncation radius");
        sc->add_option("--count", f.count, "eigenvalues per mode")->check(CLI::PositiveNumber);
        sc->add_option("--angles", f.angles, "angles of the polar grid");
        sc->add_option("--seed", f.seed, "seed for random test vectors");
        sc->add_option("--out", f.out, "output path (default stdout)");
        sc->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    };
    auto* eig = app.add_subcommand("eig", "eigenvalues per mode with residuals");
    auto* sweep = app.add_subcommand("sweep", "eigenvalues over a list of s with gaps to the local limit");
    auto* local = app.add_subcommand("local", "local Neumann spectrum of the ball from Bessel roots");
    auto* extend = app.add_subcommand("extend", "minimal extension of a radial mode profile");
    auto* symmetry = app.add_subcommand("symmetry", "classify the first nontrivial eigenspace");
    auto* bbm = app.add_subcommand("bbm-check", "(1-s) [u~]^2 against the gradient limit");
    for (auto* sc : {eig, sweep, extend, symmetry, bbm}) grid_flags(sc);
    for (auto* sc : {sweep, bbm}) sc->add_option("--s-list", f.s_list, "comma-separated orders")->delimiter(',');
    local->add_option("--count", f.local_count, "number of Neumann levels including mu_0")->check(CLI::Range(2, 1000));
    local->add_option("--dim", f.dim, "space dimension N")->check(CLI::Range(2, 64));
    local->add_option("--radius", f.radius, "ball radius");
    local->add_option("--out", f.out, "output path (default stdout)");
    local->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    extend->add_option("--l", f.l, "angular mode");
    extend->add_option("--profile", f.profile, "radial profile: one, r or r2");
    bbm->add_option("--function", f.function, "test function: x1 or const")->check(CLI::IsMember({"x1", "const"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    try {
        std::string text;
        if (*eig) text = cmd_eig(f);
        else if (*sweep) text = cmd_sweep(f);
        else if (*local) text = cmd_local(f);
        else if (*extend) text = cmd_extend(f);
        else if (*symmetry) text = cmd_symmetry(f);
        else text = cmd_bbm(f);
        emit(f, text);
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ConstructionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
