// torsionlab command line: domain solves, kernel probes, verification
// suites and experiments.  Machine output goes to files; stdout is for
// humans; exit codes are the contract (0 ok, 1 failed criterion, 2 bad
// config, 3 solver failure, 4 I/O failure).

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "torsionlab/experiments.hpp"
#include "torsionlab/greens_kernel.hpp"
#include "torsionlab/io.hpp"

using namespace torsionlab;
namespace fs = std::filesystem;

namespace {

struct CommonOpts {
    std::string domain = "rectangle";
    double N = 8;
    std::string h = "1/64";
    std::string out;
    std::string config;
    std::string calibration;
    int threads = 1;
};

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const NumericalError*>(&e)) return 3;
    if (dynamic_cast<const QuadratureError*>(&e)) return 3;
    if (dynamic_cast<const Error*>(&e)) return 2;
    return 2;
}

fs::path resolve_out(const CommonOpts& o) {
    if (!o.out.empty()) return o.out;
    if (const char* env = std::getenv("TORSIONLAB_OUT")) return env;
    return "out";
}

DomainKind parse_kind(const std::string& s) {
    if (s == "rectangle") return DomainKind::Rectangle;
    if (s == "ellipse") return DomainKind::Ellipse;
    if (s == "omega1") return DomainKind::Omega1;
    if (s == "omega2") return DomainKind::Omega2;
    if (s == "piecewise_linear") return DomainKind::PiecewiseLinear;
    throw Error("unknown domain kind: " + s);
}

// flags override config-file values; the merged config is echoed to the
// output directory for reproducibility
ConvexDomain domain_from(const CommonOpts& o, const CLI::App* cmd, nlohmann::json& merged) {
    std::string kind = o.domain;
    double N = o.N;
    bool have_N = cmd->count("--N") > 0;
    std::vector<std::vector<double>> vertices;
    if (!o.config.empty()) {
        std::ifstream in(o.config);
        if (!in) throw Error("cannot open config " + o.config);
        nlohmann::json j;
        in >> j;
        if (j.contains("kind") && cmd->count("--domain") == 0) kind = j["kind"];
        if (j.contains("N") && !have_N) {
            N = j["N"];
            have_N = true;
        }
        if (j.contains("vertices")) vertices = j["vertices"].get<std::vector<std::vector<double>>>();
    }
    if (!have_N && kind != "piecewise_linear")
        throw Error("missing --N (usage: --domain <kind> --N <value>, or supply N in --config)");
    merged["kind"] = kind;
    merged["N"] = N;
    if (parse_kind(kind) == DomainKind::PiecewiseLinear) {
        if (vertices.empty())
            throw Error("piecewise_linear requires \"vertices\" in the config file");
        std::vector<std::pair<double, double>> vv;
        for (auto& v : vertices) {
            if (v.size() != 2) throw Error("vertices must be [x, y] pairs");
            vv.push_back({v[0], v[1]});
        }
        merged["vertices"] = vertices;
        return ConvexDomain::piecewise_linear(vv);
    }
    return make_domain(parse_kind(kind), N);
}

Calibration calibration_from(const CommonOpts& o) {
    if (!o.calibration.empty()) return load_calibration(o.calibration);
    // try the repository copy next to the binary, else the built-in values
    for (const char* p : {"data/calibration.json", "../data/calibration.json"})
        if (fs::exists(p)) return load_calibration(p);
    return default_calibration();
}

void echo_config(const fs::path& dir, const nlohmann::json& merged) {
    atomic_write(dir / "config.json", merged.dump(2) + "\n");
}

std::vector<double> parse_N_list(const std::string& s) {
    std::vector<double> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(std::stod(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(std::stod(cur));
    if (out.empty()) throw Error("empty N list");
    return out;
}

void add_common(CLI::App* cmd, CommonOpts& o, bool with_domain = true) {
    cmd->set_help_flag("--help", "print help");  // frees -h for the spacing flag
    if (with_domain) {
        cmd->add_option("--domain", o.domain, "rectangle|ellipse|omega1|omega2|piecewise_linear");
        cmd->add_option("--N", o.N, "family parameter (diameter scale)");
    }
    cmd->add_option("--h,-h", o.h, "grid spacing, decimal or rational like 1/64");
    cmd->add_option("-o,--out", o.out, "output directory (default $TORSIONLAB_OUT or ./out)");
    cmd->add_option("--config", o.config, "JSON domain config; flags take precedence");
    cmd->add_option("--calibration", o.calibration, "calibration JSON path");
    cmd->add_option("--threads", o.threads, "worker cap for N-list commands");
}

nlohmann::json max_report_json(const MaxReport& m) {
    nlohmann::json j;
    j["x_star"] = m.x_star;
    j["y_star"] = m.y_star;
    j["v_star"] = m.v_star;
    j["hessian"] = {{"xx", m.hessian.xx}, {"xy", m.hessian.xy}, {"yy", m.hessian.yy}};
    j["directional"] = nlohmann::json::array();
    for (const auto& d : m.directional)
        j["directional"].push_back(
            {{"angle", d.angle}, {"second", d.second}, {"half_width", d.half_width}});
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"torsionlab: torsion functions and eigenfunctions of thin convex domains"};
    app.set_help_flag("--help", "print help");
    app.require_subcommand(1);

    CommonOpts o;

    auto* solve = app.add_subcommand("solve", "solve the torsion problem, dump field + maximum");
    add_common(solve, o);
    bool solve_binary = false;
    solve->add_flag("--binary", solve_binary, "also write the raw binary field dump");

    auto* eigen = app.add_subcommand("eigen", "principal Dirichlet eigenpair");
    add_common(eigen, o);

    auto* kernel = app.add_subcommand("kernel", "kernel probes");
    auto* keval = kernel->add_subcommand("eval", "evaluate the warped kernel at a point pair");
    add_common(keval, o);
    double kx = -1, ky = 0.4, kxp = 1, kyp = 0.6, kxt = 0;
    keval->add_option("--x", kx);
    keval->add_option("--y", ky);
    keval->add_option("--xp", kxp);
    keval->add_option("--yp", kyp);
    keval->add_option("--x-tilde", kxt);
    auto* kpois = kernel->add_subcommand("check-poisson", "lattice identity residuals");
    add_common(kpois, o, false);

    auto* verify = app.add_subcommand("verify", "run a verification suite");
    std::string suite = "all";
    verify->add_option("suite", suite, "kernel|approx|hessian|maxima|all")->required();
    std::string nlist_s = "";
    verify->add_option("--N-list", nlist_s, "comma separated N values");
    add_common(verify, o);

    auto* experiment = app.add_subcommand("experiment", "run a named experiment");
    std::string which;
    experiment->add_option("name", which, "cons1|cons2|cons3|sandwich|directional")->required();
    experiment->add_option("--N-list", nlist_s, "comma separated N values");
    double expM = 0;
    experiment->add_option("--M", expM, "flatness window half-width");
    add_common(experiment, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints the message and usage hint
        return 2;
    }

    try {
        const double target_h = parse_rational(o.h);
        fs::path out = resolve_out(o);
        Calibration cal = calibration_from(o);

        if (*solve) {
            nlohmann::json merged;
            ConvexDomain dom = domain_from(o, solve, merged);
            merged["h"] = o.h;
            ScalarField f = solve_torsion(dom, target_h);
            MaxReport m = locate_max(f);
            try {
                echo_config(out, merged);
                write_field_csv(out / "field.csv", f);
                if (solve_binary) write_field_binary(out / "field.bin", f);
                atomic_write(out / "max_report.json", max_report_json(m).dump(2) + "\n");
            } catch (const std::exception& e) {
                std::cerr << "i/o failure: " << e.what() << "\n";
                return 4;
            }
            std::cout << "solved " << merged["kind"].get<std::string>() << " N=" << merged["N"]
                      << "  unknowns=" << f.grid.n_unknowns()
                      << "  cg_iters=" << f.stats.iterations << "\n"
                      << "v* = " << m.v_star << " at (" << m.x_star << ", " << m.y_star << ")\n";
            return 0;
        }

        if (*eigen) {
            nlohmann::json merged;
            ConvexDomain dom = domain_from(o, eigen, merged);
            merged["h"] = o.h;
            auto [u, rep] = solve_ground_state(dom, target_h);
            MaxReport m = locate_max(u);
            LengthScaleReport ls = length_scale(dom);
            nlohmann::json j;
            j["lambda"] = rep.lambda;
            j["x1"] = m.x_star;
            j["y1"] = m.y_star;
            j["lanczos_steps"] = rep.lanczos_steps;
            j["length_scale"] = {{"L", ls.L},
                                 {"I", {ls.I_lo, ls.I_hi}},
                                 {"I_prime", {ls.Ip_lo, ls.Ip_hi}}};
            try {
                echo_config(out, merged);
                write_field_csv(out / "eigenfunction.csv", u);
                atomic_write(out / "eigen_report.json", j.dump(2) + "\n");
            } catch (const std::exception& e) {
                std::cerr << "i/o failure: " << e.what() << "\n";
                return 4;
            }
            std::cout << "lambda = " << rep.lambda << ", max at (" << m.x_star << ", " << m.y_star
                      << ")\n";
            return 0;
        }

        if (*keval) {
            nlohmann::json merged;
            ConvexDomain dom = domain_from(o, keval, merged);
            KernelContext ctx = KernelContext::at(dom, kxt);
            double g = approx_green(dom, ctx, {kx, ky}, {kxp, kyp});
            std::cout << "G(" << kx << "," << ky << "; " << kxp << "," << kyp << ") = " << g
                      << "\n";
            return 0;
        }

        if (*kpois) {
            for (double a : {0.5, 1.0, 5.0}) {
                double closed = std::cosh(a / 2) / std::sinh(a / 2) / (2 * a);
                std::cout << "a=" << a
                          << "  exp-side err=" << std::abs(poisson_rhs(a, 0, 64) - closed)
                          << "  poly-side err=" << std::abs(poisson_lhs(a, 0, 1000000) - closed)
                          << "  (tail bound " << poisson_lhs_tail_bound(1000000) << ")\n";
            }
            return 0;
        }

        if (*verify || *experiment) {
            std::vector<ExperimentReport> reps;
            auto Ns = [&](std::vector<double> dflt) {
                return nlist_s.empty() ? dflt : parse_N_list(nlist_s);
            };
            if (*verify) {
                if (suite == "kernel" || suite == "all") {
                    reps.push_back(exp_kernel_checks(cal));
                    reps.push_back(exp_reconstruction(cal, suite == "all"));
                }
                if (suite == "approx" || suite == "all") {
                    DomainKind fam = verify->count("--domain") ? parse_kind(o.domain)
                                                               : DomainKind::Omega2;
                    reps.push_back(
                        exp_approx_convergence(fam, Ns({16, 32, 64}), cal, target_h, o.threads));
                }
                if (suite == "hessian" || suite == "all")
                    reps.push_back(
                        exp_hessian_scaling(Ns({32, 64, 128}), cal, 1.0 / 128, o.threads));
                if (suite == "maxima" || suite == "all")
                    reps.push_back(
                        exp_maxima_separation(Ns({16, 32, 64}), cal, target_h, o.threads));
                if (reps.empty()) throw Error("unknown suite: " + suite);
            } else {
                if (which == "cons1")
                    reps.push_back(
                        exp_maxima_separation(Ns({16, 32, 64}), cal, target_h, o.threads));
                else if (which == "cons2")
                    reps.push_back(
                        exp_torsion_near_eigenmax(parse_kind(o.domain), o.N, cal, target_h));
                else if (which == "cons3")
                    reps.push_back(
                        exp_hessian_scaling(Ns({32, 64, 128}), cal, 1.0 / 128, o.threads));
                else if (which == "sandwich")
                    reps.push_back(exp_max_value_sandwich(o.N, cal));
                else if (which == "directional")
                    reps.push_back(exp_directional_hessian(
                        o.N, expM > 0 ? expM : cal.directional_M, cal));
                else
                    throw Error("unknown experiment: " + which);
            }
            bool all_pass = true;
            for (const auto& r : reps) {
                try {
                    write_report(r, out);
                } catch (const std::exception& e) {
                    std::cerr << "i/o failure: " << e.what() << "\n";
                    return 4;
                }
                for (const auto& c : r.criteria) {
                    std::cout << (c.pass ? "PASS " : "FAIL ") << r.name << "/" << c.name
                              << "  measured=" << c.measured << " " << c.relation << " "
                              << c.threshold;
                    if (c.relation == "in") std::cout << " .. " << c.threshold2;
                    std::cout << "\n";
                    all_pass = all_pass && c.pass;
                }
            }
            return all_pass ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
    return 2;
}
