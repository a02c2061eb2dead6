// Command-line front end for the two-soliton junction library: functional
// tables, steady states, bifurcation traces, trajectory simulation, phase
// portraits, interferometry reports, and canned figure bundles. Artifacts are
// CSV (canonical), JSON (reports), and SVG (convenience); every invocation
// drops a <name>_run.json sidecar echoing the effective configuration.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include <sjj/sjj.hpp>

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Cli {
    std::string output_dir = ".";
    std::string mode_name = "auto";
    bool exact = false;
    double quad_tol = 1e-10;
    double rtol = 1e-12;
    double atol = 1e-14;
    long long seed = 0;

    double u = 1.0;
    int n_particles = 100;
    double omega_ratio = 0.0;
    double delta = 0.0;

    sjj::FunctionalMode mode() const {
        if (exact) return sjj::FunctionalMode::quadrature;
        if (mode_name == "polynomial" || mode_name == "poly")
            return sjj::FunctionalMode::polynomial;
        if (mode_name == "quadrature" || mode_name == "quad")
            return sjj::FunctionalMode::quadrature;
        return sjj::FunctionalMode::auto_dispatch;
    }

    sjj::ModelParams params() const {
        return sjj::derive_params(u, n_particles, omega_ratio, delta);
    }

    sjj::IntegrateOptions integrate_options() const {
        sjj::IntegrateOptions o;
        o.rtol = rtol;
        o.atol = atol;
        o.mode = mode();
        o.quad_tol = quad_tol;
        return o;
    }

    fs::path out(const std::string& name) const { return fs::path(output_dir) / name; }
};

json params_json(const sjj::ModelParams& p) {
    return {{"u", p.u},
            {"n_particles", p.n_particles},
            {"lambda_scale", p.lambda_scale},
            {"omega_ratio", p.omega_ratio},
            {"delta_sep", p.delta_sep}};
}

void write_run_sidecar(const Cli& cli, const std::string& base,
                       const std::vector<std::string>& outputs, json results) {
    json j;
    j["subcommand"] = base;
    j["params"] = params_json(cli.params());
    j["mode"] = sjj::to_string(cli.mode());
    j["tolerances"] = {{"rtol", cli.rtol}, {"atol", cli.atol}, {"quad_tol", cli.quad_tol}};
    j["seed"] = cli.seed;
    j["outputs"] = outputs;
    if (!results.is_null()) j["results"] = std::move(results);
    sjj::atomic_write(cli.out(base + "_run.json"), j.dump(2) + "\n");
}

void announce(const fs::path& p) { std::cout << "wrote " << p.string() << "\n"; }

// ---------------------------------------------------------------------------

int cmd_functionals(const Cli& cli, std::vector<double> zs, std::vector<double> ds) {
    if (zs.empty())
        for (int i = 0; i <= 40; ++i) zs.push_back(-1.0 + 0.05 * i);
    if (ds.empty()) ds.push_back(cli.delta);

    sjj::CsvTable t;
    t.header = {"z", "delta", "mode", "i_val", "j_val", "di_dz", "dj_dz"};
    for (double d : ds)
        for (double z : zs) {
            auto fv = sjj::eval_all(z, d, cli.quad_tol, cli.mode());
            t.add_row(z, d, sjj::to_string(fv.mode), fv.i_val, fv.j_val, fv.di_dz,
                      fv.dj_dz);
        }
    sjj::write_csv(cli.out("functionals.csv"), t);
    announce(cli.out("functionals.csv"));
    write_run_sidecar(cli, "functionals", {"functionals.csv"},
                      {{"rows", t.rows.size()}});
    return 0;
}

int cmd_validate_approx(const Cli& cli, double tol_rel) {
    auto rep = sjj::certify(sjj::default_delta_grid(), sjj::default_z_grid(), tol_rel,
                            cli.quad_tol);
    sjj::CsvTable t;
    t.header = {"z", "delta", "functional", "poly", "quad", "rel_err"};
    for (const auto& r : rep.rows) {
        t.add_row(r.z, r.delta, "I", r.i_poly, r.i_quad, r.i_rel_err);
        t.add_row(r.z, r.delta, "J", r.j_poly, r.j_quad, r.j_rel_err);
    }
    sjj::write_csv(cli.out("validate_approx.csv"), t);
    announce(cli.out("validate_approx.csv"));

    json results = {{"pass", rep.pass},
                    {"tol_rel", rep.tol_rel},
                    {"max_rel_err", rep.max_rel_err},
                    {"worst", {{"z", rep.worst_z},
                               {"delta", rep.worst_delta},
                               {"functional", std::string(1, rep.worst_functional)},
                               {"poly", rep.worst_poly},
                               {"quad", rep.worst_quad}}}};
    write_run_sidecar(cli, "validate_approx", {"validate_approx.csv"}, results);
    std::cout << (rep.pass ? "PASS" : "FAIL") << ": max relative error "
              << rep.max_rel_err << " (tolerance " << tol_rel << "), worst at "
              << rep.worst_functional << "(z=" << rep.worst_z
              << ", delta=" << rep.worst_delta << ")\n";
    return rep.pass ? 0 : 1;
}

void add_steady_rows(sjj::CsvTable& t, const sjj::ModelParams& p,
                     const std::vector<sjj::SteadyState>& states) {
    for (const auto& s : states)
        t.add_row(p.delta_sep, p.omega_ratio, sjj::to_string(s.branch), s.z_star,
                  s.theta_star, sjj::to_string(s.stability), s.residual);
}

int cmd_steady_states(const Cli& cli, const std::string& branch) {
    const auto p = cli.params();
    sjj::CsvTable t;
    t.header = {"delta", "omega_ratio", "branch", "z_star", "theta_star",
                "stability", "residual"};
    if (branch == "zero" || branch == "all")
        add_steady_rows(t, p, sjj::branch_roots(p, sjj::ThetaBranch::zero, cli.mode(),
                                                cli.quad_tol));
    if (branch == "pi" || branch == "all")
        add_steady_rows(t, p, sjj::branch_roots(p, sjj::ThetaBranch::pi, cli.mode(),
                                                cli.quad_tol));
    if (branch == "noon" || branch == "all") add_steady_rows(t, p, sjj::noon_steady(p));
    sjj::write_csv(cli.out("steady_states.csv"), t);
    announce(cli.out("steady_states.csv"));
    write_run_sidecar(cli, "steady_states", {"steady_states.csv"},
                      {{"branch", branch}, {"count", t.rows.size()}});
    return 0;
}

int cmd_bifurcation(const Cli& cli, double dmin, double dmax, int steps) {
    auto p = cli.params();
    auto res = sjj::trace_bifurcation(p, {dmin, dmax}, steps, sjj::ThetaBranch::zero,
                                      cli.mode(), cli.quad_tol);

    const bool poly = cli.mode() != sjj::FunctionalMode::quadrature && dmax <= 1.5;
    const auto family = poly ? sjj::PolyFamily::sextic : sjj::PolyFamily::dispatch;
    const auto eff = poly ? sjj::FunctionalMode::polynomial
                          : sjj::FunctionalMode::quadrature;
    sjj::CsvTable t;
    t.header = {"delta", "omega_ratio", "branch", "z_star", "theta_star",
                "stability", "residual"};
    for (int i = 0; i <= steps; ++i) {
        sjj::ModelParams q = p;
        q.delta_sep = dmin + (dmax - dmin) * double(i) / double(steps);
        add_steady_rows(t, q,
                        sjj::branch_roots(q, sjj::ThetaBranch::zero, eff, cli.quad_tol,
                                          family));
    }
    sjj::write_csv(cli.out("bifurcation.csv"), t);
    announce(cli.out("bifurcation.csv"));

    json results;
    results["bifurcation_found"] = res.found;
    if (res.found) results["delta_c"] = res.delta_c;
    write_run_sidecar(cli, "bifurcation", {"bifurcation.csv"}, results);
    if (res.found)
        std::cout << "critical separation delta_c = " << res.delta_c << "\n";
    else
        std::cout << "no bifurcation in [" << dmin << ", " << dmax << "]\n";
    return 0;
}

int cmd_simulate(const Cli& cli, double z0, double theta0, double t_final,
                 std::size_t samples) {
    if (std::fabs(z0) > 1.0) throw std::domain_error("z0 out of [-1,1]");
    auto opts = cli.integrate_options();
    opts.n_samples = samples;
    auto traj = sjj::integrate(cli.params(), {z0, theta0}, t_final, opts);

    sjj::CsvTable t;
    t.header = {"tau", "z", "theta", "energy"};
    for (std::size_t i = 0; i < traj.t_grid.size(); ++i)
        t.add_row(traj.t_grid[i], traj.states[i].z, traj.states[i].theta,
                  traj.energies[i]);
    sjj::write_csv(cli.out("simulate.csv"), t);
    announce(cli.out("simulate.csv"));
    write_run_sidecar(cli, "simulate", {"simulate.csv"},
                      {{"z0", z0},
                       {"theta0", theta0},
                       {"t_final", t_final},
                       {"energy_drift", traj.energy_drift},
                       {"complete", traj.complete}});
    if (!traj.complete) {
        std::cerr << "warning: " << traj.note << "\n";
        return 2;
    }
    return 0;
}

// Shared by the phase-portrait subcommand and the portrait figure bundles.
struct PortraitArtifacts {
    sjj::CsvTable csv;
    sjj::SvgPlot svg;
    std::size_t failures = 0;
};

PortraitArtifacts render_portrait(const std::vector<sjj::PortraitCell>& cells,
                                  const std::string& title) {
    PortraitArtifacts art;
    art.csv.header = {"z0", "theta0", "label", "z_mean", "winding"};
    art.svg.title = title;
    art.svg.xlabel = "theta";
    art.svg.ylabel = "z";

    for (const auto& c : cells) {
        double z_mean = 0.0, winding = 0.0;
        if (!c.traj.states.empty()) {
            for (const auto& s : c.traj.states) z_mean += s.z;
            z_mean /= double(c.traj.states.size());
            winding = (c.traj.states.back().theta - c.traj.states.front().theta) /
                      (2.0 * sjj::pi);
        }
        art.csv.add_row(c.initial.z, c.initial.theta,
                        c.failed ? "unclassified" : sjj::to_string(c.label.label),
                        z_mean, winding);
        if (c.failed) ++art.failures;

        if (c.traj.states.empty()) continue;
        std::string color = "#808080", dash = "2,3";
        if (!c.failed) {
            switch (c.label.label) {
                case sjj::Regime::oscillation: color = "#1f6fb2"; dash.clear(); break;
                case sjj::Regime::mqst: color = "#c0392b"; dash = "8,5"; break;
                case sjj::Regime::running_phase: color = "#1e8449"; dash = "10,4,2,4"; break;
            }
        }
        // Plot against the wrapped phase; split the polyline at wrap jumps.
        const std::size_t stride = std::max<std::size_t>(1, c.traj.states.size() / 500);
        sjj::SvgSeries cur;
        cur.color = color;
        cur.dash = dash;
        double prev = 0.0;
        bool have_prev = false;
        for (std::size_t i = 0; i < c.traj.states.size(); i += stride) {
            const double th = sjj::canonical_angle(c.traj.states[i].theta);
            if (have_prev && std::fabs(th - prev) > sjj::pi) {
                art.svg.series.push_back(std::move(cur));
                cur = sjj::SvgSeries{};
                cur.color = color;
                cur.dash = dash;
            }
            cur.pts.emplace_back(th, c.traj.states[i].z);
            prev = th;
            have_prev = true;
        }
        if (!cur.pts.empty()) art.svg.series.push_back(std::move(cur));
    }
    return art;
}

std::vector<double> default_portrait_z() {
    return {-0.8, -0.65, -0.5, -0.35, -0.2, -0.08, 0.08, 0.2, 0.35, 0.5, 0.65, 0.8};
}
std::vector<double> default_portrait_theta() {
    std::vector<double> th;
    for (int k = -4; k < 4; ++k) th.push_back(double(k) * sjj::pi / 4.0);
    return th;
}

int cmd_phase_portrait(const Cli& cli, std::vector<double> z0s,
                       std::vector<double> th0s, double t_final, bool svg) {
    if (z0s.empty()) z0s = default_portrait_z();
    if (th0s.empty()) th0s = default_portrait_theta();
    const auto p = cli.params();
    auto cells = sjj::phase_portrait(p, z0s, th0s, t_final, cli.integrate_options());

    char title[128];
    std::snprintf(title, sizeof title, "phase portrait  delta=%g  omega_ratio=%g",
                  p.delta_sep, p.omega_ratio);
    auto art = render_portrait(cells, title);
    sjj::write_csv(cli.out("phase_portrait.csv"), art.csv);
    announce(cli.out("phase_portrait.csv"));
    std::vector<std::string> outputs{"phase_portrait.csv"};
    if (svg) {
        sjj::write_svg(cli.out("phase_portrait.svg"), art.svg);
        announce(cli.out("phase_portrait.svg"));
        outputs.push_back("phase_portrait.svg");
    }
    write_run_sidecar(cli, "phase_portrait", outputs,
                      {{"cells", cells.size()},
                       {"unclassified", art.failures},
                       {"t_final", t_final}});
    return 0;
}

int cmd_metrology_noon(const Cli& cli, int n, double omega_ratio) {
    const auto p = cli.params();
    auto rep = sjj::noon_interference(n, omega_ratio, p.lambda_scale);
    // The sensitivity at zero rotation is singular; surface the documented
    // error instead of a NaN-bearing report.
    if (!rep.domain_ok) sjj::omega_sensitivity(n, omega_ratio, p.lambda_scale);

    json j;
    j["theta_prime"] = rep.theta_prime;
    j["sigma_mean"] = rep.sigma_mean;
    j["sigma_var"] = rep.sigma_var;
    j["sensitivity"] = rep.sensitivity;
    j["domain_ok"] = rep.domain_ok;
    j["provenance"] = {{"n_particles", n},
                       {"omega_ratio", omega_ratio},
                       {"lambda_scale", p.lambda_scale},
                       {"mode", sjj::to_string(cli.mode())},
                       {"quad_tol", cli.quad_tol}};
    sjj::atomic_write(cli.out("metrology_noon.json"), j.dump(2) + "\n");
    announce(cli.out("metrology_noon.json"));
    write_run_sidecar(cli, "metrology_noon", {"metrology_noon.json"},
                      {{"sensitivity", rep.sensitivity}});
    return 0;
}

int cmd_metrology_cat(const Cli& cli, int n, double delta, double omega_ratio) {
    auto p = sjj::derive_params(cli.u, n, omega_ratio, delta);
    auto cat = sjj::build_cat_report(p, cli.mode(), cli.quad_tol);

    json j;
    j["z_plus"] = cat.z_plus;
    j["z_minus"] = cat.z_minus;
    j["epsilon"] = cat.epsilon;
    j["eta"] = cat.eta;
    j["eta_underflow"] = cat.eta_underflow;
    j["c1"] = cat.c1;
    j["c2"] = cat.c2;
    j["n_particles"] = cat.n_particles;
    j["pair_source"] = sjj::to_string(cat.pair_source);
    j["provenance"] = {{"delta", delta},
                       {"omega_ratio", omega_ratio},
                       {"mode", sjj::to_string(cli.mode())},
                       {"quad_tol", cli.quad_tol}};
    sjj::atomic_write(cli.out("metrology_cat.json"), j.dump(2) + "\n");
    announce(cli.out("metrology_cat.json"));
    write_run_sidecar(cli, "metrology_cat", {"metrology_cat.json"},
                      {{"epsilon", cat.epsilon}, {"eta", cat.eta}});
    return 0;
}

// ---------------------------------------------------------------------------
// Canned figure bundles.

int fig_steady_curves(const Cli& cli, const std::string& id) {
    sjj::CsvTable t;
    t.header = {"z", "branch", "omega_ratio", "stability"};
    sjj::SvgPlot plot;
    plot.title = "steady-state curves at delta = 0";
    plot.xlabel = "z";
    plot.ylabel = "omega_ratio";
    for (auto branch : {sjj::ThetaBranch::zero, sjj::ThetaBranch::pi}) {
        const bool zero = branch == sjj::ThetaBranch::zero;
        sjj::SvgSeries s;
        s.color = zero ? "#1f6fb2" : "#c0392b";
        if (!zero) s.dash = "8,5";
        for (int i = -199; i <= 199; ++i) {
            const double z = 0.005 * i;
            const double w = sjj::stationarity_poly(branch, z, 0.0);
            auto p = sjj::derive_params(cli.u, cli.n_particles, w, 0.0);
            auto st = sjj::classify_stability(p, {z, zero ? 0.0 : sjj::pi},
                                              sjj::FunctionalMode::polynomial);
            t.add_row(z, zero ? "zero" : "pi", w, sjj::to_string(st));
            s.pts.emplace_back(z, w);
        }
        plot.series.push_back(std::move(s));
    }
    sjj::write_csv(cli.out(id + ".csv"), t);
    sjj::write_svg(cli.out(id + ".svg"), plot);
    return 0;
}

int fig_bifurcation_diagram(const Cli& cli, const std::string& id) {
    sjj::CsvTable t;
    t.header = {"delta", "omega_ratio", "branch", "z_star", "theta_star",
                "stability", "residual"};
    sjj::SvgPlot plot;
    plot.title = "zero-phase branches vs separation";
    plot.xlabel = "delta";
    plot.ylabel = "z";
    const std::vector<std::pair<double, std::string>> drives = {
        {0.0, "#1f6fb2"}, {0.05 * sjj::pi, "#1e8449"}, {2.5, "#c0392b"}};
    for (const auto& [w, color] : drives) {
        std::map<std::string, sjj::SvgSeries> series;
        for (int i = 0; i <= 110; ++i) {
            const double d = 0.4 + 0.01 * i;
            auto p = sjj::derive_params(cli.u, cli.n_particles, w, d);
            auto roots = sjj::branch_roots(p, sjj::ThetaBranch::zero,
                                           sjj::FunctionalMode::polynomial,
                                           cli.quad_tol, sjj::PolyFamily::sextic);
            add_steady_rows(t, p, roots);
            for (const auto& r : roots) {
                auto& s = series[sjj::to_string(r.branch)];
                s.color = color;
                s.pts.emplace_back(d, r.z_star);
            }
        }
        for (auto& kv : series) plot.series.push_back(std::move(kv.second));
    }
    sjj::write_csv(cli.out(id + ".csv"), t);
    sjj::write_svg(cli.out(id + ".svg"), plot);
    return 0;
}

int fig_portrait(const Cli& cli, const std::string& id, double delta,
                 double omega_ratio) {
    auto p = sjj::derive_params(cli.u, cli.n_particles, omega_ratio, delta);
    auto opts = cli.integrate_options();
    auto cells = sjj::phase_portrait(p, default_portrait_z(),
                                     default_portrait_theta(), 120.0, opts);
    char title[128];
    std::snprintf(title, sizeof title, "phase portrait  delta=%g  omega_ratio=%g",
                  delta, omega_ratio);
    auto art = render_portrait(cells, title);
    sjj::write_csv(cli.out(id + ".csv"), art.csv);
    sjj::write_svg(cli.out(id + ".svg"), art.svg);
    return 0;
}

int fig_cat_sweep(const Cli& cli, const std::string& id) {
    sjj::CsvTable t;
    t.header = {"delta", "omega_ratio", "z_plus", "z_minus", "epsilon", "eta",
                "c1", "c2", "pair_source"};
    sjj::SvgPlot plot;
    plot.title = "cat-pair overlap vs separation (N = 10)";
    plot.xlabel = "delta";
    plot.ylabel = "epsilon";
    for (const auto& [w, color] :
         std::vector<std::pair<double, std::string>>{{0.0, "#1f6fb2"},
                                                     {0.05 * sjj::pi, "#1e8449"}}) {
        sjj::SvgSeries s;
        s.color = color;
        for (int i = 0; i <= 91; ++i) {
            const double d = 0.59 + 0.01 * i;
            auto p = sjj::derive_params(cli.u, 10, w, d);
            sjj::CatPair cat;
            try {
                cat = sjj::build_cat_report(p, cli.mode(), cli.quad_tol);
            } catch (const std::domain_error&) {
                continue;  // no pair at this separation for this drive
            }
            t.add_row(d, w, cat.z_plus, cat.z_minus, cat.epsilon, cat.eta, cat.c1,
                      cat.c2, sjj::to_string(cat.pair_source));
            s.pts.emplace_back(d, cat.epsilon);
        }
        plot.series.push_back(std::move(s));
    }
    sjj::write_csv(cli.out(id + ".csv"), t);
    sjj::write_svg(cli.out(id + ".svg"), plot);
    return 0;
}

int fig_interference(const Cli& cli, const std::string& id) {
    sjj::CsvTable t;
    t.header = {"omega_ratio", "theta_prime", "sigma_mean", "sigma_var"};
    sjj::SvgPlot plot;
    plot.title = "interference readout vs rotation rate (N = 200)";
    plot.xlabel = "omega_ratio";
    plot.ylabel = "sigma_mean";
    sjj::SvgSeries s;
    for (int i = -200; i <= 200; ++i) {
        const double w = 0.02 * i;
        auto rep = sjj::noon_interference(200, w);
        t.add_row(w, rep.theta_prime, rep.sigma_mean, rep.sigma_var);
        s.pts.emplace_back(w, rep.sigma_mean);
    }
    plot.series.push_back(std::move(s));
    sjj::write_csv(cli.out(id + ".csv"), t);
    sjj::write_svg(cli.out(id + ".svg"), plot);
    return 0;
}

int cmd_reproduce(const Cli& cli, const std::string& id) {
    const std::map<std::string, std::pair<double, double>> portraits = {
        {"fig4a", {0.0, 0.0}},  {"fig4b", {0.75, 0.0}},        {"fig4c", {1.2, 0.0}},
        {"fig4d", {1.5, 0.0}},  {"fig4e", {3.0, 0.0}},         {"fig4f", {10.0, 0.0}},
        {"fig5a", {0.75, 0.05 * sjj::pi}}, {"fig5b", {0.75, sjj::pi}},
        {"fig5c", {0.75, 1.5 * sjj::pi}}};

    int rc;
    if (id == "fig2") rc = fig_steady_curves(cli, id);
    else if (id == "fig3") rc = fig_bifurcation_diagram(cli, id);
    else if (id == "fig7") rc = fig_cat_sweep(cli, id);
    else if (id == "fig8") rc = fig_interference(cli, id);
    else if (auto it = portraits.find(id); it != portraits.end())
        rc = fig_portrait(cli, id, it->second.first, it->second.second);
    else
        throw std::domain_error("unknown figure id: " + id);

    announce(cli.out(id + ".csv"));
    announce(cli.out(id + ".svg"));
    write_run_sidecar(cli, id, {id + ".csv", id + ".svg"}, {{"figure", id}});
    return rc;
}

}  // namespace

int run(int argc, char** argv) {
    Cli cli;
    CLI::App app{"two-soliton junction model: dynamics, steady states, and "
                 "interferometric estimation"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "INI config file; flags override its values");

    app.add_option("--output-dir", cli.output_dir, "artifact directory")
        ->envname("SJJ_OUTPUT_DIR")
        ->capture_default_str();
    app.add_option("--mode", cli.mode_name, "functional evaluation mode")
        ->check(CLI::IsMember({"auto", "polynomial", "poly", "quadrature", "quad"}))
        ->capture_default_str();
    app.add_flag("--exact", cli.exact, "force quadrature functionals everywhere");
    app.add_option("--quad-tol", cli.quad_tol, "quadrature absolute tolerance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--rtol", cli.rtol, "integrator relative tolerance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--atol", cli.atol, "integrator absolute tolerance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--seed", cli.seed, "seed recorded for randomized sweeps")
        ->capture_default_str();
    app.add_option("--u", cli.u, "nonlinearity strength")->capture_default_str();
    app.add_option("--n", cli.n_particles, "particle count")->capture_default_str();
    app.add_option("--omega-ratio", cli.omega_ratio, "drive Omega/Lambda")
        ->capture_default_str();
    app.add_option("--delta", cli.delta, "inter-soliton separation")
        ->capture_default_str();

    auto* c_fun = app.add_subcommand("functionals", "evaluate coupling functionals");
    std::vector<double> fun_z, fun_d;
    c_fun->add_option("--z", fun_z, "imbalance values (default: 41-point grid)");
    c_fun->add_option("--delta-list", fun_d, "separation values (default: --delta)");

    auto* c_val = app.add_subcommand("validate-approx",
                                     "certify polynomial fits against quadrature");
    double tol_rel = 0.04;
    c_val->add_option("--tol-rel", tol_rel, "relative sup-norm tolerance")
        ->capture_default_str();

    auto* c_ss = app.add_subcommand("steady-states", "find steady states");
    std::string branch = "all";
    c_ss->add_option("--branch", branch, "which branch to solve")
        ->check(CLI::IsMember({"zero", "pi", "noon", "all"}))
        ->capture_default_str();

    auto* c_bif = app.add_subcommand("bifurcation", "trace branches over separation");
    double dmin = 0.4, dmax = 0.8;
    int bif_steps = 40;
    c_bif->add_option("--delta-min", dmin, "")->capture_default_str();
    c_bif->add_option("--delta-max", dmax, "")->capture_default_str();
    c_bif->add_option("--steps", bif_steps, "")->check(CLI::PositiveNumber)
        ->capture_default_str();

    auto* c_sim = app.add_subcommand("simulate", "integrate one trajectory");
    double z0 = 0.0, theta0 = 0.0, t_final = 200.0;
    std::size_t samples = 2001;
    c_sim->add_option("--z0", z0, "initial imbalance")->required();
    c_sim->add_option("--theta0", theta0, "initial phase")->required();
    c_sim->add_option("--t-final", t_final, "")->check(CLI::PositiveNumber)
        ->capture_default_str();
    c_sim->add_option("--samples", samples, "")->check(CLI::Range(std::size_t{2}, std::size_t{2'000'000}))
        ->capture_default_str();

    auto* c_pp = app.add_subcommand("phase-portrait", "labeled trajectories on a grid");
    std::vector<double> pp_z, pp_th;
    double pp_tf = 120.0;
    bool pp_svg = false;
    c_pp->add_option("--z0", pp_z, "initial imbalances (default: canned grid)");
    c_pp->add_option("--theta0", pp_th, "initial phases (default: canned grid)");
    c_pp->add_option("--t-final", pp_tf, "")->check(CLI::PositiveNumber)
        ->capture_default_str();
    c_pp->add_flag("--svg", pp_svg, "also render an SVG");

    auto* c_met = app.add_subcommand("metrology", "interferometric estimation reports");
    c_met->require_subcommand(1);
    auto* c_noon = c_met->add_subcommand("noon", "maximal-imbalance interference");
    int noon_n = 100;
    double noon_w = 0.0;
    c_noon->add_option("--n", noon_n, "particle count")->check(CLI::PositiveNumber)
        ->capture_default_str();
    c_noon->add_option("--omega-ratio", noon_w, "drive Omega/Lambda")
        ->capture_default_str();
    auto* c_cat = c_met->add_subcommand("cat", "steady-state-pair superposition");
    int cat_n = 10;
    double cat_d = 0.7, cat_w = 0.0;
    c_cat->add_option("--n", cat_n, "particle count")->check(CLI::PositiveNumber)
        ->capture_default_str();
    c_cat->add_option("--delta", cat_d, "separation")->capture_default_str();
    c_cat->add_option("--omega-ratio", cat_w, "drive Omega/Lambda")
        ->capture_default_str();

    auto* c_rep = app.add_subcommand("reproduce", "canned figure bundles");
    std::string fig_id;
    c_rep->add_option("figure", fig_id, "fig2, fig3, fig4a..fig4f, fig5a..fig5c, "
                                        "fig7, fig8")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help() << std::flush;
        return 1;
    }

    try {
        sjj::verify_canonical_signs();
        if (*c_fun) return cmd_functionals(cli, fun_z, fun_d);
        if (*c_val) return cmd_validate_approx(cli, tol_rel);
        if (*c_ss) return cmd_steady_states(cli, branch);
        if (*c_bif) return cmd_bifurcation(cli, dmin, dmax, bif_steps);
        if (*c_sim) return cmd_simulate(cli, z0, theta0, t_final, samples);
        if (*c_pp) return cmd_phase_portrait(cli, pp_z, pp_th, pp_tf, pp_svg);
        if (*c_noon) return cmd_metrology_noon(cli, noon_n, noon_w);
        if (*c_cat) return cmd_metrology_cat(cli, cat_n, cat_d, cat_w);
        if (*c_rep) return cmd_reproduce(cli, fig_id);
    } catch (const sjj::ConvergenceError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

int main(int argc, char** argv) { return run(argc, argv); }
