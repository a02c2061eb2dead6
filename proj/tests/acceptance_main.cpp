// Release gate for the library and the CLI. Each check prints exactly one
// PASS/FAIL line with the measured numbers; the process exits nonzero when
// any check fails. The first argument names the CLI binary, which the last
// two checks drive as a subprocess.

#include <sjj/sjj.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#ifndef _WIN32
#include <sys/wait.h>
#endif

namespace fs = std::filesystem;
using namespace sjj;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

void report(int idx, bool ok, const std::string& detail) {
    if (!ok) ++failures;
    std::printf("%s  check %2d  %s\n", ok ? "PASS" : "FAIL", idx, detail.c_str());
    std::fflush(stdout);
}

template <typename F>
void guarded(int idx, F&& f) {
    try {
        f();
    } catch (const std::exception& e) {
        report(idx, false, std::string("unexpected exception: ") + e.what());
    }
}

int run_command(const std::string& cmd) {
    const int raw = std::system(cmd.c_str());
#ifdef _WIN32
    return raw;
#else
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
#endif
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// 1. The coupling integrals collapse to I = 1 and J = pi when one soliton
//    holds the whole population, for any separation.
void c01_functional_limits() {
    const auto t0 = Clock::now();
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> sep(0.0, 5.0);
    double worst_i = 0.0, worst_j = 0.0;
    for (int k = 0; k < 20; ++k) {
        const double d = sep(rng);
        for (double z : {1.0, -1.0}) {
            worst_i = std::max(worst_i, std::fabs(eval_I(z, d) - 1.0));
            worst_j = std::max(worst_j, std::fabs(eval_J(z, d) - pi));
        }
    }
    const double dt = seconds_since(t0);
    report(1, worst_i <= 1e-6 && worst_j <= 1e-6 && dt < 5.0,
           "one-sided limits over 20 random separations: max |I-1| = " + fmt(worst_i) +
               ", max |J-pi| = " + fmt(worst_j) + " (" + fmt(dt) + " s, limit 5)");
}

// 2. Polynomial fits stay within 5% relative sup-norm of the quadrature
//    functionals on the default 41x31 grid.
void c02_certification() {
    const auto t0 = Clock::now();
    const CertReport rep = certify(default_delta_grid(), default_z_grid(), 0.05);
    const double dt = seconds_since(t0);
    report(2, rep.pass && rep.max_rel_err <= 0.05 && dt < 60.0,
           "fit certification on the 41x31 grid: max relative error = " +
               fmt(rep.max_rel_err) + ", worst at (z = " + fmt(rep.worst_z) +
               ", sep = " + fmt(rep.worst_delta) + ", " + rep.worst_functional + ") (" +
               fmt(dt) + " s, limit 60)");
}

// 3. Zero-branch pitchfork: critical separation near 0.5867 and the fork
//    amplitude just past it grows like 1.2 sqrt(sep - critical).
void c03_bifurcation() {
    const ModelParams p = derive_params(1.0, 100, 0.0, 0.0);
    const BifurcationResult bif = trace_bifurcation(p, {0.4, 0.8}, 40);
    ModelParams q = p;
    q.delta_sep = bif.delta_c + 0.04;
    const auto roots =
        branch_roots(q, ThetaBranch::zero, FunctionalMode::polynomial, 1e-10,
                     PolyFamily::sextic);
    const double z0 = roots.size() >= 3 ? roots.back().z_star : 0.0;
    const double target = 1.2 * std::sqrt(0.04);
    report(3,
           bif.found && std::fabs(bif.delta_c - 0.5867) <= 0.005 && roots.size() >= 3 &&
               std::fabs(z0 - target) <= 0.10 * target,
           "critical separation = " + fmt(bif.delta_c) + " vs 0.5867 +- 0.005, fork z0 = " +
               fmt(z0) + " vs " + fmt(target) + " +- 10%");
}

// 4. Opposite-phase branch at zero separation: a symmetric pair of centers
//    with z^2 near 0.17 around a central saddle.
void c04_pi_roots() {
    const ModelParams p = derive_params(1.0, 100, 0.0, 0.0);
    const auto roots = branch_roots(p, ThetaBranch::pi);
    bool ok = roots.size() == 3;
    double zsq = 0.0;
    if (ok) {
        const auto& lo = roots.front();
        const auto& mid = roots[1];
        const auto& hi = roots.back();
        zsq = hi.z_star * hi.z_star;
        ok = std::fabs(zsq - 0.17) <= 0.015 && std::fabs(lo.z_star + hi.z_star) <= 1e-8 &&
             lo.stability == Stability::center && hi.stability == Stability::center &&
             std::fabs(mid.z_star) <= 1e-8 && mid.stability == Stability::saddle;
    }
    report(4, ok,
           "opposite-phase roots at zero separation: " + std::to_string(roots.size()) +
               " roots, outer z^2 = " + fmt(zsq) + " vs 0.17 +- 0.015, outer centers, "
               "central saddle");
}

// 5. Measured zero-crossing frequencies of small oscillations at zero
//    separation: about 8.15 around the in-phase point, 1.42 around the
//    opposite-phase centers.
void c05_frequencies() {
    const ModelParams p = derive_params(1.0, 100, 0.0, 0.0);

    auto t0 = Clock::now();
    const double w_zero = measured_frequency(integrate(p, {0.05, 0.0}, 20.0));
    const double dt_zero = seconds_since(t0);

    t0 = Clock::now();
    const auto roots = branch_roots(p, ThetaBranch::pi);
    const double w_pi =
        measured_frequency(integrate(p, {roots.back().z_star + 0.05, pi}, 140.0));
    const double dt_pi = seconds_since(t0);

    report(5,
           std::fabs(w_zero - 8.15) <= 0.05 * 8.15 && dt_zero < 10.0 &&
               std::fabs(w_pi - 1.42) <= 0.05 * 1.42 && dt_pi < 10.0,
           "small-oscillation frequencies: in-phase " + fmt(w_zero) + " vs 8.15 +- 5% (" +
               fmt(dt_zero) + " s), opposite-phase " + fmt(w_pi) + " vs 1.42 +- 5% (" +
               fmt(dt_pi) + " s, limit 10 each)");
}

// 6. Energy drift stays below 1e-8 across 50 random trajectories run to
//    tau = 200 at default tolerances.
void c06_energy_drift() {
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> dz(-0.95, 0.95), dth(-pi, pi), dsep(0.0, 1.5),
        dom(0.0, 2.0);
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
        const double z0 = dz(rng), th0 = dth(rng), d = dsep(rng), om = dom(rng);
        const Trajectory tr = integrate(derive_params(1.0, 100, om, d), {z0, th0}, 200.0);
        worst = std::max(worst, tr.energy_drift);
    }
    report(6, worst <= 1e-8,
           "max energy drift over 50 random runs to tau = 200: " + fmt(worst) +
               " (limit 1e-8)");
}

// 7. Regime spot checks: self-trapping and oscillation on the opposite-phase
//    side at zero separation, running phase with frozen imbalance at
//    separation 10.
void c07_regimes() {
    const ModelParams near = derive_params(1.0, 100, 0.0, 0.0);
    const RegimeLabel trapped = classify(integrate(near, {0.3, pi}, 120.0));
    const RegimeLabel swinging = classify(integrate(near, {0.6, pi}, 120.0));

    // The far-separation bound below is not attainable: the strongest
    // coupling term at z = 0.5, separation 10 is J = 2.2e-4, which drives a
    // real z excursion of 2.5e-4 from this start (1.65e-4 from the most
    // favorable phase). The check reports the measured value and fails.
    const ModelParams far = derive_params(1.0, 100, 0.0, 10.0);
    const FunctionalTable table(far.delta_sep);
    IntegrateOptions opts;
    opts.mode = FunctionalMode::quadrature;
    opts.table = &table;
    const Trajectory run = integrate(far, {0.5, 1.0}, 40.0, opts);
    const RegimeLabel running = classify(run);
    double dz_max = 0.0;
    for (const auto& s : run.states) dz_max = std::max(dz_max, std::fabs(s.z - 0.5));

    report(7,
           trapped.label == Regime::mqst && swinging.label == Regime::oscillation &&
               running.label == Regime::running_phase && dz_max <= 1e-4,
           std::string("regimes: (z0 = 0.3, pi) -> ") + to_string(trapped.label) +
               ", (z0 = 0.6, pi) -> " + to_string(swinging.label) +
               ", (sep 10, z0 = 0.5) -> " + to_string(running.label) +
               " with max |z - z0| = " + fmt(dz_max) + " (limit 1e-4)");
}

// 8. Far-separated zero-branch pair sits at z = +-0.96 within 0.01.
void c08_far_roots() {
    const ModelParams p = derive_params(1.0, 100, 0.0, 10.0);
    const auto roots = branch_roots(p, ThetaBranch::zero, FunctionalMode::quadrature);
    double zp = 0.0, zm = 0.0;
    bool ok = roots.size() == 3;
    if (ok) {
        zp = roots.back().z_star;
        zm = roots.front().z_star;
        ok = std::fabs(zp - 0.96) <= 0.01 && std::fabs(zm + 0.96) <= 0.01;
    }
    report(8, ok,
           "zero-branch pair at separation 10: z = " + fmt(zm) + ", " + fmt(zp) +
               " vs +-0.96 +- 0.01");
}

// 9. Cat pipeline in polynomial mode at rotation 0.05 pi: the separation
//    where the half overlap reaches 0.9056 lands near 0.647 and yields the
//    quoted qubit coefficients for 10 particles.
void c09_cat_pipeline() {
    const double om = 0.05 * pi;
    auto overlap_at = [&](double d) {
        return build_cat_report(derive_params(1.0, 10, om, d), FunctionalMode::polynomial)
            .epsilon;
    };
    // The overlap falls monotonically across this span (about 0.99 -> 0.81),
    // so bisection on overlap - 0.9056 is safe.
    double lo = delta_c_zero_branch() + 0.005, hi = delta_c_zero_branch() + 0.15;
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        (overlap_at(mid) > 0.9056 ? lo : hi) = mid;
    }
    const double d_star = 0.5 * (lo + hi);
    const CatPair cat =
        build_cat_report(derive_params(1.0, 10, om, d_star), FunctionalMode::polynomial);
    auto within2 = [](double v, double ref) { return std::fabs(v - ref) <= 0.02 * ref; };
    report(9,
           within2(d_star, 0.647) && within2(cat.epsilon, 0.9056) &&
               within2(cat.c1, 1.057) && within2(cat.c2, 0.203),
           "cat pipeline: separation " + fmt(d_star) + " vs 0.647, overlap " +
               fmt(cat.epsilon) + " vs 0.9056, c1 = " + fmt(cat.c1) + " vs 1.057, c2 = " +
               fmt(cat.c2) + " vs 0.203 (2% each)");
}

// 10. Qubit basis stays orthonormal (Gram identities) and the three-outcome
//     POVM is complete to the last bit and positive semidefinite.
void c10_qubit_povm() {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> de(0.0, 0.99);
    double worst_gram = 0.0, min_eig = 0.0;
    bool exact_sum = true;
    for (int k = 0; k < 50; ++k) {
        const double eta = de(rng);
        const auto c = qubit_coefficients(eta);
        const double c1 = c[0], c2 = c[1];
        worst_gram =
            std::max(worst_gram, std::fabs(c1 * c1 + c2 * c2 - 2.0 * c1 * c2 * eta - 1.0));
        worst_gram = std::max(worst_gram, std::fabs((c1 * c1 + c2 * c2) * eta - 2.0 * c1 * c2));
        const auto povm = povm_elements(eta);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                const double s = povm[0][i][j] + povm[1][i][j] + povm[2][i][j];
                if (s != (i == j ? 1.0 : 0.0)) exact_sum = false;
            }
        for (const auto& e : povm) min_eig = std::min(min_eig, symmetric_eigenvalues(e)[0]);
    }
    report(10, worst_gram <= 1e-10 && exact_sum && min_eig >= -1e-12,
           "Gram defect over 50 random overlaps = " + fmt(worst_gram) +
               " (limit 1e-10), POVM sum exactly identity = " +
               (exact_sum ? "yes" : "no") + ", min eigenvalue = " + fmt(min_eig) +
               " (limit -1e-12)");
}

// 11. Heisenberg scaling: collective-phase sensitivity is exactly 1/N, the
//     frequency sensitivity falls as 1/N on a log-log slope, and the border
//     approximation tracks the closed form within 15% near the window edge.
void c11_heisenberg() {
    bool exact = true;
    for (int n : {1, 2, 10, 100, 12345})
        if (phase_sensitivity(n) != 1.0 / static_cast<double>(n)) exact = false;

    const double s_lo = omega_sensitivity(10, 4.0, 1.0);
    const double s_hi = omega_sensitivity(1000, 4.0, 1.0);
    const double slope = (std::log(s_hi) - std::log(s_lo)) / std::log(100.0);

    double worst = 0.0;
    for (double w = 4.0; w < 4.28 + 1e-12; w += 0.01) {
        const double closed = omega_sensitivity(100, w, 1.0);
        const double approx = omega_sensitivity_border_fit(100, w, 1.0);
        worst = std::max(worst, std::fabs(approx - closed) / closed);
    }
    report(11, exact && std::fabs(slope + 1.0) <= 1e-9 && worst <= 0.15,
           "phase sensitivity exactly 1/N = " + std::string(exact ? "yes" : "no") +
               ", frequency-sensitivity slope = " + fmt(slope) +
               " vs -1 +- 1e-9, border fit max deviation = " + fmt(worst) +
               " (limit 15%)");
}

// 12. The CLI surfaces the documented singularity of the frequency
//     sensitivity at zero rotation rate and exits with code 1.
void c12_cli_singular(const std::string& cli, const fs::path& scratch) {
    const fs::path err_file = scratch / "noon_stderr.txt";
    const std::string cmd = "\"" + cli + "\" metrology noon --n 100 --omega-ratio 0" +
                            " --output-dir \"" + (scratch / "noon").string() + "\" 2> \"" +
                            err_file.string() + "\"";
    const int code = run_command(cmd);
    const bool mentions = slurp(err_file).find("singular") != std::string::npos;
    report(12, code == 1 && mentions,
           "CLI at zero rotation rate: exit code " + std::to_string(code) +
               " (want 1), stderr names the singularity = " + (mentions ? "yes" : "no"));
}

// 13. Reproducing the same canned figure twice yields byte-identical CSV.
void c13_determinism(const std::string& cli, const fs::path& scratch) {
    const fs::path dir = scratch / "fig4b";
    const std::string cmd = "\"" + cli + "\" reproduce fig4b --output-dir \"" +
                            dir.string() + "\" > \"" + (scratch / "fig4b_stdout.txt").string() +
                            "\" 2>&1";
    auto snapshot = [&] {
        std::map<std::string, std::string> bytes;
        if (fs::exists(dir))
            for (const auto& e : fs::recursive_directory_iterator(dir))
                if (e.is_regular_file() && e.path().extension() == ".csv")
                    bytes[e.path().string()] = slurp(e.path());
        return bytes;
    };
    const int r1 = run_command(cmd);
    const auto first = snapshot();
    const int r2 = run_command(cmd);
    const auto second = snapshot();
    const bool identical = !first.empty() && first == second;
    report(13, r1 == 0 && r2 == 0 && identical,
           "reproduce fig4b twice: exit codes " + std::to_string(r1) + "/" +
               std::to_string(r2) + ", " + std::to_string(first.size()) +
               " CSV file(s), byte-identical = " + (identical ? "yes" : "no"));
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: " << (argc ? argv[0] : "acceptance") << " <cli-binary>\n";
        return 2;
    }
    verify_canonical_signs();

    const std::string cli = argv[1];
    const fs::path scratch = fs::temp_directory_path() / "sjj_acceptance";
    std::error_code ec;
    fs::remove_all(scratch, ec);
    fs::create_directories(scratch);

    guarded(1, c01_functional_limits);
    guarded(2, c02_certification);
    guarded(3, c03_bifurcation);
    guarded(4, c04_pi_roots);
    guarded(5, c05_frequencies);
    guarded(6, c06_energy_drift);
    guarded(7, c07_regimes);
    guarded(8, c08_far_roots);
    guarded(9, c09_cat_pipeline);
    guarded(10, c10_qubit_povm);
    guarded(11, c11_heisenberg);
    guarded(12, [&] { c12_cli_singular(cli, scratch); });
    guarded(13, [&] { c13_determinism(cli, scratch); });

    std::printf("%d of 13 checks passed\n", 13 - failures);
    return failures == 0 ? 0 : 1;
}
