#ifndef SJJ_METROLOGY_HPP
#define SJJ_METROLOGY_HPP

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "model.hpp"
#include "quadrature.hpp"
#include "steady.hpp"
#include "util.hpp"

namespace sjj {

// ---------------------------------------------------------------------------
// Macroscopic qubit built from two non-orthogonal N-particle halves whose
// mutual overlap is eta. All algebra stays in the 2-dimensional orthonormal
// basis those coefficients define; nothing N-body is ever materialized.

inline std::array<double, 2> qubit_coefficients(double eta) {
    if (!(eta >= 0.0) || eta >= 1.0)
        throw std::domain_error("qubit coefficients need 0 <= eta < 1; eta = 1 means "
                                "indistinguishable halves (coefficients diverge)");
    const double s = std::sqrt(1.0 - eta * eta);
    const double c1 = std::sqrt((1.0 + s) / (2.0 * (1.0 - eta * eta)));
    const double c2 = std::sqrt((1.0 - s) / (2.0 * (1.0 - eta * eta)));
    return {c1, c2};
}

inline std::array<double, 3> sigma_expectations(double phi_n) {
    return {0.0, std::cos(phi_n), std::sin(phi_n)};
}

using Mat2 = std::array<std::array<double, 2>, 2>;

inline std::array<double, 2> symmetric_eigenvalues(const Mat2& m) {
    const double mid = 0.5 * (m[0][0] + m[1][1]);
    const double rad = std::hypot(0.5 * (m[0][0] - m[1][1]), m[0][1]);
    return {mid - rad, mid + rad};
}

// Three-outcome discrimination POVM in the orthonormal qubit basis. E3 is
// literally I - E1 - E2, element by element, so completeness holds to the
// last bit no matter how the constants round.
inline std::array<Mat2, 3> povm_elements(double eta) {
    if (!(eta >= 0.0) || eta >= 1.0)
        throw std::domain_error("POVM construction needs 0 <= eta < 1");
    const double r2 = std::sqrt(2.0);
    const double e1 = r2 / (1.0 + r2);
    const double kap = 1.0 / (r2 + 2.0);
    Mat2 E1{{{0.0, 0.0}, {0.0, e1}}};
    Mat2 E2{{{kap, -kap}, {-kap, kap}}};
    Mat2 E3;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            E3[i][j] = (i == j ? 1.0 : 0.0) - E1[i][j] - E2[i][j];
    return {E1, E2, E3};
}

// Error-propagation sensitivity for the collective phase: the variance
// sin^2(N Gamma) and the slope N sin(N Gamma) cancel, leaving exactly 1/N at
// every phase. Heisenberg scaling by construction.
inline double phase_sensitivity(int n_particles, double /*gamma*/ = 0.0) {
    if (n_particles < 1) throw std::domain_error("need at least one particle");
    return 1.0 / static_cast<double>(n_particles);
}

// ---------------------------------------------------------------------------
// Soliton-pair overlap.

// Closed-form single-particle overlap of the two steady-state configurations
// (z_plus and z_minus), one quotient per soliton. The 0.21 curvature factor
// is a fitted correction; for a symmetric pair the expression collapses to
// (1 - z0^2)(1 - 0.21 z0^2).
inline double overlap_epsilon(double z_plus, double z_minus) {
    if (std::fabs(z_plus) > 1.0 || std::fabs(z_minus) > 1.0)
        throw std::domain_error("population imbalance outside [-1,1]");
    const double sum = z_plus + z_minus, dif = z_plus - z_minus;
    const double rm = dif / (2.0 - sum);
    const double rp = dif / (2.0 + sum);
    const double tm = (1.0 - z_plus) * (1.0 - z_minus) * (1.0 - 0.21 * rm * rm) /
                      (1.0 - 0.5 * sum);
    const double tp = (1.0 + z_plus) * (1.0 + z_minus) * (1.0 - 0.21 * rp * rp) /
                      (1.0 + 0.5 * sum);
    return 0.5 * (tm + tp);
}

// The same overlap from the normalized sech profiles themselves. Each state
// puts its solitons at the same centers -+delta, so the offset drops out of
// both integrals after shifting; only the width pair (a, b) matters.
inline double overlap_epsilon_exact(double z_plus, double z_minus, double /*delta*/,
                                    const ModelParams& /*params*/ = {},
                                    double quad_tol = 1e-10) {
    if (std::fabs(z_plus) > 1.0 || std::fabs(z_minus) > 1.0)
        throw std::domain_error("population imbalance outside [-1,1]");
    double total = 0.0;
    for (double s : {+1.0, -1.0}) {
        const double a = 1.0 - s * z_plus, b = 1.0 - s * z_minus;
        if (a + b < 1e-9) continue;  // both halves empty on this side
        const double cutoff = 40.0 / (a + b);
        auto f = [a, b](double y) { return sech(a * y) * sech(b * y); };
        QuadResult q = integrate_adaptive(f, 0.0, cutoff, 0.25 * quad_tol);
        total += 0.25 * a * b * 2.0 * q.value;
    }
    return total;
}

// ---------------------------------------------------------------------------
// N00N-limit interferometry.

inline double noon_window() { return 2.0 * (pi - 1.0); }

inline double noon_theta_prime(double omega_ratio) {
    if (std::fabs(omega_ratio) > noon_window())
        throw std::domain_error("rotation rate outside the window where both "
                                "maximal-imbalance states exist");
    return 0.5 * (std::acos((2.0 - omega_ratio) / (2.0 * pi)) +
                  std::acos((2.0 + omega_ratio) / (2.0 * pi)));
}

// Frequency sensitivity by error propagation through the interference
// fringe. Singular at zero rotation, where the fringe phase is stationary.
inline double omega_sensitivity(int n_particles, double omega_ratio,
                                double lambda_scale) {
    if (n_particles < 1) throw std::domain_error("need at least one particle");
    if (omega_ratio == 0.0)
        throw std::domain_error("frequency sensitivity is singular at zero rotation "
                                "rate: the fringe phase is stationary there");
    if (std::fabs(omega_ratio) > noon_window())
        throw std::domain_error("rotation rate outside the two-state window");
    const double ap = 4.0 * pi * pi - (2.0 + omega_ratio) * (2.0 + omega_ratio);
    const double am = 4.0 * pi * pi - (2.0 - omega_ratio) * (2.0 - omega_ratio);
    const double A = std::sqrt(ap), B = std::sqrt(am);
    return 2.0 * lambda_scale / static_cast<double>(n_particles) *
           std::fabs(A * B / (A - B));
}

// Near-border approximation of the sensitivity: expanding the fringe phase
// at the edge of the existence window d = 2(pi-1) - omega_ratio gives
// sigma ~ (2 Lambda / N) B sqrt(d) / (B/(2 sqrt(pi)) - sqrt(d)) with
// B = 4 sqrt(pi-1); the constants below are that pair rounded to 5.85 and
// 1.65. Valid for 0 < omega_ratio < 2(pi-1), intended for the last ~0.3.
inline double omega_sensitivity_border_fit(int n_particles, double omega_ratio,
                                           double lambda_scale) {
    if (n_particles < 1) throw std::domain_error("need at least one particle");
    const double d = noon_window() - omega_ratio;
    if (!(omega_ratio > 0.0) || d < 0.0)
        throw std::domain_error("border fit needs 0 < omega_ratio <= 2(pi-1)");
    const double sd = std::sqrt(d);
    return 2.0 * lambda_scale / static_cast<double>(n_particles) * 5.85 * sd /
           (1.65 - sd);
}

struct MetrologyReport {
    double theta_prime = 0.0;
    double sigma_mean = 0.0;
    double sigma_var = 0.0;
    double sensitivity = std::numeric_limits<double>::quiet_NaN();
    bool domain_ok = false;
};

inline MetrologyReport noon_interference(int n_particles, double omega_ratio,
                                         double lambda_scale = 1.0) {
    if (n_particles < 1) throw std::domain_error("need at least one particle");
    MetrologyReport rep;
    rep.theta_prime = noon_theta_prime(omega_ratio);
    const double phi = static_cast<double>(n_particles) * rep.theta_prime;
    rep.sigma_mean = std::cos(phi);
    rep.sigma_var = std::sin(phi) * std::sin(phi);
    if (omega_ratio != 0.0) {
        rep.sensitivity = omega_sensitivity(n_particles, omega_ratio, lambda_scale);
        rep.domain_ok = true;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Cat-state assembly from the fixed-phase steady-state pair.

enum class PairSource { exact_roots, branch_fit };

inline const char* to_string(PairSource s) {
    return s == PairSource::exact_roots ? "exact_roots" : "branch_fit";
}

struct CatPair {
    double z_plus = 0.0;
    double z_minus = 0.0;
    double epsilon = 0.0;
    double eta = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    int n_particles = 0;
    PairSource pair_source = PairSource::exact_roots;
    bool eta_underflow = false;
};

inline CatPair build_cat_report(const ModelParams& p,
                                FunctionalMode mode = FunctionalMode::auto_dispatch,
                                double quad_tol = 1e-10) {
    const double dc = delta_c_zero_branch();
    CatPair cat;
    cat.n_particles = p.n_particles;

    if (p.delta_sep < dc)
        throw std::domain_error("no steady-state pair: only the central root exists "
                                "below the critical separation");
    if (p.delta_sep == dc && p.omega_ratio == 0.0)
        throw std::domain_error("degenerate pair at the critical separation: the "
                                "states are indistinguishable (eta = 1)");

    // In polynomial mode the pair search pins the sextic family: the
    // critical-separation gate above comes from that family, and mixing fits
    // would open a sliver just past critical where the gate passes but the
    // dispatched quartic has no outer roots yet.
    const bool poly = mode == FunctionalMode::polynomial ||
                      (mode == FunctionalMode::auto_dispatch && p.delta_sep <= 1.5);
    const PolyFamily family = poly ? PolyFamily::sextic : PolyFamily::dispatch;

    if (p.omega_ratio == 0.0) {
        auto roots = branch_roots(p, ThetaBranch::zero, mode, quad_tol, family);
        if (roots.size() < 3)
            throw std::domain_error("no steady-state pair: the outer branch roots "
                                    "were not found at this separation");
        cat.z_plus = roots.back().z_star;
        cat.z_minus = roots.front().z_star;
        cat.pair_source = PairSource::exact_roots;
    } else {
        const double dm = p.delta_sep - dc;
        bool use_fit = dm <= 0.15;
        if (!use_fit) {
            auto roots = branch_roots(p, ThetaBranch::zero, mode, quad_tol, family);
            if (roots.size() >= 3) {
                cat.z_plus = roots.back().z_star;
                cat.z_minus = roots.front().z_star;
                cat.pair_source = PairSource::exact_roots;
            } else {
                use_fit = true;  // rotation removed a root; fall back to the fit
            }
        }
        if (use_fit) {
            auto osc = linear_bifurcation(p);
            cat.z_plus = osc[0].offset;
            cat.z_minus = osc[1].offset;
            cat.pair_source = PairSource::branch_fit;
        }
    }

    cat.epsilon = overlap_epsilon(cat.z_plus, cat.z_minus);
    if (cat.epsilon <= 0.0) {
        cat.eta = 0.0;
    } else {
        // Log-space power keeps eta meaningful for thousands of particles.
        const double log_eta =
            static_cast<double>(p.n_particles) * std::log(cat.epsilon);
        if (log_eta < std::log(1e-300)) {
            cat.eta = 0.0;
            cat.eta_underflow = true;
        } else {
            cat.eta = std::exp(log_eta);
        }
    }
    auto c = qubit_coefficients(cat.eta);
    cat.c1 = c[0];
    cat.c2 = c[1];
    return cat;
}

}  // namespace sjj

#endif
