#ifndef SJJ_STEADY_HPP
#define SJJ_STEADY_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "approx.hpp"
#include "dynamics.hpp"
#include "functionals.hpp"
#include "model.hpp"
#include "util.hpp"

namespace sjj {

enum class Stability { center, saddle, degenerate };

inline const char* to_string(Stability s) {
    switch (s) {
        case Stability::center: return "center";
        case Stability::saddle: return "saddle";
        default: return "degenerate";
    }
}

enum class BranchId { central, z_plus, z_minus, noon_plus, noon_minus };

inline const char* to_string(BranchId b) {
    switch (b) {
        case BranchId::central: return "central";
        case BranchId::z_plus: return "z_plus";
        case BranchId::z_minus: return "z_minus";
        case BranchId::noon_plus: return "noon_plus";
        default: return "noon_minus";
    }
}

struct SteadyState {
    double z_star = 0.0;
    double theta_star = 0.0;
    Stability stability = Stability::center;
    BranchId branch = BranchId::central;
    double residual = 0.0;  // max-norm of the RHS at the reported point
};

struct BifurcationResult {
    bool found = false;
    double delta_c = 0.0;
    // (delta, z_plus, z_minus) samples on the outer branches
    std::vector<std::array<double, 3>> branch_pts;
};

// On a fixed-phase branch Theta in {0, pi} the steady-state condition reads
// omega_ratio = S(z). The quadrature form evaluates the functionals directly;
// the polynomial form lives in approx.hpp. `family` only matters for the
// polynomial path, where bifurcation tracing pins one fit family so the root
// structure is not disturbed by the fit seam at separation 0.6.
inline double stationarity(ThetaBranch branch, double z, double delta,
                           FunctionalMode mode = FunctionalMode::auto_dispatch,
                           double quad_tol = 1e-10,
                           PolyFamily family = PolyFamily::dispatch,
                           const FunctionalTable* table = nullptr) {
    const bool poly = !table && (mode == FunctionalMode::polynomial ||
                                 (mode == FunctionalMode::auto_dispatch && delta <= 1.5));
    if (poly && family == PolyFamily::dispatch)
        return stationarity_poly(branch, z, delta);
    if (poly) return stationarity_poly(branch, z, delta, family);

    FunctionalValues fv = table ? table->eval(z)
                                : eval_all(z, delta, quad_tol, FunctionalMode::quadrature);
    const double om = 1.0 - z * z;
    const double jsign = branch == ThetaBranch::zero ? 1.0 : -1.0;
    return 2.0 * z - 6.0 * z * om * fv.i_val + 1.5 * om * om * fv.di_dz +
           jsign * (-2.0 * z * fv.j_val + om * fv.dj_dz);
}

inline Stability classify_stability(const ModelParams& p, PhaseState ss,
                                    FunctionalMode mode = FunctionalMode::auto_dispatch,
                                    double quad_tol = 1e-10,
                                    const FunctionalTable* table = nullptr) {
    const double h = 1e-6;
    auto f = [&](double z, double th) {
        return rhs(p, PhaseState{z, th}, mode, quad_tol, table);
    };
    Derivs fzp = f(ss.z + h, ss.theta), fzm = f(ss.z - h, ss.theta);
    Derivs ftp = f(ss.z, ss.theta + h), ftm = f(ss.z, ss.theta - h);
    const double j00 = (fzp.dz - fzm.dz) / (2.0 * h);
    const double j01 = (ftp.dz - ftm.dz) / (2.0 * h);
    const double j10 = (fzp.dtheta - fzm.dtheta) / (2.0 * h);
    const double j11 = (ftp.dtheta - ftm.dtheta) / (2.0 * h);
    const double det = j00 * j11 - j01 * j10;
    // Hamiltonian flow: trace vanishes, eigenvalues are +-sqrt(-det).
    if (std::fabs(det) < 1e-14) return Stability::degenerate;
    return det > 0.0 ? Stability::center : Stability::saddle;
}

// Maximal equal-population states: z^2 = 1 with the phase fixed by the
// rotation rate. Everything is closed-form here, including stability: the
// Jacobian at |z| = 1 is triangular with eigenvalues -+2 pi z sin(Theta*).
inline std::vector<SteadyState> noon_steady(const ModelParams& p) {
    std::vector<SteadyState> out;
    for (double z : {+1.0, -1.0}) {
        const double c = (2.0 - z * p.omega_ratio) / (2.0 * pi);
        if (std::fabs(c) > 1.0) continue;
        SteadyState ss;
        ss.z_star = z;
        ss.theta_star = std::acos(c);
        ss.branch = z > 0.0 ? BranchId::noon_plus : BranchId::noon_minus;
        const double lam = 2.0 * pi * std::sin(ss.theta_star);
        ss.stability = lam < 1e-7 ? Stability::degenerate : Stability::saddle;
        ss.residual = 0.0;
        out.push_back(ss);
    }
    return out;
}

namespace steady_detail {

// Sign-change bracketing on a fixed grid, bisection to 1e-10. Bisection over
// Newton: the curves flatten near the bifurcation and Newton overshoots.
template <class F>
std::vector<double> grid_roots(const F& g, double step = 1e-3) {
    std::vector<double> roots;
    const double zmax = 1.0 - step;
    const int n = static_cast<int>(std::lround(2.0 * zmax / step));
    double zprev = -zmax, gprev = g(zprev);
    for (int i = 1; i <= n; ++i) {
        const double z = -zmax + step * static_cast<double>(i);
        const double gz = g(z);
        if (gprev == 0.0) {
            roots.push_back(zprev);
        } else if (gz != 0.0 && std::signbit(gz) != std::signbit(gprev)) {
            double lo = zprev, hi = z, glo = gprev;
            while (hi - lo > 1e-10) {
                const double mid = 0.5 * (lo + hi), gm = g(mid);
                if (gm == 0.0) { lo = hi = mid; break; }
                if (std::signbit(gm) == std::signbit(glo)) {
                    lo = mid; glo = gm;
                } else {
                    hi = mid;
                }
            }
            roots.push_back(0.5 * (lo + hi));
        }
        zprev = z;
        gprev = gz;
    }
    if (gprev == 0.0) roots.push_back(zprev);
    return roots;
}

inline BranchId branch_of(double z, std::size_t idx, std::size_t count) {
    if (count == 3) return idx == 0 ? BranchId::z_minus
                                    : (idx == 1 ? BranchId::central : BranchId::z_plus);
    if (count == 1) return BranchId::central;
    if (z < -1e-6) return BranchId::z_minus;
    if (z > 1e-6) return BranchId::z_plus;
    return BranchId::central;
}

}  // namespace steady_detail

inline std::vector<SteadyState> branch_roots(const ModelParams& p, ThetaBranch branch,
                                             FunctionalMode mode = FunctionalMode::auto_dispatch,
                                             double quad_tol = 1e-10,
                                             PolyFamily family = PolyFamily::dispatch) {
    const double delta = p.delta_sep;
    const bool poly = mode == FunctionalMode::polynomial ||
                      (mode == FunctionalMode::auto_dispatch && delta <= 1.5);

    std::vector<double> roots;
    if (poly) {
        auto g = [&](double z) {
            return stationarity_poly(branch, z, delta, family) - p.omega_ratio;
        };
        roots = steady_detail::grid_roots(g);
    } else {
        // Scan on an interpolation table, then polish each bracket against
        // the directly computed integrals so residuals are quadrature-grade.
        FunctionalTable table(delta, 4001, quad_tol);
        auto gt = [&](double z) {
            return stationarity(branch, z, delta, FunctionalMode::quadrature, quad_tol,
                                PolyFamily::dispatch, &table) -
                   p.omega_ratio;
        };
        auto gq = [&](double z) {
            return stationarity(branch, z, delta, FunctionalMode::quadrature, quad_tol) -
                   p.omega_ratio;
        };
        for (double r : steady_detail::grid_roots(gt)) {
            double lo = std::max(-1.0, r - 2e-3), hi = std::min(1.0, r + 2e-3);
            double glo = gq(lo), ghi = gq(hi);
            if (glo == 0.0) { roots.push_back(lo); continue; }
            if (ghi == 0.0) { roots.push_back(hi); continue; }
            if (std::signbit(glo) == std::signbit(ghi)) {
                roots.push_back(r);  // table and direct agree to ~1e-10 anyway
                continue;
            }
            while (hi - lo > 1e-10) {
                const double mid = 0.5 * (lo + hi), gm = gq(mid);
                if (gm == 0.0) { lo = hi = mid; break; }
                if (std::signbit(gm) == std::signbit(glo)) {
                    lo = mid; glo = gm;
                } else {
                    hi = mid;
                }
            }
            roots.push_back(0.5 * (lo + hi));
        }
    }

    std::sort(roots.begin(), roots.end());
    const double theta = branch == ThetaBranch::zero ? 0.0 : pi;
    const FunctionalMode eff_mode = poly ? FunctionalMode::polynomial
                                         : FunctionalMode::quadrature;
    std::vector<SteadyState> out;
    out.reserve(roots.size());
    for (std::size_t i = 0; i < roots.size(); ++i) {
        SteadyState ss;
        ss.z_star = roots[i];
        ss.theta_star = theta;
        ss.branch = steady_detail::branch_of(roots[i], i, roots.size());
        if (poly && family != PolyFamily::dispatch) {
            // Keep residual and stability consistent with the pinned family
            // instead of whatever fit the dispatch rule would pick here.
            ss.residual = std::fabs(stationarity_poly(branch, ss.z_star, delta, family) -
                                    p.omega_ratio);
            const double h = 1e-6;
            const double sp = (stationarity_poly(branch, ss.z_star + h, delta, family) -
                               stationarity_poly(branch, ss.z_star - h, delta, family)) /
                              (2.0 * h);
            const double om = 1.0 - ss.z_star * ss.z_star;
            const double iv = family == PolyFamily::sextic
                                  ? poly_detail::sextic_I(delta).eval(ss.z_star)
                                  : poly_detail::quartic_I(delta).eval(ss.z_star);
            const double jv = family == PolyFamily::sextic
                                  ? poly_detail::sextic_J(delta).eval(ss.z_star)
                                  : poly_detail::quartic_J(delta).eval(ss.z_star);
            const double jsign = branch == ThetaBranch::zero ? 1.0 : -1.0;
            const double dzdt_dtheta = om * (2.0 * om * iv + jsign * jv);
            const double det = -dzdt_dtheta * sp;
            ss.stability = std::fabs(det) < 1e-14
                               ? Stability::degenerate
                               : (det > 0.0 ? Stability::center : Stability::saddle);
        } else {
            Derivs d = rhs(p, PhaseState{ss.z_star, theta}, eff_mode, quad_tol);
            ss.residual = std::max(std::fabs(d.dz), std::fabs(d.dtheta));
            ss.stability = classify_stability(p, PhaseState{ss.z_star, theta}, eff_mode,
                                              quad_tol);
        }
        out.push_back(ss);
    }
    return out;
}

// Traces the outer branches of the fixed-phase steady states over a
// separation window and locates where the central root loses its
// neighbors' company, i.e. where the count switches 1 <-> 3.
inline BifurcationResult trace_bifurcation(const ModelParams& p,
                                           std::pair<double, double> delta_range,
                                           int n_steps,
                                           ThetaBranch branch = ThetaBranch::zero,
                                           FunctionalMode mode = FunctionalMode::auto_dispatch,
                                           double quad_tol = 1e-10) {
    if (!(delta_range.second > delta_range.first) || n_steps < 2)
        throw std::invalid_argument("bifurcation trace needs an increasing range and "
                                    "at least 2 steps");
    // The sextic family covers the whole window around the critical
    // separation; holding it fixed keeps root counts continuous across 0.6.
    const bool poly = mode == FunctionalMode::polynomial ||
                      (mode == FunctionalMode::auto_dispatch &&
                       delta_range.second <= 1.5);
    const PolyFamily family = poly ? PolyFamily::sextic : PolyFamily::dispatch;
    const FunctionalMode eff = poly ? FunctionalMode::polynomial : FunctionalMode::quadrature;

    auto count_at = [&](double delta) {
        ModelParams q = p;
        q.delta_sep = delta;
        return branch_roots(q, branch, eff, quad_tol, family).size();
    };

    BifurcationResult res;
    double prev_delta = delta_range.first;
    std::size_t prev_count = count_at(prev_delta);
    std::optional<std::pair<double, double>> bracket;
    for (int i = 0; i <= n_steps; ++i) {
        const double delta = delta_range.first +
                             (delta_range.second - delta_range.first) *
                                 static_cast<double>(i) / static_cast<double>(n_steps);
        ModelParams q = p;
        q.delta_sep = delta;
        auto roots = branch_roots(q, branch, eff, quad_tol, family);
        if (roots.size() >= 3)
            res.branch_pts.push_back({delta, roots.back().z_star, roots.front().z_star});
        if (!bracket && roots.size() != prev_count)
            bracket = std::make_pair(prev_delta, delta);
        prev_delta = delta;
        prev_count = roots.size();
    }
    if (!bracket) return res;  // count never changed: no bifurcation in range

    auto [lo, hi] = *bracket;
    const std::size_t lo_count = count_at(lo);
    while (hi - lo > 1e-4) {
        const double mid = 0.5 * (lo + hi);
        (count_at(mid) == lo_count ? lo : hi) = mid;
    }
    res.found = true;
    res.delta_c = 0.5 * (lo + hi);
    return res;
}

}  // namespace sjj

#endif
