#ifndef SJJ_APPROX_HPP
#define SJJ_APPROX_HPP

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "functionals.hpp"
#include "util.hpp"

namespace sjj {

// Published polynomial surrogates for the coupling functionals. Two fitted
// regimes: a quartic in z on 0 <= D < 0.6 and a sextic on 0.6 <= D <= 1.5
// (D = 0.6 itself is assigned to the sextic, the finer fit). Coefficients
// are themselves quadratics in D, stored verbatim from the published tables.

enum class PolyFamily { dispatch, quartic, sextic };

namespace poly_detail {

struct Quartic {  // v = a z^4 + b z^2 + c
    double a, b, c;
    double eval(double z) const {
        const double u = z * z;
        return (a * u + b) * u + c;
    }
    double deriv(double z) const {
        const double u = z * z;
        return (4.0 * a * u + 2.0 * b) * z;
    }
};

struct Sextic {  // v = a z^6 + b z^4 + c z^2 + d
    double a, b, c, d;
    double eval(double z) const {
        const double u = z * z;
        return ((a * u + b) * u + c) * u + d;
    }
    double deriv(double z) const {
        const double u = z * z;
        return ((6.0 * a * u + 4.0 * b) * u + 2.0 * c) * z;
    }
};

inline Quartic quartic_I(double d) {
    return {-d * d - 0.52 * d + 0.1,
            2.0 * d * d + 0.76 * d - 0.42,
            -1.16 * d * d - 0.24 * d + 1.33};
}
inline Quartic quartic_J(double d) {
    return {-2.0 * d * d - 0.72 * d + 0.4,
            3.9 * d * d + 1.03 * d + 0.07,
            -1.9 * d * d - 0.32 * d + 2.7};
}
inline Sextic sextic_I(double d) {
    return {0.31 * d * d - 2.57 * d + 1.43,
            0.9 * d * d + 1.24 * d - 1.6,
            -1.9 * d * d + 3.5 * d - 0.67,
            0.69 * d * d - 2.21 * d + 1.85};
}
inline Sextic sextic_J(double d) {
    return {-1.5 * d * d - 0.13 * d + 0.89,
            4.62 * d * d - 4.78 * d + 0.15,
            -4.0 * d * d + 8.4 * d - 1.45,
            0.94 * d * d - 3.52 * d + 3.56};
}

inline void check_range(double z, double delta) {
    if (std::fabs(z) > 1.0) throw std::domain_error("imbalance z outside [-1,1]");
    if (!(delta >= 0.0) || delta > 1.5)
        throw std::domain_error("no published polynomial fit for delta outside [0, 1.5]");
}

inline bool use_sextic(double delta) { return delta >= 0.6; }

}  // namespace poly_detail

namespace approx_detail {

inline double poly_I(double z, double delta) {
    poly_detail::check_range(z, delta);
    return poly_detail::use_sextic(delta) ? poly_detail::sextic_I(delta).eval(z)
                                          : poly_detail::quartic_I(delta).eval(z);
}
inline double poly_J(double z, double delta) {
    poly_detail::check_range(z, delta);
    return poly_detail::use_sextic(delta) ? poly_detail::sextic_J(delta).eval(z)
                                          : poly_detail::quartic_J(delta).eval(z);
}
inline double poly_I_dz(double z, double delta) {
    poly_detail::check_range(z, delta);
    return poly_detail::use_sextic(delta) ? poly_detail::sextic_I(delta).deriv(z)
                                          : poly_detail::quartic_I(delta).deriv(z);
}
inline double poly_J_dz(double z, double delta) {
    poly_detail::check_range(z, delta);
    return poly_detail::use_sextic(delta) ? poly_detail::sextic_J(delta).deriv(z)
                                          : poly_detail::quartic_J(delta).deriv(z);
}

}  // namespace approx_detail

using approx_detail::poly_I;
using approx_detail::poly_I_dz;
using approx_detail::poly_J;
using approx_detail::poly_J_dz;

// ---------------------------------------------------------------------------
// Certification of the surrogates against quadrature.

struct CertRow {
    double z, delta;
    double i_poly, i_quad, i_rel_err;
    double j_poly, j_quad, j_rel_err;
};

struct CertReport {
    bool pass = false;
    double tol_rel = 0.0;
    double max_rel_err = 0.0;
    // Worst offender across both functionals.
    double worst_z = 0.0, worst_delta = 0.0;
    char worst_functional = 'I';
    double worst_poly = 0.0, worst_quad = 0.0;
    std::vector<CertRow> rows;
};

inline std::vector<double> default_z_grid() {
    std::vector<double> g(41);
    for (int i = 0; i < 41; ++i) g[i] = -1.0 + 0.05 * i;
    return g;
}
inline std::vector<double> default_delta_grid() {
    std::vector<double> g(31);
    for (int i = 0; i < 31; ++i) g[i] = 0.05 * i;
    return g;
}

// Relative sup-norm check: per functional, max |poly - quad| over the grid
// divided by max |quad| over the grid. Pointwise normalization would blow up
// where I itself is small (I(0, 1.5) ~ 0.08) and misrepresent a fit whose
// absolute error is uniform in z.
inline CertReport certify(const std::vector<double>& delta_grid,
                          const std::vector<double>& z_grid,
                          double tol_rel = 0.04, double quad_tol = 1e-10) {
    for (double d : delta_grid)
        if (!(d >= 0.0) || d > 1.5)
            throw std::domain_error("certification grid outside polynomial domain");
    for (double z : z_grid)
        if (std::fabs(z) > 1.0)
            throw std::domain_error("certification grid outside polynomial domain");

    const std::size_t nz = z_grid.size(), nd = delta_grid.size();
    CertReport rep;
    rep.tol_rel = tol_rel;
    rep.rows.resize(nz * nd);
    parallel_for(nz * nd, [&](std::size_t k) {
        const double z = z_grid[k / nd];
        const double d = delta_grid[k % nd];
        CertRow& r = rep.rows[k];
        r.z = z;
        r.delta = d;
        r.i_poly = poly_I(z, d);
        r.j_poly = poly_J(z, d);
        r.i_quad = eval_I(z, d, quad_tol);
        r.j_quad = eval_J(z, d, quad_tol);
    });

    double scale_i = 0.0, scale_j = 0.0;
    for (const auto& r : rep.rows) {
        scale_i = std::max(scale_i, std::fabs(r.i_quad));
        scale_j = std::max(scale_j, std::fabs(r.j_quad));
    }
    for (auto& r : rep.rows) {
        r.i_rel_err = std::fabs(r.i_poly - r.i_quad) / scale_i;
        r.j_rel_err = std::fabs(r.j_poly - r.j_quad) / scale_j;
        if (r.i_rel_err > rep.max_rel_err) {
            rep.max_rel_err = r.i_rel_err;
            rep.worst_z = r.z; rep.worst_delta = r.delta;
            rep.worst_functional = 'I';
            rep.worst_poly = r.i_poly; rep.worst_quad = r.i_quad;
        }
        if (r.j_rel_err > rep.max_rel_err) {
            rep.max_rel_err = r.j_rel_err;
            rep.worst_z = r.z; rep.worst_delta = r.delta;
            rep.worst_functional = 'J';
            rep.worst_poly = r.j_poly; rep.worst_quad = r.j_quad;
        }
    }
    rep.pass = rep.max_rel_err <= tol_rel;
    return rep;
}

// ---------------------------------------------------------------------------
// Steady-state condition in closed polynomial form.
//
// Setting T' = dE/dz = 0 on a fixed-phase branch turns the steady-state
// condition into omega_ratio = S(z), with
//   S(z) = 2z - 6z(1-z^2) I + 1.5 (1-z^2)^2 I' -+ [2z J - (1-z^2) J']
// where the upper sign is the Theta = 0 branch and the lower Theta = pi.

enum class ThetaBranch { zero, pi };

namespace poly_detail {

template <class PI, class PJ>
double stationarity_from(const PI& fi, const PJ& fj, ThetaBranch branch, double z) {
    const double om = 1.0 - z * z;
    const double iv = fi.eval(z), ip = fi.deriv(z);
    const double jv = fj.eval(z), jp = fj.deriv(z);
    const double jsign = branch == ThetaBranch::zero ? 1.0 : -1.0;
    return 2.0 * z - 6.0 * z * om * iv + 1.5 * om * om * ip +
           jsign * (-2.0 * z * jv + om * jp);
}

}  // namespace poly_detail

inline double stationarity_poly(ThetaBranch branch, double z, double delta,
                                PolyFamily family = PolyFamily::dispatch) {
    poly_detail::check_range(z, delta);
    bool sextic = family == PolyFamily::sextic ||
                  (family == PolyFamily::dispatch && poly_detail::use_sextic(delta));
    if (sextic)
        return poly_detail::stationarity_from(poly_detail::sextic_I(delta),
                                              poly_detail::sextic_J(delta), branch, z);
    return poly_detail::stationarity_from(poly_detail::quartic_I(delta),
                                          poly_detail::quartic_J(delta), branch, z);
}

// Literal small-separation closed forms (coefficients as published, rounded).
inline double stationarity_smalldelta(ThetaBranch branch, double z) {
    const double u = z * z;
    if (branch == ThetaBranch::zero)
        return (((1.2 * u - 8.0) * u + 15.0) * u - 12.5) * z;
    return (((1.2 * u - 3.2) * u + 12.3) * u - 2.0) * z;
}

// Slope of the zero-branch stationarity curve at z = 0 for the sextic family:
//   dS/dz|_0 = 2 - 6 d_I + 3 c_I - 2 d_J + 2 c_J = -19.72 D^2 + 47.6 D - 21.13.
// Its positive root is where the central steady state loses stability; the
// quadratic is exact in the published coefficients, so the critical distance
// has a closed form.
inline double sextic_zero_slope(double delta) {
    return (-19.72 * delta + 47.6) * delta - 21.13;
}

inline double delta_c_zero_branch() {
    const double disc = 47.6 * 47.6 - 4.0 * 19.72 * 21.13;
    return (47.6 - std::sqrt(disc)) / (2.0 * 19.72);
}

}  // namespace sjj

#endif
