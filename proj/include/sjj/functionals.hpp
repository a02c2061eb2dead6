#ifndef SJJ_FUNCTIONALS_HPP
#define SJJ_FUNCTIONALS_HPP

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "quadrature.hpp"
#include "util.hpp"

namespace sjj {

// Overlap functionals of the two-soliton ansatz,
//   I(z,D) = int sech^2[(1-z)(x-D)] sech^2[(1+z)(x+D)] dx
//   J(z,D) = sum_{s=+-1} int (1+sz)^2 sech^3[(1+sz)(x+sD)] sech[(1-sz)(x-sD)] dx
// evaluated by adaptive quadrature. Both approach I = 1, J = pi as |z| -> 1
// regardless of D, which is served by an analytic limit branch because the
// (1-|z|) decay rate would otherwise push the truncation domain to infinity.

enum class EvalMode { quadrature, polynomial, limit };

inline const char* to_string(EvalMode m) {
    switch (m) {
        case EvalMode::quadrature: return "quadrature";
        case EvalMode::polynomial: return "polynomial";
        default: return "limit";
    }
}

struct FunctionalValues {
    double i_val = 0.0;
    double j_val = 0.0;
    double di_dz = 0.0;
    double dj_dz = 0.0;
    EvalMode mode = EvalMode::quadrature;
};

namespace detail {

constexpr double limit_band = 1e-9;  // 1-|z| below this uses the exact limit

inline void check_domain(double z, double delta, double tol) {
    if (std::fabs(z) > 1.0) throw std::domain_error("imbalance z outside [-1,1]");
    if (!(delta >= 0.0)) throw std::domain_error("delta must be non-negative");
    if (!(tol > 0.0)) throw std::domain_error("quadrature tolerance must be positive");
}

// The integrand decays like exp(-2(1-|z|)|x|); 40 decay lengths of the
// slowest factor keeps the truncated tail below double precision. The 0.02
// floor caps the domain before the limit branch takes over.
inline double x_cutoff(double z, double delta) {
    return delta + 40.0 / std::max(1.0 - std::fabs(z), 0.02);
}

inline std::vector<double> seed_points(double delta) {
    return {-delta - 30.0, -delta, 0.0, delta, delta + 30.0};
}

}  // namespace detail

inline double eval_I(double z, double delta, double tol = 1e-10) {
    detail::check_domain(z, delta, tol);
    if (1.0 - std::fabs(z) < detail::limit_band) return 1.0;
    const double xm = detail::x_cutoff(z, delta);
    const double wl = 1.0 - z, wr = 1.0 + z;
    auto f = [=](double x) {
        const double a = sech(wl * (x - delta));
        const double b = sech(wr * (x + delta));
        return a * a * b * b;
    };
    return integrate_adaptive(f, -xm, xm, tol, detail::seed_points(delta)).value;
}

inline double eval_J(double z, double delta, double tol = 1e-10) {
    detail::check_domain(z, delta, tol);
    if (1.0 - std::fabs(z) < detail::limit_band) return pi;
    const double xm = detail::x_cutoff(z, delta);
    double total = 0.0;
    for (int s : {+1, -1}) {
        const double wp = 1.0 + s * z, wm = 1.0 - s * z;
        const double sd = s * delta;
        auto f = [=](double x) {
            const double a = sech(wp * (x + sd));
            const double b = sech(wm * (x - sd));
            return wp * wp * a * a * a * b;
        };
        // Split the budget; each branch is a single-peak integrand.
        total += integrate_adaptive(f, -xm, xm, 0.5 * tol, detail::seed_points(delta)).value;
    }
    return total;
}

// z = 0 decay check helper for the well-separated regime.
inline std::pair<double, double> large_delta_decay(double delta) {
    if (!(delta >= 3.0)) throw std::domain_error("decay probe expects delta >= 3");
    return {eval_I(0.0, delta), eval_J(0.0, delta)};
}

enum class FunctionalMode { quadrature, polynomial, auto_dispatch };

inline const char* to_string(FunctionalMode m) {
    switch (m) {
        case FunctionalMode::quadrature: return "quadrature";
        case FunctionalMode::polynomial: return "polynomial";
        default: return "auto";
    }
}

namespace approx_detail {
// Forward declarations; bodies live in approx.hpp. Declared here so that
// eval_all can dispatch to the polynomial surrogates without a header cycle.
double poly_I(double z, double delta);
double poly_J(double z, double delta);
double poly_I_dz(double z, double delta);
double poly_J_dz(double z, double delta);
}  // namespace approx_detail

// One-stop evaluation of (I, J, dI/dz, dJ/dz). Quadrature-mode derivatives
// use central differences of the integrals (one-sided at the limit branch);
// polynomial mode differentiates the surrogate analytically.
inline FunctionalValues eval_all(double z, double delta, double tol = 1e-10,
                                 FunctionalMode mode = FunctionalMode::auto_dispatch) {
    detail::check_domain(z, delta, tol);
    FunctionalMode m = mode;
    if (m == FunctionalMode::auto_dispatch)
        m = delta <= 1.5 ? FunctionalMode::polynomial : FunctionalMode::quadrature;

    FunctionalValues fv;
    if (m == FunctionalMode::polynomial) {
        fv.mode = EvalMode::polynomial;
        fv.i_val = approx_detail::poly_I(z, delta);
        fv.j_val = approx_detail::poly_J(z, delta);
        fv.di_dz = approx_detail::poly_I_dz(z, delta);
        fv.dj_dz = approx_detail::poly_J_dz(z, delta);
        return fv;
    }

    const double h = 1e-5;
    if (1.0 - std::fabs(z) < detail::limit_band) {
        fv.mode = EvalMode::limit;
        fv.i_val = 1.0;
        fv.j_val = pi;
        // One-sided differences stepping into the interior.
        const double zin = z > 0.0 ? z - h : z + h;
        const double sign = z > 0.0 ? 1.0 : -1.0;
        fv.di_dz = sign * (1.0 - eval_I(zin, delta, tol)) / h;
        fv.dj_dz = sign * (pi - eval_J(zin, delta, tol)) / h;
        return fv;
    }

    fv.mode = EvalMode::quadrature;
    fv.i_val = eval_I(z, delta, tol);
    fv.j_val = eval_J(z, delta, tol);
    const double zp = std::min(z + h, 1.0), zm = std::max(z - h, -1.0);
    fv.di_dz = (eval_I(zp, delta, tol) - eval_I(zm, delta, tol)) / (zp - zm);
    fv.dj_dz = (eval_J(zp, delta, tol) - eval_J(zm, delta, tol)) / (zp - zm);
    return fv;
}

}  // namespace sjj

#endif
