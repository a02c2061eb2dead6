#ifndef SJJ_MODEL_HPP
#define SJJ_MODEL_HPP

#include <cmath>
#include <stdexcept>

#include "util.hpp"

namespace sjj {

// Single source of truth for the model constants. omega_ratio is the primary
// drive parameter; the absolute trap frequency splitting is recoverable as
// omega_ratio * lambda_scale and is never stored separately.
struct ModelParams {
    double u = 0.0;           // nonlinearity strength, > 0
    int n_particles = 0;      // total particle count, >= 2
    double lambda_scale = 0;  // N^2 u^2 / 16, the nonlinear energy scale
    double omega_ratio = 0;   // Omega / Lambda
    double delta_sep = 0;     // normalized inter-soliton distance, >= 0
};

inline ModelParams derive_params(double u, int n_particles, double omega_ratio,
                                 double delta_sep) {
    if (!(u > 0.0)) throw std::domain_error("nonlinearity u must be positive");
    if (n_particles < 2) throw std::domain_error("particle count must be at least 2");
    if (!(delta_sep >= 0.0)) throw std::domain_error("delta must be non-negative");
    ModelParams p;
    p.u = u;
    p.n_particles = n_particles;
    p.lambda_scale = double(n_particles) * double(n_particles) * u * u / 16.0;
    p.omega_ratio = omega_ratio;
    p.delta_sep = delta_sep;
    return p;
}

// A point of the reduced phase plane: population imbalance z in [-1,1] and
// the effective relative phase Theta.
struct PhaseState {
    double z = 0.0;
    double theta = 0.0;
};

enum class Side { left, right };

// One sech-shaped half of the pair. In the scaled coordinate x' = (uN/4) x
// the profile reads amplitude * sech[slope * (x' + center_offset)] with
// slope = (1 -+ z); width_factor keeps the physical-coordinate slope.
struct SolitonProfile {
    double amplitude = 0.0;
    double width_factor = 0.0;
    double center_offset = 0.0;
    double phase = 0.0;

    double value_scaled(double x_scaled, double scale_un4) const {
        const double slope = width_factor / scale_un4;
        return amplitude * sech(slope * (x_scaled + center_offset));
    }
};

inline SolitonProfile sech_profile(const ModelParams& p, double z, Side side) {
    if (std::fabs(z) > 1.0) throw std::domain_error("imbalance z outside [-1,1]");
    const double un4 = p.u * double(p.n_particles) / 4.0;
    const double pop = side == Side::left ? 1.0 - z : 1.0 + z;
    SolitonProfile s;
    s.amplitude = std::sqrt(p.u * double(p.n_particles)) / 4.0 * pop;
    s.width_factor = pop * un4;
    s.center_offset = side == Side::left ? -p.delta_sep : p.delta_sep;
    s.phase = 0.0;
    return s;
}

struct FunctionalValues;  // defined in functionals.hpp

// Conserved energy of the reduced dynamics,
//   E = z^2 - (Omega/Lambda) z + (1/2)(1-z^2)^2 I (cos 2T + 2) + (1-z^2) J cos T.
// The canonical pairing is z' = -dE/dT, T' = +dE/dz; verify_canonical_signs
// in dynamics.hpp asserts this against the explicit right-hand side.
template <class FV>
double energy(const ModelParams& p, const PhaseState& st, const FV& fv) {
    const double z = st.z;
    const double om = 1.0 - z * z;
    return z * z - p.omega_ratio * z +
           0.5 * om * om * fv.i_val * (std::cos(2.0 * st.theta) + 2.0) +
           om * fv.j_val * std::cos(st.theta);
}

}  // namespace sjj

#endif
