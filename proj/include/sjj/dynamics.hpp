#ifndef SJJ_DYNAMICS_HPP
#define SJJ_DYNAMICS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "approx.hpp"
#include "functionals.hpp"
#include "model.hpp"
#include "util.hpp"

namespace sjj {

struct Derivs {
    double dz;
    double dtheta;
};

// Equations of motion generated by the reduced energy with the convention
//   dz/dtau = -dE/dTheta,   dTheta/dtau = +dE/dz.
template <class FV>
Derivs rhs_from(const PhaseState& st, double omega_ratio, const FV& fv) {
    const double z = st.z;
    const double om = 1.0 - z * z;
    const double s1 = std::sin(st.theta), c1 = std::cos(st.theta);
    const double s2 = 2.0 * s1 * c1, c2 = 2.0 * c1 * c1 - 1.0;
    Derivs d;
    d.dz = om * (om * fv.i_val * s2 + fv.j_val * s1);
    d.dtheta = -omega_ratio + 2.0 * z +
               (c2 + 2.0) * (-2.0 * z * om * fv.i_val + 0.5 * om * om * fv.di_dz) +
               c1 * (-2.0 * z * fv.j_val + om * fv.dj_dz);
    return d;
}

// Precomputed coupling functionals on a uniform z grid, with cubic Hermite
// interpolation between nodes. The reported di_dz/dj_dz are the derivatives
// of the interpolants themselves, so a flow built on the table conserves the
// table's energy exactly; node derivatives only serve as Hermite slopes.
// Intended for separations beyond the polynomial fits, where evaluating the
// integrals inside every RHS call would dominate a phase portrait.
class FunctionalTable {
public:
    explicit FunctionalTable(double delta, std::size_t n_nodes = 4001,
                             double quad_tol = 1e-10)
        : delta_(delta), h_(2.0 / static_cast<double>(n_nodes - 1)),
          iv_(n_nodes), jv_(n_nodes), di_(n_nodes), dj_(n_nodes) {
        if (n_nodes < 4) throw std::invalid_argument("functional table needs >= 4 nodes");
        parallel_for(n_nodes, [&](std::size_t k) {
            const double z = std::clamp(-1.0 + h_ * static_cast<double>(k), -1.0, 1.0);
            FunctionalValues fv = eval_all(z, delta_, quad_tol, FunctionalMode::quadrature);
            iv_[k] = fv.i_val;
            jv_[k] = fv.j_val;
            di_[k] = fv.di_dz;
            dj_[k] = fv.dj_dz;
        });
    }

    double delta() const { return delta_; }

    FunctionalValues eval(double z) const {
        z = std::clamp(z, -1.0, 1.0);
        std::size_t k = static_cast<std::size_t>((z + 1.0) / h_);
        if (k + 2 > iv_.size()) k = iv_.size() - 2;
        const double t = (z - (-1.0 + h_ * static_cast<double>(k))) / h_;
        FunctionalValues out;
        out.i_val = hermite(iv_[k], di_[k], iv_[k + 1], di_[k + 1], t);
        out.j_val = hermite(jv_[k], dj_[k], jv_[k + 1], dj_[k + 1], t);
        out.di_dz = hermite_d(iv_[k], di_[k], iv_[k + 1], di_[k + 1], t);
        out.dj_dz = hermite_d(jv_[k], dj_[k], jv_[k + 1], dj_[k + 1], t);
        out.mode = EvalMode::quadrature;
        return out;
    }

private:
    double hermite(double f0, double m0, double f1, double m1, double t) const {
        const double t2 = t * t, t3 = t2 * t;
        return (2.0 * t3 - 3.0 * t2 + 1.0) * f0 + (t3 - 2.0 * t2 + t) * h_ * m0 +
               (-2.0 * t3 + 3.0 * t2) * f1 + (t3 - t2) * h_ * m1;
    }
    double hermite_d(double f0, double m0, double f1, double m1, double t) const {
        const double t2 = t * t;
        return ((6.0 * t2 - 6.0 * t) * f0 + (3.0 * t2 - 4.0 * t + 1.0) * h_ * m0 +
                (-6.0 * t2 + 6.0 * t) * f1 + (3.0 * t2 - 2.0 * t) * h_ * m1) / h_;
    }

    double delta_, h_;
    std::vector<double> iv_, jv_, di_, dj_;
};

// Resolves which functional source an integration uses. A non-null table
// wins; otherwise the mode decides (auto: polynomial within its fit range,
// quadrature beyond).
class FunctionalSource {
public:
    FunctionalSource(double delta, FunctionalMode mode, double quad_tol,
                     const FunctionalTable* table = nullptr)
        : delta_(delta), quad_tol_(quad_tol), table_(table) {
        if (table_) {
            poly_ = false;
        } else if (mode == FunctionalMode::polynomial) {
            poly_ = true;
        } else if (mode == FunctionalMode::quadrature) {
            poly_ = false;
        } else {
            poly_ = delta <= 1.5;
        }
        if (poly_) poly_detail::check_range(0.0, delta);
    }

    FunctionalValues operator()(double z) const {
        if (table_) return table_->eval(z);
        if (poly_) {
            FunctionalValues fv;
            fv.i_val = poly_I(z, delta_);
            fv.j_val = poly_J(z, delta_);
            fv.di_dz = poly_I_dz(z, delta_);
            fv.dj_dz = poly_J_dz(z, delta_);
            fv.mode = EvalMode::polynomial;
            return fv;
        }
        return eval_all(z, delta_, quad_tol_, FunctionalMode::quadrature);
    }

private:
    double delta_, quad_tol_;
    const FunctionalTable* table_;
    bool poly_ = false;
};

inline Derivs rhs(const ModelParams& p, const PhaseState& st,
                  FunctionalMode mode = FunctionalMode::auto_dispatch,
                  double quad_tol = 1e-10, const FunctionalTable* table = nullptr) {
    FunctionalSource src(p.delta_sep, mode, quad_tol, table);
    PhaseState s{std::clamp(st.z, -1.0, 1.0), st.theta};
    return rhs_from(s, p.omega_ratio, src(s.z));
}

// Self-test of the sign convention: the RHS must match central differences
// of energy() as dz/dtau = -dE/dTheta, dTheta/dtau = +dE/dz. Cheap enough to
// run at every CLI start; a sign slip here silently mirrors every portrait.
inline void verify_canonical_signs(double tol = 1e-6) {
    ModelParams p;
    p.omega_ratio = 0.3;
    p.delta_sep = 0.4;
    FunctionalSource src(p.delta_sep, FunctionalMode::polynomial, 1e-10);
    const double h = 1e-6;
    for (double z : {-0.5, 0.1, 0.6}) {
        for (double th : {0.3, 2.0, -1.1}) {
            Derivs d = rhs_from(PhaseState{z, th}, p.omega_ratio, src(z));
            const double de_dth = (energy(p, PhaseState{z, th + h}, src(z)) -
                                   energy(p, PhaseState{z, th - h}, src(z))) /
                                  (2.0 * h);
            const double de_dz = (energy(p, PhaseState{z + h, th}, src(z + h)) -
                                  energy(p, PhaseState{z - h, th}, src(z - h))) /
                                 (2.0 * h);
            const double scale = std::max({1.0, std::fabs(d.dz), std::fabs(d.dtheta)});
            if (std::fabs(d.dz + de_dth) > tol * scale ||
                std::fabs(d.dtheta - de_dz) > tol * scale)
                throw std::logic_error("canonical sign self-test failed: RHS is not "
                                       "(-dE/dTheta, +dE/dz) of the energy");
        }
    }
}

// ---------------------------------------------------------------------------
// Dormand-Prince 5(4) with the Hairer continuous extension.

namespace dp5 {

const double a21 = 0.2, a31 = 3.0 / 40.0, a32 = 9.0 / 40.0, a41 = 44.0 / 45.0,
             a42 = -56.0 / 15.0, a43 = 32.0 / 9.0, a51 = 19372.0 / 6561.0,
             a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0,
             a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
             a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0, a71 = 35.0 / 384.0,
             a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0, a75 = -2187.0 / 6784.0,
             a76 = 11.0 / 84.0;

const double c2 = 0.2, c3 = 0.3, c4 = 0.8, c5 = 8.0 / 9.0;

const double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
             e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

const double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
             d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
             d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

}  // namespace dp5

struct DenseStep {
    double t0, h;
    // Quartic interpolation coefficients per component (z, theta).
    std::array<std::array<double, 5>, 2> r;

    std::array<double, 2> eval(double t) const {
        const double th = (t - t0) / h, th1 = 1.0 - th;
        std::array<double, 2> y;
        for (int i = 0; i < 2; ++i)
            y[i] = r[i][0] +
                   th * (r[i][1] + th1 * (r[i][2] + th * (r[i][3] + th1 * r[i][4])));
        return y;
    }
};

struct Trajectory {
    ModelParams params;
    std::vector<double> t_grid;
    std::vector<PhaseState> states;
    std::vector<double> energies;
    double energy_drift = 0.0;  // max |E(tau) - E(0)| over the samples
    bool complete = true;       // false after step-size underflow (partial result)
    std::string note;
};

struct IntegrateOptions {
    // Defaults chosen so the accumulated energy drift of a tau = 200 run
    // stays below 1e-8; at 1e-10 the global error random-walks past that.
    double rtol = 1e-12;
    double atol = 1e-14;
    std::size_t n_samples = 2001;
    FunctionalMode mode = FunctionalMode::auto_dispatch;
    double quad_tol = 1e-10;
    const FunctionalTable* table = nullptr;
};

inline Trajectory integrate(const ModelParams& p, PhaseState initial, double t_final,
                            const IntegrateOptions& opts = {}) {
    if (!(t_final > 0.0)) throw std::domain_error("integration horizon must be positive");
    if (std::fabs(initial.z) > 1.0)
        throw std::domain_error("initial imbalance outside [-1,1]");
    if (opts.n_samples < 2) throw std::invalid_argument("need at least 2 samples");

    FunctionalSource src(p.delta_sep, opts.mode, opts.quad_tol, opts.table);
    auto f = [&](double z, double th) {
        return rhs_from(PhaseState{std::clamp(z, -1.0, 1.0), th}, p.omega_ratio,
                        src(std::clamp(z, -1.0, 1.0)));
    };

    std::vector<DenseStep> steps;
    double t = 0.0;
    std::array<double, 2> y{initial.z, initial.theta};
    Derivs k1 = f(y[0], y[1]);

    double h = std::min(1e-4, t_final);
    bool underflow = false;
    const int max_steps = 40'000'000;
    for (int n = 0; t < t_final && n < max_steps; ++n) {
        h = std::min(h, t_final - t);
        if (!(t + h > t)) {
            underflow = true;
            break;
        }
        using namespace dp5;
        Derivs k2 = f(y[0] + h * a21 * k1.dz, y[1] + h * a21 * k1.dtheta);
        Derivs k3 = f(y[0] + h * (a31 * k1.dz + a32 * k2.dz),
                      y[1] + h * (a31 * k1.dtheta + a32 * k2.dtheta));
        Derivs k4 = f(y[0] + h * (a41 * k1.dz + a42 * k2.dz + a43 * k3.dz),
                      y[1] + h * (a41 * k1.dtheta + a42 * k2.dtheta + a43 * k3.dtheta));
        Derivs k5 =
            f(y[0] + h * (a51 * k1.dz + a52 * k2.dz + a53 * k3.dz + a54 * k4.dz),
              y[1] + h * (a51 * k1.dtheta + a52 * k2.dtheta + a53 * k3.dtheta +
                          a54 * k4.dtheta));
        Derivs k6 = f(
            y[0] + h * (a61 * k1.dz + a62 * k2.dz + a63 * k3.dz + a64 * k4.dz +
                        a65 * k5.dz),
            y[1] + h * (a61 * k1.dtheta + a62 * k2.dtheta + a63 * k3.dtheta +
                        a64 * k4.dtheta + a65 * k5.dtheta));
        std::array<double, 2> ynew{
            y[0] + h * (a71 * k1.dz + a73 * k3.dz + a74 * k4.dz + a75 * k5.dz +
                        a76 * k6.dz),
            y[1] + h * (a71 * k1.dtheta + a73 * k3.dtheta + a74 * k4.dtheta +
                        a75 * k5.dtheta + a76 * k6.dtheta)};
        Derivs k7 = f(ynew[0], ynew[1]);

        const std::array<double, 2> errv{
            h * (e1 * k1.dz + e3 * k3.dz + e4 * k4.dz + e5 * k5.dz + e6 * k6.dz +
                 e7 * k7.dz),
            h * (e1 * k1.dtheta + e3 * k3.dtheta + e4 * k4.dtheta + e5 * k5.dtheta +
                 e6 * k6.dtheta + e7 * k7.dtheta)};
        double err = 0.0;
        for (int i = 0; i < 2; ++i) {
            const double sk =
                opts.atol + opts.rtol * std::max(std::fabs(y[i]), std::fabs(ynew[i]));
            err += (errv[i] / sk) * (errv[i] / sk);
        }
        err = std::sqrt(0.5 * err);

        if (err <= 1.0) {
            DenseStep ds;
            ds.t0 = t;
            ds.h = h;
            const std::array<double, 2> k1v{k1.dz, k1.dtheta},
                k7v{k7.dz, k7.dtheta},
                kd{h * (d1 * k1.dz + d3 * k3.dz + d4 * k4.dz + d5 * k5.dz +
                        d6 * k6.dz + d7 * k7.dz),
                   h * (d1 * k1.dtheta + d3 * k3.dtheta + d4 * k4.dtheta +
                        d5 * k5.dtheta + d6 * k6.dtheta + d7 * k7.dtheta)};
            for (int i = 0; i < 2; ++i) {
                const double ydiff = ynew[i] - y[i];
                const double bspl = h * k1v[i] - ydiff;
                ds.r[i] = {y[i], ydiff, bspl, ydiff - h * k7v[i] - bspl, kd[i]};
            }
            steps.push_back(ds);

            t += h;
            y = ynew;
            if (std::fabs(y[0]) > 1.0) {
                if (std::fabs(y[0]) - 1.0 > 1e-12) {
                    underflow = true;  // left the physical strip; report partial
                    break;
                }
                y[0] = std::copysign(1.0, y[0]);
            }
            k1 = k7;
            const double fac = std::clamp(0.9 * std::pow(err, -0.2), 0.2, 10.0);
            h *= fac;
        } else {
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
        }
    }
    if (steps.empty()) throw ConvergenceError("integrator made no progress", t_final);

    Trajectory traj;
    traj.params = p;
    traj.complete = !underflow && t >= t_final;
    if (!traj.complete)
        traj.note = (underflow ? "step-size underflow at tau = "
                               : "step budget exhausted at tau = ") +
                    std::to_string(t) + "; trajectory truncated";
    const double t_end = traj.complete ? t_final : t;

    traj.t_grid.resize(opts.n_samples);
    traj.states.resize(opts.n_samples);
    traj.energies.resize(opts.n_samples);
    std::size_t cell = 0;
    for (std::size_t i = 0; i < opts.n_samples; ++i) {
        const double ti =
            t_end * static_cast<double>(i) / static_cast<double>(opts.n_samples - 1);
        while (cell + 1 < steps.size() && ti > steps[cell].t0 + steps[cell].h) ++cell;
        std::array<double, 2> yi = steps[cell].eval(ti);
        yi[0] = std::clamp(yi[0], -1.0, 1.0);
        traj.t_grid[i] = ti;
        traj.states[i] = PhaseState{yi[0], yi[1]};
        traj.energies[i] = energy(p, traj.states[i], src(yi[0]));
    }
    for (double e : traj.energies)
        traj.energy_drift = std::max(traj.energy_drift, std::fabs(e - traj.energies[0]));
    return traj;
}

// ---------------------------------------------------------------------------
// Small-oscillation closed forms around the steady states.

struct LinearOscillation {
    double omega;    // angular frequency in renormalized time
    double forcing;  // constant displacement coefficient
    double offset;   // equilibrium shift of z
};

inline LinearOscillation linear_zero_phase(const ModelParams& p) {
    const double d = p.delta_sep;
    const double rad = 0.37 - d * d - 0.25 * d;
    if (rad <= 0.0)
        throw std::domain_error("zero-phase linearization invalid: central steady "
                                "state gone at this separation");
    const double omega = 13.4 * std::sqrt(rad);
    const double f = 5.36 - 0.8 * d - 4.22 * d * d;
    return {omega, f, -p.omega_ratio * f / (omega * omega)};
}

inline std::array<LinearOscillation, 2> linear_bifurcation(const ModelParams& p) {
    const double dm = p.delta_sep - delta_c_zero_branch();
    if (dm <= 0.0)
        throw std::domain_error("bifurcation linearization needs a separation beyond "
                                "the critical one");
    const double rad = dm * (1.0 + dm * (-4.48 + dm * (17.8 - 53.5 * dm)));
    if (rad <= 0.0)
        throw std::domain_error("bifurcation linearization out of its validity range");
    const double w2 = 14.53 * 14.53 * rad;
    const double f = 3.4 + dm * (-7.26 + 11.0 * dm);
    const double amp = (1.2 - 18.0 * dm / w2) * std::sqrt(dm);
    const double shift = -p.omega_ratio * f / w2;
    const double omega = std::sqrt(w2);
    return {LinearOscillation{omega, f, amp + shift},
            LinearOscillation{omega, f, -amp + shift}};
}

inline LinearOscillation linear_pi_phase(const ModelParams& p) {
    const double d = p.delta_sep;
    const double rad = 2.0 - 0.9 * d * d - 0.3 * d;
    if (rad <= 0.0)
        throw std::domain_error("pi-phase linearization invalid at this separation");
    const double omega = std::sqrt(rad);
    const double f = 0.1 * (d * d + 0.38 * d + 5.5);
    return {omega, f, p.omega_ratio * f / (omega * omega)};
}

// ---------------------------------------------------------------------------
// Regime classification.

enum class Regime { oscillation, mqst, running_phase };

inline const char* to_string(Regime r) {
    switch (r) {
        case Regime::oscillation: return "oscillation";
        case Regime::mqst: return "mqst";
        default: return "running_phase";
    }
}

struct RegimeLabel {
    Regime label = Regime::oscillation;
    double z_mean = 0.0;
    int z_sign_flips = 0;
    double theta_winding = 0.0;  // total Theta change over 2*pi
};

namespace classify_detail {

inline int count_crossings(const std::vector<double>& v, double level) {
    int n = 0;
    double prev = 0.0;
    bool have_prev = false;
    for (double x : v) {
        const double s = x - level;
        if (s == 0.0) continue;
        if (have_prev && std::signbit(s) != std::signbit(prev)) ++n;
        prev = s;
        have_prev = true;
    }
    return n;
}

}  // namespace classify_detail

inline RegimeLabel classify(const Trajectory& traj) {
    if (traj.states.size() < 16)
        throw std::invalid_argument("trajectory too sparse to classify");
    RegimeLabel lab;
    std::vector<double> zs(traj.states.size()), ths(traj.states.size());
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        zs[i] = traj.states[i].z;
        ths[i] = traj.states[i].theta;
    }
    for (double z : zs) lab.z_mean += z;
    lab.z_mean /= static_cast<double>(zs.size());
    lab.z_sign_flips = classify_detail::count_crossings(zs, 0.0);
    lab.theta_winding = (ths.back() - ths.front()) / (2.0 * pi);

    if (std::fabs(lab.theta_winding) >= 2.0 &&
        std::fabs(spearman_rho(traj.t_grid, ths)) > 0.95) {
        lab.label = Regime::running_phase;
        return lab;
    }
    // Need about three oscillation periods (six mean crossings) before the
    // bounded labels mean anything.
    if (classify_detail::count_crossings(zs, lab.z_mean) < 6)
        throw std::runtime_error("trajectory too short to classify: fewer than three "
                                 "oscillation periods observed");
    if (lab.z_sign_flips == 0 && std::fabs(lab.z_mean) > 0.02)
        lab.label = Regime::mqst;
    else
        lab.label = Regime::oscillation;
    return lab;
}

// Angular frequency from mean-crossing intervals; immune to windowing and
// fine at a handful of periods, which is all the acceptance runs provide.
inline double measured_frequency(const Trajectory& traj) {
    double mean = 0.0;
    for (const auto& s : traj.states) mean += s.z;
    mean /= static_cast<double>(traj.states.size());
    std::vector<double> times;
    for (std::size_t i = 1; i < traj.states.size(); ++i) {
        const double a = traj.states[i - 1].z - mean, b = traj.states[i].z - mean;
        if (a == 0.0 || std::signbit(a) == std::signbit(b)) continue;
        const double frac = a / (a - b);
        times.push_back(traj.t_grid[i - 1] +
                        frac * (traj.t_grid[i] - traj.t_grid[i - 1]));
    }
    if (times.size() < 2)
        throw std::runtime_error("too few mean crossings to measure a frequency");
    const double half_period =
        (times.back() - times.front()) / static_cast<double>(times.size() - 1);
    return pi / half_period;
}

// ---------------------------------------------------------------------------
// Phase portraits: independent trajectories over an IC grid, labeled.

struct PortraitCell {
    PhaseState initial;
    Trajectory traj;
    RegimeLabel label;
    bool failed = false;
    std::string error;
};

inline std::vector<PortraitCell> phase_portrait(const ModelParams& p,
                                                const std::vector<double>& z_grid,
                                                const std::vector<double>& theta_grid,
                                                double t_final,
                                                IntegrateOptions opts = {}) {
    for (double z : z_grid)
        if (std::fabs(z) > 1.0) throw std::domain_error("portrait z grid outside [-1,1]");
    for (double th : theta_grid)
        if (th < -pi || th >= pi)
            throw std::domain_error("portrait theta grid outside [-pi, pi)");

    // One shared table when quadrature evaluation would otherwise run inside
    // every RHS call of every cell.
    std::unique_ptr<FunctionalTable> table;
    if (!opts.table && p.delta_sep > 1.5 && opts.mode != FunctionalMode::polynomial) {
        table = std::make_unique<FunctionalTable>(p.delta_sep, 4001, opts.quad_tol);
        opts.table = table.get();
    }

    const std::size_t nz = z_grid.size(), nth = theta_grid.size();
    std::vector<PortraitCell> cells(nz * nth);
    parallel_for(nz * nth, [&](std::size_t k) {
        PortraitCell& c = cells[k];
        c.initial = PhaseState{z_grid[k / nth], theta_grid[k % nth]};
        try {
            c.traj = integrate(p, c.initial, t_final, opts);
            c.label = classify(c.traj);
        } catch (const std::exception& e) {
            c.failed = true;
            c.error = e.what();
        }
    });
    return cells;
}

}  // namespace sjj

#endif
