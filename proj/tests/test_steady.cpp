#include <catch2/catch_amalgamated.hpp>

#include "sjj/steady.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

using namespace sjj;
using Catch::Approx;

namespace {
ModelParams params(double omega_ratio, double delta) {
    return derive_params(1.0, 100, omega_ratio, delta);
}
}  // namespace

TEST_CASE("pi-branch roots at zero separation", "[steady]") {
    auto roots = branch_roots(params(0.0, 0.0), ThetaBranch::pi);
    REQUIRE(roots.size() == 3);

    CHECK(roots[0].z_star == Approx(-0.40962634643912316).margin(1e-9));
    CHECK(roots[2].z_star == Approx(0.40962634643912316).margin(1e-9));
    CHECK(roots[1].z_star == Approx(0.0).margin(1e-9));

    CHECK(roots[0].stability == Stability::center);
    CHECK(roots[2].stability == Stability::center);
    CHECK(roots[1].stability == Stability::saddle);

    CHECK(roots[0].branch == BranchId::z_minus);
    CHECK(roots[1].branch == BranchId::central);
    CHECK(roots[2].branch == BranchId::z_plus);

    for (const auto& r : roots) {
        CHECK(r.theta_star == Approx(pi));
        CHECK(r.residual <= 1e-8);
    }
    CHECK(roots[0].z_star * roots[0].z_star == Approx(0.17).margin(0.017));
    CHECK(roots[2].z_star * roots[2].z_star == Approx(0.17).margin(0.017));
    // z = 0 is its own root exactly, unaffected by the sign convention.
    CHECK(roots[1].z_star * roots[1].z_star < 0.02);
}

TEST_CASE("zero-branch roots below and above the critical separation", "[steady]") {
    auto below = branch_roots(params(0.0, 0.4), ThetaBranch::zero);
    REQUIRE(below.size() == 1);
    CHECK(below[0].z_star == Approx(0.0).margin(1e-9));
    CHECK(below[0].stability == Stability::center);

    auto above = branch_roots(params(0.0, 0.75), ThetaBranch::zero);
    REQUIRE(above.size() == 3);
    CHECK(above[2].z_star == Approx(0.42305083546042438).margin(1e-8));
    CHECK(above[0].z_star == Approx(-above[2].z_star).margin(1e-10));
    CHECK(above[0].stability == Stability::center);
    CHECK(above[1].stability == Stability::saddle);
    CHECK(above[2].stability == Stability::center);
    for (const auto& r : above) CHECK(r.residual <= 1e-8);
}

TEST_CASE("root sets are symmetric in z when the drive is off", "[steady]") {
    for (double delta : {0.0, 0.75, 1.2}) {
        for (auto branch : {ThetaBranch::zero, ThetaBranch::pi}) {
            auto roots = branch_roots(params(0.0, delta), branch);
            std::vector<double> zs;
            for (const auto& r : roots) zs.push_back(r.z_star);
            for (double z : zs) {
                const bool mirrored =
                    std::any_of(zs.begin(), zs.end(),
                                [&](double w) { return std::fabs(w + z) < 1e-9; });
                CHECK(mirrored);
            }
        }
    }
}

TEST_CASE("symmetric branch states are centers across the trapping window",
          "[steady]") {
    // Solving the stationarity relation for the drive at a given z and then
    // classifying that state must give a center well inside |z| < 0.7.
    for (double z : {-0.6, 0.0, 0.6}) {
        const double w = stationarity_poly(ThetaBranch::zero, z, 0.0);
        auto st = classify_stability(params(w, 0.0), {z, 0.0},
                                     FunctionalMode::polynomial);
        CHECK(st == Stability::center);
    }
}

TEST_CASE("pi branch keeps exactly one root across the drive window", "[steady]") {
    for (double w : {0.5 * pi, pi, 2.0 * pi}) {
        auto roots = branch_roots(params(w, 0.0), ThetaBranch::pi);
        CHECK(roots.size() == 1);
        CHECK(roots[0].residual <= 1e-8);
    }
}

TEST_CASE("pi-branch pair drifts outward and dies past delta ~ 2.85", "[steady]") {
    auto near0 = branch_roots(params(0.0, 0.0), ThetaBranch::pi);
    CHECK(near0.back().z_star == Approx(0.41).margin(0.03));

    auto wide = branch_roots(params(0.0, 2.8), ThetaBranch::pi,
                             FunctionalMode::quadrature);
    REQUIRE(!wide.empty());
    CHECK(wide.back().z_star == Approx(0.64).margin(0.03));

    auto gone = branch_roots(params(0.0, 2.9), ThetaBranch::pi,
                             FunctionalMode::quadrature);
    CHECK(gone.size() == 1);
    CHECK(std::fabs(gone[0].z_star) < 1e-6);
}

TEST_CASE("widely separated solitons pin the zero branch near the rim", "[steady]") {
    auto roots = branch_roots(params(0.0, 10.0), ThetaBranch::zero,
                              FunctionalMode::quadrature);
    REQUIRE(roots.size() == 3);
    CHECK(roots[2].z_star == Approx(0.95900649845600117).margin(1e-6));
    CHECK(roots[2].z_star == Approx(0.96).margin(0.01));
    CHECK(roots[0].z_star == Approx(-roots[2].z_star).margin(1e-9));
    CHECK(roots[2].stability == Stability::center);
}

TEST_CASE("maximal-imbalance states exist inside their drive windows", "[steady]") {
    const double win_lo = 2.0 * (pi - 1.0), win_hi = 2.0 * (pi + 1.0);

    auto both = noon_steady(params(0.0, 0.75));
    REQUIRE(both.size() == 2);
    for (const auto& s : both) {
        CHECK(std::fabs(s.z_star) == 1.0);
        CHECK(s.theta_star == Approx(1.2468502198629159).epsilon(1e-12));
        CHECK(s.stability == Stability::saddle);
        CHECK(s.residual == 0.0);
    }
    CHECK(both[0].branch != both[1].branch);

    auto plus_only = noon_steady(params(0.5 * (win_lo + win_hi), 0.75));
    REQUIRE(plus_only.size() == 1);
    CHECK(plus_only[0].z_star == 1.0);
    CHECK(plus_only[0].branch == BranchId::noon_plus);

    auto minus_only = noon_steady(params(-0.5 * (win_lo + win_hi), 0.75));
    REQUIRE(minus_only.size() == 1);
    CHECK(minus_only[0].z_star == -1.0);

    CHECK(noon_steady(params(win_hi + 0.5, 0.75)).empty());

    // At the window edge the phase collapses onto the axis and the linear
    // spectrum degenerates.
    auto edge = noon_steady(params(win_lo, 0.75));
    bool degenerate_seen = false;
    for (const auto& s : edge)
        if (s.stability == Stability::degenerate) degenerate_seen = true;
    CHECK(degenerate_seen);
}

TEST_CASE("bifurcation trace brackets the critical separation", "[steady][slow]") {
    auto res = trace_bifurcation(params(0.0, 0.0), {0.4, 0.8}, 40);
    REQUIRE(res.found);
    CHECK(res.delta_c == Approx(0.586333684349017).margin(5e-4));
    CHECK(res.delta_c == Approx(0.5867).margin(0.005));
    REQUIRE(!res.branch_pts.empty());
    for (const auto& bp : res.branch_pts) {
        CHECK(bp[0] > res.delta_c);
        CHECK(bp[1] == Approx(-bp[2]).margin(1e-8));
    }

    // Just past the fork the outer root follows a square-root law.
    auto roots = branch_roots(params(0.0, res.delta_c + 0.04), ThetaBranch::zero,
                              FunctionalMode::polynomial, 1e-10, PolyFamily::sextic);
    REQUIRE(roots.size() == 3);
    CHECK(roots[2].z_star == Approx(1.2 * std::sqrt(0.04)).epsilon(0.10));
    CHECK(roots[2].z_star == Approx(0.21899).margin(1e-3));

    CHECK_THROWS_AS(trace_bifurcation(params(0.0, 0.0), {0.8, 0.4}, 40),
                    std::invalid_argument);
}

TEST_CASE("bifurcation trace works on quadrature functionals", "[steady][slow]") {
    // The pi-branch pair folds between delta = 2.8 and 2.9; the count change
    // must be picked up by the trace in quadrature mode.
    auto res = trace_bifurcation(params(0.0, 0.0), {2.75, 2.95}, 4, ThetaBranch::pi,
                                 FunctionalMode::quadrature);
    REQUIRE(res.found);
    CHECK(res.delta_c > 2.8);
    CHECK(res.delta_c < 2.9);
}
