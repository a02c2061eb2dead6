#include <catch2/catch_amalgamated.hpp>

#include "sjj/approx.hpp"
#include "sjj/functionals.hpp"
#include "sjj/model.hpp"
#include "sjj/quadrature.hpp"

#include <cmath>
#include <stdexcept>

using namespace sjj;
using Catch::Approx;

TEST_CASE("derive_params validates and fills the energy scale", "[model]") {
    auto p = derive_params(1.0, 100, 0.3, 0.75);
    CHECK(p.lambda_scale == Approx(625.0));
    CHECK(p.omega_ratio == 0.3);
    CHECK(p.delta_sep == 0.75);

    CHECK(derive_params(0.8, 10, 0.0, 0.0).lambda_scale == Approx(4.0));

    CHECK_THROWS_AS(derive_params(0.0, 100, 0.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(derive_params(-1.0, 100, 0.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(derive_params(1.0, 1, 0.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(derive_params(1.0, 100, 0.0, -0.1), std::domain_error);
}

TEST_CASE("sech profiles split the population as (1 -+ z)/2", "[model]") {
    auto p = derive_params(1.0, 100, 0.0, 0.75);
    const double un4 = p.u * p.n_particles / 4.0;

    for (double z : {-0.6, 0.0, 0.3, 0.9}) {
        for (Side side : {Side::left, Side::right}) {
            auto s = sech_profile(p, z, side);
            const double pop = side == Side::left ? 1.0 - z : 1.0 + z;
            CHECK(s.amplitude == Approx(std::sqrt(p.u * p.n_particles) / 4.0 * pop));
            CHECK(s.width_factor == Approx(pop * un4));

            // Norm in the physical coordinate: integral of the squared profile
            // over x = x'/un4 must equal the population fraction pop/2.
            auto dens = [&](double xs) {
                const double v = s.value_scaled(xs, un4);
                return v * v;
            };
            const double cut = std::fabs(s.center_offset) + 60.0 / std::max(pop, 0.05);
            auto norm = integrate_adaptive(dens, -cut, cut, 1e-11,
                                           {-s.center_offset});
            CHECK(norm.value / un4 == Approx(pop / 2.0).epsilon(1e-8));
        }
    }

    // Peaks sit at -center_offset: the left profile at +delta, the right at
    // -delta, which is the pairing the coupling integrals assume.
    auto l = sech_profile(p, 0.2, Side::left);
    CHECK(l.center_offset == -0.75);
    CHECK(l.value_scaled(0.75, un4) == Approx(l.amplitude));
    CHECK(l.value_scaled(0.75 + 1.0, un4) < l.amplitude);

    CHECK_THROWS_AS(sech_profile(p, 1.2, Side::left), std::domain_error);
}

TEST_CASE("reduced energy reproduces frozen reference values", "[model][energy]") {
    auto p0 = derive_params(1.0, 100, 0.0, 0.0);
    auto quad = [](double z, double d) {
        return eval_all(z, d, 1e-10, FunctionalMode::quadrature);
    };
    auto poly = [](double z, double d) {
        return eval_all(z, d, 1e-10, FunctionalMode::polynomial);
    };

    // At z = 0, Theta = pi the closed forms give 3/2 I(0,0) - J(0,0) = -2/3.
    CHECK(energy(p0, {0.0, pi}, quad(0.0, 0.0)) == Approx(-2.0 / 3.0).epsilon(1e-12));
    CHECK(energy(p0, {0.0, pi}, poly(0.0, 0.0)) == Approx(-0.705).epsilon(1e-12));
    CHECK(energy(p0, {0.3, pi}, poly(0.3, 0.0)) ==
          Approx(-0.76956902850000009).epsilon(1e-14));
    CHECK(energy(p0, {0.6, pi}, poly(0.6, 0.0)) ==
          Approx(-0.68508825600000001).epsilon(1e-14));

    auto p4 = derive_params(1.0, 100, 0.0, 0.4);
    CHECK(energy(p4, {0.3, 0.0}, quad(0.3, 0.4)) ==
          Approx(3.5216156344387315).epsilon(1e-13));

    // Even in z when the drive is off, 2pi-periodic in Theta always.
    auto pd = derive_params(1.0, 100, 0.0, 0.6);
    CHECK(energy(pd, {0.45, 1.1}, quad(0.45, 0.6)) ==
          Approx(energy(pd, {-0.45, 1.1}, quad(-0.45, 0.6))).epsilon(1e-12));
    CHECK(energy(pd, {0.45, 1.1}, quad(0.45, 0.6)) ==
          Approx(energy(pd, {0.45, 1.1 + 2.0 * pi}, quad(0.45, 0.6))).epsilon(1e-12));

    // The drive enters as -omega_ratio * z and nothing else.
    auto pw = derive_params(1.0, 100, 0.7, 0.6);
    CHECK(energy(pw, {0.45, 1.1}, quad(0.45, 0.6)) ==
          Approx(energy(pd, {0.45, 1.1}, quad(0.45, 0.6)) - 0.7 * 0.45).epsilon(1e-12));
}
