#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "drio/control.hpp"
#include "drio/propagate.hpp"

using namespace drio;

namespace {
constexpr double kT = 381.8;  // ns, the experimental total duration
}

TEST_CASE("third-order preset geometry")
{
    const double rabi = 1.86 * M_PI / kT;
    const ContinuousControl c = rio_third_order(rabi);
    CHECK(c.duration == doctest::Approx(kT).epsilon(1e-12));
    CHECK(c.rabi(0.3 * kT) == doctest::Approx(rabi).epsilon(1e-12));
    // Delta(0) = Delta0 * cn(K) = 0 and the waveform is odd about T/2.
    CHECK(std::fabs(c.detuning(0.0)) < 1e-9);
    for (double f : {0.1, 0.25, 0.4}) {
        CHECK(c.detuning(kT * (0.5 + f)) ==
              doctest::Approx(-c.detuning(kT * (0.5 - f))).epsilon(1e-9));
    }
    CHECK(c.has_phase());
    CHECK(std::fabs(c.phase(0.0)) < 1e-12);
}

TEST_CASE("published vs exact third-order constants")
{
    const RioParams pub = rio_third_order_params();
    const RioParams exact = rio_third_order_exact_params();
    CHECK(std::fabs(pub.m - 0.235) < 1e-12);
    CHECK(pub.area_multiple == doctest::Approx(1.86).epsilon(1e-12));
    // The exact free-duration solution rounds to the published constants.
    CHECK(exact.m == doctest::Approx(0.235).epsilon(0.01));
    CHECK(exact.omega_over_rabi == doctest::Approx(1.149).epsilon(0.001));
    CHECK(exact.delta0_over_rabi == doctest::Approx(1.114).epsilon(0.001));
    CHECK(exact.area_multiple == doctest::Approx(1.86).epsilon(0.001));
}

TEST_CASE("complete transfer of the continuous controls")
{
    const double rabi = 1.86 * M_PI / kT;
    const double infid3 =
        1.0 - propagate_effective(rio_third_order(rabi), QubitState::ground(), 1e-12)
                  .final_pop2();
    CHECK(infid3 < 1e-6);
    const double infid_exact =
        1.0 - propagate_effective(rio_elliptic(rio_third_order_exact_params(), rabi),
                                  QubitState::ground(), 1e-12)
                  .final_pop2();
    CHECK(infid_exact < 1e-10);
    const double infid5 =
        1.0 - propagate_effective(rio_fifth_order(2.71 * M_PI / kT), QubitState::ground(),
                                  1e-12)
                  .final_pop2();
    CHECK(infid5 < 1e-9);
}

TEST_CASE("pi pulse is a resonant square pulse of area pi")
{
    const ContinuousControl p = pi_pulse(0.5);
    CHECK(p.duration * 0.5 == doctest::Approx(M_PI).epsilon(1e-12));
    CHECK(p.detuning(0.3 * p.duration) == 0.0);
    CHECK(1.0 - propagate_effective(p, QubitState::ground(), 1e-12).final_pop2() < 1e-10);
}

TEST_CASE("phase integrates the detuning")
{
    const ContinuousControl c = rio_third_order(1.0);
    // dphi/dt = Delta via a central difference at a few interior times.
    const double h = 1e-5;
    for (double f : {0.2, 0.5, 0.8}) {
        const double t = f * c.duration;
        const double slope = (c.phase(t + h) - c.phase(t - h)) / (2.0 * h);
        CHECK(slope == doctest::Approx(c.detuning(t)).epsilon(1e-6));
    }
}

TEST_CASE("waveform file round trip")
{
    const double rabi = 1.86 * M_PI / kT;
    const ContinuousControl c = rio_third_order(rabi);
    const nlohmann::json doc = save_waveform(c, 1024, 3, "test");
    const ContinuousControl back = load_waveform(doc);
    CHECK(back.duration == doctest::Approx(c.duration).epsilon(1e-12));
    for (double f = 0.02; f < 1.0; f += 0.07) {
        CHECK(back.detuning(f * kT) == doctest::Approx(c.detuning(f * kT)).epsilon(1e-6));
    }
    const double p0 = propagate_effective(c, QubitState::ground(), 1e-11).final_pop2();
    const double p1 = propagate_effective(back, QubitState::ground(), 1e-11).final_pop2();
    CHECK(std::fabs(p0 - p1) < 1e-7);
}

TEST_CASE("invalid arguments are rejected")
{
    CHECK_THROWS(rio_third_order(0.0));
    CHECK_THROWS(rio_fifth_order(-1.0));
    CHECK_THROWS(pi_pulse(0.0));
}
