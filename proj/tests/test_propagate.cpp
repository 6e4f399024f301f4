#include <doctest.h>

#include <cmath>

#include "drio/control.hpp"
#include "drio/propagate.hpp"
#include "drio/train.hpp"

using namespace drio;

namespace {
constexpr double kT = 381.8;

SubpulseTrain drio3()
{
    return digitize(rio_third_order(1.86 * M_PI / kT), 15);
}
}  // namespace

TEST_CASE("delta kick algebra")
{
    // Area pi flips the populations; area pi/2 splits them evenly.
    QubitState s = delta_kick(M_PI, 0.0).apply(QubitState::ground());
    CHECK(s.pop2() == doctest::Approx(1.0).epsilon(1e-14));
    s = delta_kick(M_PI / 2.0, 0.3).apply(QubitState::ground());
    CHECK(s.pop2() == doctest::Approx(0.5).epsilon(1e-14));
    // Unit determinant and unitarity.
    CHECK(delta_kick(1.1, 0.7).unitarity_defect() < 1e-15);
    // Two half-pi kicks of equal phase compose to a pi kick.
    const Su2Propagator two = delta_kick(M_PI / 2.0, 0.0) * delta_kick(M_PI / 2.0, 0.0);
    CHECK(two.apply(QubitState::ground()).pop2() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("digital pi pulse transfers exactly in the delta model")
{
    const SubpulseTrain t = digitize(pi_pulse(M_PI / kT), 15);
    CHECK(1.0 - propagate_delta_train(t).final_pop2() < 1e-12);
    // Scaled by (1 + alpha) the transfer is cos^2(pi alpha / 2) exactly.
    for (double alpha : {-0.3, -0.05, 0.1, 0.4}) {
        SubpulseTrain s = t;
        for (Subpulse& p : s.pulses) p.omega *= 1.0 + alpha;
        CHECK(propagate_delta_train(s).final_pop2() ==
              doctest::Approx(std::cos(M_PI * alpha / 2.0) * std::cos(M_PI * alpha / 2.0))
                  .epsilon(1e-12));
    }
}

TEST_CASE("transformed frame matches the lab frame populations")
{
    const SubpulseTrain t = drio3();
    const Trajectory lab = propagate_delta_train(t);
    const Trajectory tr = propagate_delta_train_transformed(t);
    REQUIRE(lab.points.size() == tr.points.size());
    for (std::size_t i = 0; i < lab.points.size(); ++i) {
        CHECK(std::fabs(lab.points[i].state.pop2() - tr.points[i].state.pop2()) < 1e-12);
    }
}

TEST_CASE("full Gaussian integration agrees with delta kicks at tau = 6 sigma")
{
    const SubpulseTrain t = drio3();
    const double pd = propagate_delta_train(t).final_pop2();
    const double pf = propagate_full(t, QubitState::ground(), 1e-12).final_pop2();
    CHECK(std::fabs(pd - pf) < 1e-6);  // frozen oracle: 1.9e-8 at tau = 6 sigma
    CHECK(propagate_full(t).max_norm_defect < 1e-8);
}

TEST_CASE("mode expansion brackets the two limits")
{
    const SubpulseTrain t = drio3();
    // k_max = 0 is the resonant effective model.
    const double k0 =
        propagate_modes(t, ModeTruncation::for_train(t, 0), QubitState::ground(), 1e-11)
            .final_pop2();
    const double pe =
        propagate_effective(effective_control(t), QubitState::ground(), 1e-11).final_pop2();
    CHECK(std::fabs(k0 - pe) < 1e-8);
    // Large k_max converges to the delta-kick result.
    const double k20 =
        propagate_modes(t, ModeTruncation::for_train(t, 20), QubitState::ground(), 1e-11)
            .final_pop2();
    const double pd = propagate_delta_train(t).final_pop2();
    CHECK(std::fabs(k20 - pd) < 1e-5);  // frozen oracle: 3.9e-6
    CHECK(std::fabs(k20 - pd) < std::fabs(k0 - pd));
    CHECK(ModeTruncation::for_train(t, 3).gamma ==
          doctest::Approx(2.0 * M_PI / t.tau).epsilon(1e-15));
}

TEST_CASE("input validation")
{
    const SubpulseTrain t = drio3();
    CHECK_THROWS(propagate_modes(t, ModeTruncation{-1, 1.0}));
    CHECK_THROWS(propagate_full(t, QubitState::ground(), 0.0));
    QubitState unnormalized;
    unnormalized.c1 = {2.0, 0.0};
    CHECK_THROWS(propagate_delta_train(t, unnormalized));
}
