#include <doctest.h>

#include <cmath>

#include "drio/control.hpp"
#include "drio/propagate.hpp"
#include "drio/schedule.hpp"
#include "drio/train.hpp"

using namespace drio;

namespace {
constexpr double kT = 381.8;

SubpulseTrain drio3()
{
    return digitize(rio_third_order(1.86 * M_PI / kT), 15);
}
}  // namespace

TEST_CASE("export emits one instruction per subpulse")
{
    const SubpulseTrain t = drio3();
    const ScheduleDocument doc =
        export_schedule(t, 2.0 / 9.0, {.protocol_tag = "drio3", .order = 3, .pulse_count = 15});
    REQUIRE(doc.instructions.size() == 15);
    CHECK(doc.metadata.total_duration_ns == doctest::Approx(kT).epsilon(1e-3));
    CHECK(doc.max_rabi_rad_per_ns > 0.0);
    double prev = -1.0;
    for (const ScheduleInstruction& ins : doc.instructions) {
        CHECK(ins.amplitude >= 0.0);
        CHECK(ins.amplitude <= 1.0);
        CHECK(ins.t0_ns >= prev);
        prev = ins.t0_ns;
        // Times quantized to the dt grid.
        const double q = ins.t0_ns / doc.dt_ns;
        CHECK(std::fabs(q - std::round(q)) < 1e-9);
    }
    CHECK_NOTHROW(validate_schedule(doc));
}

TEST_CASE("round trip preserves the dynamics within the quantization budget")
{
    const SubpulseTrain t = drio3();
    const ScheduleDocument doc = export_schedule(t);
    const SubpulseTrain back = parse_schedule(schedule_from_json(schedule_to_json(doc)));
    REQUIRE(back.count() == t.count());
    const double p0 = propagate_delta_train(t).final_pop2();
    const double p1 = propagate_delta_train(back).final_pop2();
    CHECK(std::fabs(p0 - p1) <= 1e-4);
}

TEST_CASE("empty train exports an empty valid document")
{
    SubpulseTrain empty;
    empty.sigma = 1.0;
    empty.tau = 6.0;
    const ScheduleDocument doc = export_schedule(empty);
    CHECK(doc.instructions.empty());
    CHECK_NOTHROW(validate_schedule(doc));
}

TEST_CASE("structural validation rejects malformed documents")
{
    ScheduleDocument doc = export_schedule(drio3());
    SUBCASE("amplitude above 1")
    {
        doc.instructions[3].amplitude = 1.5;
        CHECK_THROWS(validate_schedule(doc));
    }
    SUBCASE("negative time")
    {
        doc.instructions[0].t0_ns = -1.0;
        CHECK_THROWS(validate_schedule(doc));
    }
    SUBCASE("non-positive dt")
    {
        doc.dt_ns = 0.0;
        CHECK_THROWS(validate_schedule(doc));
    }
    SUBCASE("decreasing times")
    {
        std::swap(doc.instructions[2].t0_ns, doc.instructions[9].t0_ns);
        CHECK_THROWS(validate_schedule(doc));
    }
}

TEST_CASE("JSON serialization round trip")
{
    const ScheduleDocument doc =
        export_schedule(drio3(), 2.0 / 9.0, {.protocol_tag = "drio3", .order = 3});
    const ScheduleDocument back = schedule_from_json(schedule_to_json(doc));
    CHECK(back.version == doc.version);
    CHECK(back.dt_ns == doctest::Approx(doc.dt_ns).epsilon(1e-15));
    CHECK(back.metadata.protocol_tag == "drio3");
    REQUIRE(back.instructions.size() == doc.instructions.size());
    CHECK(back.instructions[7].phase_rad ==
          doctest::Approx(doc.instructions[7].phase_rad).epsilon(1e-12));
}
