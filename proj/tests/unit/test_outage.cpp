#include "ngrid/outage.hpp"

#include <doctest.h>

#include <stdexcept>

using namespace ngrid;
using namespace ngrid::sim;

TEST_CASE("repair duration rounds up to whole hours") {
    CHECK(repair_duration(1.0) == 1);
    CHECK(repair_duration(1.2) == 2);
    CHECK(repair_duration(0.3) == 1);
    CHECK(repair_duration(4.0) == 4);
    CHECK_THROWS_AS(repair_duration(0.0), std::invalid_argument);
    CHECK_THROWS_AS(repair_duration(-1.0), std::invalid_argument);
}

TEST_CASE("rng is reproducible and uniform draws stay in [0,1)") {
    Rng a(42), b(42);
    for (int i = 0; i < 1000; ++i) {
        const double u = a.uniform();
        CHECK(u == b.uniform());
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    // splitmix64 reference value for seed 0.
    CHECK(Rng(0).next_u64() == 0xE220A8397B1DCDAFULL);
}

TEST_CASE("stream seeds differ per replication and feeder") {
    CHECK(stream_seed(1, 0, "F1") != stream_seed(1, 1, "F1"));
    CHECK(stream_seed(1, 0, "F1") != stream_seed(1, 0, "F2"));
    CHECK(stream_seed(1, 0, "F1") != stream_seed(2, 0, "F1"));
    CHECK(stream_seed(1, 0, "F1") == stream_seed(1, 0, "F1"));
}

TEST_CASE("zero SoR never fails") {
    sor::SorTable t({"F1", "F2"}, 24);
    for (int rep = 0; rep < 20; ++rep) CHECK(sample_outages(t, 2.0, 24, 9, static_cast<unsigned>(rep)).empty());
}

TEST_CASE("certain failure produces the expected event") {
    sor::SorTable t({"F1"}, 24);
    t.set(0, 5, 1.0);
    const auto events = sample_outages(t, 1.0, 24, 3, 0);
    REQUIRE(events.size() == 1);
    CHECK(events[0] == OutageEvent{"F1", 5, 1});
}

TEST_CASE("active outages suppress new starts and truncate at the horizon") {
    Rng rng(1);
    const std::vector<double> always(24, 1.0);
    const auto events = sample_feeder_outages("F", always, 5, rng);
    REQUIRE(events.size() == 5);
    for (std::size_t i = 0; i < events.size(); ++i) CHECK(events[i].start_hour == static_cast<int>(5 * i));
    CHECK(events.back().duration_hours == 4);
    CHECK(events.back().end_hour() == 24);
}

TEST_CASE("one draw per hour keeps later hours independent of duration") {
    // Same stream, different durations: hours after every outage see the same draws.
    std::vector<double> sor(24, 0.0);
    sor[2] = 1.0;
    sor[20] = 0.5;
    int agree = 0;
    for (std::uint64_t s = 0; s < 200; ++s) {
        Rng a(s), b(s);
        const auto short_run = sample_feeder_outages("F", sor, 1, a);
        const auto long_run = sample_feeder_outages("F", sor, 6, b);
        agree += (short_run.size() == long_run.size());
    }
    CHECK(agree == 200);
}

TEST_CASE("retiming keeps starts and merges overlaps") {
    const std::vector<OutageEvent> starts = {{"F1", 0, 1}, {"F1", 3, 1}, {"F2", 22, 1}};
    const auto d3 = retime_outages(starts, 3.0, 24);
    REQUIRE(d3.size() == 3);
    CHECK(d3[0] == OutageEvent{"F1", 0, 3});
    CHECK(d3[1] == OutageEvent{"F1", 3, 3});
    CHECK(d3[2] == OutageEvent{"F2", 22, 2});

    const auto d4 = retime_outages(starts, 4.0, 24);
    REQUIRE(d4.size() == 2);
    CHECK(d4[0] == OutageEvent{"F1", 0, 7});
    CHECK(d4[1] == OutageEvent{"F2", 22, 2});
}

TEST_CASE("retimed outage hours grow with repair time") {
    sor::SorTable t({"A", "B", "C"}, 24, 0.15);
    for (std::uint64_t rep = 0; rep < 50; ++rep) {
        const auto starts = sample_outages(t, 1.0, 24, 77, rep);
        int prev_hours = 0;
        for (double d : {1.0, 2.0, 3.0, 4.0, 5.0}) {
            int hours = 0;
            for (const auto& e : retime_outages(starts, d, 24)) hours += e.duration_hours;
            CHECK(hours >= prev_hours);
            prev_hours = hours;
        }
    }
}
