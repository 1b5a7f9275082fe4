#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "qdev/quantities.hpp"
#include "qdev/rng.hpp"

using namespace qdev;

TEST_CASE("dbm_to_watts matches the definition") {
    CHECK(dbm_to_watts(0.0) == doctest::Approx(1.0e-3).epsilon(1e-12));
    CHECK(dbm_to_watts(-30.0) == doctest::Approx(1.0e-6).epsilon(1e-12));
    // oracle: direct evaluation of 1e-3 * 10^-14
    CHECK(dbm_to_watts(-140.0) == doctest::Approx(1.0e-17).epsilon(1e-12));
    CHECK_THROWS_AS(dbm_to_watts(std::numeric_limits<double>::quiet_NaN()), Error);
    CHECK_THROWS_AS(dbm_to_watts(std::numeric_limits<double>::infinity()), Error);
}

TEST_CASE("dBm <-> W round trip is exact to 1e-12 relative") {
    Xoshiro256pp rng(42);
    for (int i = 0; i < 200; ++i) {
        const double dbm = -170.0 + 200.0 * rng.uniform01();
        const double watts = dbm_to_watts(dbm);
        CHECK(watts_to_dbm(watts) == doctest::Approx(dbm).epsilon(1e-12));
        CHECK(dbm_to_watts(watts_to_dbm(watts)) == doctest::Approx(watts).epsilon(1e-12));
    }
    const Power p = Power::from_dbm(-97.3);
    CHECK(Power::from_watts(p.watts()).dbm() == doctest::Approx(-97.3).epsilon(1e-12));
}

TEST_CASE("to_angular applies exactly one factor of 2*pi") {
    CHECK(to_angular(Frequency(0.0)).rad_per_s() == 0.0);
    CHECK(to_angular(Frequency(1.0)).rad_per_s() ==
          doctest::Approx(6.283185307179586).epsilon(1e-15));
    // oracle: 2*pi*4.565e9
    CHECK(to_angular(Frequency(4.565e9)).rad_per_s() ==
          doctest::Approx(28682740927.27481).epsilon(1e-12));

    Xoshiro256pp rng(7);
    for (int i = 0; i < 100; ++i) {
        const double f = 1e9 * rng.uniform01();
        CHECK(to_angular(Frequency(f)).rad_per_s() == constants::kTwoPi * f);
    }
}

TEST_CASE("Power rejects non-positive watts") {
    CHECK_THROWS_AS(Power::from_watts(0.0), Error);
    CHECK_THROWS_AS(Power::from_watts(-1.0), Error);
}

namespace {

std::vector<S21Point> valid_grid(std::size_t n) {
    std::vector<S21Point> pts(n);
    for (std::size_t i = 0; i < n; ++i) {
        pts[i] = S21Point{5e9 + 1e4 * static_cast<double>(i), {1.0, 0.0}};
    }
    return pts;
}

} // namespace

TEST_CASE("S21Trace construction enforces its invariants") {
    CHECK_NOTHROW(S21Trace(valid_grid(16)));
    CHECK_THROWS_AS(S21Trace(valid_grid(8)), Error);
    CHECK_THROWS_AS(S21Trace(valid_grid(15)), Error);

    auto unsorted = valid_grid(20);
    std::swap(unsorted[4], unsorted[5]);
    CHECK_THROWS_AS(S21Trace(std::move(unsorted)), Error);

    auto duplicated = valid_grid(20);
    duplicated[6].freq_hz = duplicated[5].freq_hz;
    CHECK_THROWS_AS(S21Trace(std::move(duplicated)), Error);

    auto with_nan = valid_grid(20);
    with_nan[3].value = {std::numeric_limits<double>::quiet_NaN(), 0.0};
    CHECK_THROWS_AS(S21Trace(std::move(with_nan)), Error);

    auto bad_freq = valid_grid(20);
    bad_freq[0].freq_hz = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(S21Trace(std::move(bad_freq)), Error);
}

TEST_CASE("S21Trace rejects randomly shuffled grids") {
    Xoshiro256pp rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        auto pts = valid_grid(32);
        const std::size_t i = 1 + static_cast<std::size_t>(rng.uniform01() * 30.0);
        const std::size_t j = 1 + static_cast<std::size_t>(rng.uniform01() * 30.0);
        if (i == j) continue;
        std::swap(pts[i], pts[j]);
        CHECK_THROWS_AS(S21Trace(std::move(pts)), Error);
    }
}

TEST_CASE("S21Trace metadata validation") {
    CHECK_NOTHROW(S21Trace(valid_grid(16), -30.0, 60.0));
    CHECK_THROWS_AS(S21Trace(valid_grid(16), std::nullopt, -1.0), Error);
    CHECK_THROWS_AS(
        S21Trace(valid_grid(16), std::numeric_limits<double>::quiet_NaN(), 60.0), Error);
}

TEST_CASE("DecayTrace construction enforces its invariants") {
    std::vector<DecayPoint> pts(8);
    for (std::size_t i = 0; i < 8; ++i) {
        pts[i] = DecayPoint{1e-6 * static_cast<double>(i), 0.5};
    }
    CHECK_NOTHROW(DecayTrace(pts));

    CHECK_THROWS_AS(DecayTrace(std::vector<DecayPoint>(pts.begin(), pts.begin() + 7)),
                    Error);

    auto negative = pts;
    negative[0].delay_s = -1e-9;
    CHECK_THROWS_AS(DecayTrace(std::move(negative)), Error);

    auto stalled = pts;
    stalled[3].delay_s = stalled[2].delay_s;
    CHECK_THROWS_AS(DecayTrace(std::move(stalled)), Error);

    auto with_nan = pts;
    with_nan[2].signal = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(DecayTrace(std::move(with_nan)), Error);
}
