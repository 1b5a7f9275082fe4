#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qdev/ler.hpp"
#include "qdev/rng.hpp"
#include "qdev/synth.hpp"

using namespace qdev;

TEST_CASE("resonant_frequency") {
    // quadrupling C halves f
    const double f1 = resonant_frequency(4e-9, 100e-15);
    const double f2 = resonant_frequency(4e-9, 400e-15);
    CHECK(f1 / f2 == doctest::Approx(2.0).epsilon(1e-12));

    // oracle: direct evaluation with the stated inductor and stray capacitance
    CHECK(resonant_frequency(4.29e-9, 84.1e-15) ==
          doctest::Approx(8379025027.96147).epsilon(1e-12));

    // oracle: direct evaluation with 100 um of fin at the extracted C0
    CHECK(resonant_frequency(4.29e-9, 84.1e-15 + 2.1e-9 * 100e-6) ==
          doctest::Approx(4480680460.165683).epsilon(1e-12));

    CHECK_THROWS_AS(resonant_frequency(0.0, 1e-13), Error);
    CHECK_THROWS_AS(resonant_frequency(1e-9, -1e-13), Error);
}

TEST_CASE("fit_c0 recovers the generating constants exactly") {
    const LerDesign design{4.29e-9, 84.1e-15, 2.1e-9, 11.7};
    const std::vector<double> lengths{40e-6, 60e-6, 80e-6, 100e-6};
    const auto points = synth_ler_dataset(design, lengths, NoiseSpec{0.0, 0});

    const C0Fit fit = fit_c0(points, design.inductance_h);
    CHECK(fit.c0_f_per_m == doctest::Approx(2.1e-9).epsilon(1e-9));
    CHECK(fit.c_stray_f == doctest::Approx(84.1e-15).epsilon(1e-9));
    CHECK(fit.f_at_zero_hz == doctest::Approx(8379025027.96147).epsilon(1e-9));
    CHECK(fit.rms_residual < 1e-25);
}

TEST_CASE("fit_c0 interpolates two exact points with zero residual") {
    const LerDesign design{5e-9, 60e-15, 1.5e-9, 11.7};
    const auto points = synth_ler_dataset(design, {30e-6, 90e-6}, NoiseSpec{0.0, 0});
    const C0Fit fit = fit_c0(points, design.inductance_h);
    CHECK(fit.c0_f_per_m == doctest::Approx(1.5e-9).epsilon(1e-9));
    CHECK(fit.c_stray_f == doctest::Approx(60e-15).epsilon(1e-9));
    CHECK(fit.rms_residual < 1e-25);
}

TEST_CASE("fit_c0 handles inconsistent repeats as plain least squares") {
    std::vector<LengthFrequencyPoint> points{
        {50e-6, 5.10e9}, {50e-6, 5.00e9}, {100e-6, 4.00e9}, {150e-6, 3.40e9}};
    const C0Fit fit = fit_c0(points, 4.29e-9);
    CHECK(fit.rms_residual > 0.0);
    CHECK(fit.c0_f_per_m > 0.0);
}

TEST_CASE("fit_c0 input validation") {
    try {
        fit_c0({{50e-6, 5e9}, {50e-6, 5e9}}, 4.29e-9); // one distinct length
        FAIL("expected insufficient-data");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InsufficientData);
    }
    CHECK_THROWS_AS(fit_c0({{50e-6, 5e9}, {100e-6, -4e9}}, 4.29e-9), Error);

    // a negative extrapolated intercept is unphysical
    std::vector<LengthFrequencyPoint> rising{{50e-6, 1e9}, {100e-6, 4e9}};
    try {
        fit_c0(rising, 4.29e-9);
        FAIL("expected unphysical-fit");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnphysicalFit);
    }
}

TEST_CASE("parallel_plate_estimate") {
    // paper geometry: 2.2 um fin height, 220 nm thickness, eps_r = 11.7
    const double c0 = parallel_plate_estimate(FinGeometry{2.2e-6, 220e-9, 11.7});
    CHECK(c0 == doctest::Approx(1.0359399740976e-9).epsilon(1e-12));
    CHECK(std::abs(c0 - 1.0e-9) <= 0.05 * 1.0e-9);

    // vacuum unit-aspect case gives eps0 per unit length
    CHECK(parallel_plate_estimate(FinGeometry{1e-6, 1e-6, 1.0}) ==
          doctest::Approx(constants::kEps0).epsilon(1e-15));

    // doubling the height doubles the estimate
    CHECK(parallel_plate_estimate(FinGeometry{4.4e-6, 220e-9, 11.7}) ==
          doctest::Approx(2.0 * c0).epsilon(1e-12));
}

TEST_CASE("the crude plate estimate sits below the extracted C0") {
    const double estimate = parallel_plate_estimate(FinGeometry{2.2e-6, 220e-9, 11.7});
    CHECK(estimate < 2.1e-9);
}

TEST_CASE("fin_fraction") {
    CHECK(fin_fraction(2.0e-9, 50e-6, 100e-15) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(fin_fraction(2.1e-9, 180e-6, 84.1e-15) ==
          doctest::Approx(0.8180047608742698).epsilon(1e-12));
    CHECK(fin_fraction(2.1e-9, 0.0, 84.1e-15) == 0.0);
}

TEST_CASE("fin_fraction grows with length and stays inside (0, 1)") {
    double prev = 0.0;
    for (double len = 10e-6; len <= 500e-6; len += 10e-6) {
        const double frac = fin_fraction(2.1e-9, len, 84.1e-15);
        CHECK(frac > prev);
        CHECK(frac > 0.0);
        CHECK(frac < 1.0);
        prev = frac;
    }
}

TEST_CASE("round trip over random positive designs") {
    Xoshiro256pp rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        const LerDesign design{(1.0 + 9.0 * rng.uniform01()) * 1e-9,
                               (20.0 + 180.0 * rng.uniform01()) * 1e-15,
                               (0.5 + 4.5 * rng.uniform01()) * 1e-9, 11.7};
        std::vector<double> lengths;
        for (int k = 0; k < 5; ++k) lengths.push_back((20.0 + 40.0 * k) * 1e-6);
        const auto points = synth_ler_dataset(design, lengths, NoiseSpec{0.0, 0});
        const C0Fit fit = fit_c0(points, design.inductance_h);
        CHECK(fit.c0_f_per_m ==
              doctest::Approx(design.cap_per_length_f_per_m).epsilon(1e-9));
        CHECK(fit.c_stray_f ==
              doctest::Approx(design.stray_capacitance_f).epsilon(1e-9));

        // composing the fitted constants reproduces the input frequencies
        for (const auto& p : points) {
            const double f = resonant_frequency(
                design.inductance_h, fit.c_stray_f + fit.c0_f_per_m * p.length_m);
            CHECK(f == doctest::Approx(p.f_r_hz).epsilon(1e-9));
        }
    }
}
