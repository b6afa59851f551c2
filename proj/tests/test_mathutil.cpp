#include <doctest.h>

#include <cmath>

#include "gpsemc/mathutil.hpp"
#include "testutil.hpp"
#include "gpsemc/units.hpp"

using namespace gpsemc;

TEST_CASE("sinc at zero and at multiples of pi") {
    CHECK(sinc(0.0) == 1.0);
    CHECK(std::abs(sinc(M_PI)) < 1e-15);
    CHECK(std::abs(sinc(2.0 * M_PI)) < 1e-15);
    CHECK(std::abs(sinc(-3.0 * M_PI)) < 1e-15);
}

TEST_CASE("sinc matches sin(x)/x away from zero and is smooth through it") {
    for (double x : {1e-12, 1e-9, 1e-6, 1e-4, 0.1, 1.0, 2.5, 10.0}) {
        double ref = (x < 1e-7) ? 1.0 - x * x / 6.0 : std::sin(x) / x;
        CHECK(sinc(x) == doctest::Approx(ref).epsilon(1e-12));
        CHECK(sinc(-x) == doctest::Approx(sinc(x)).epsilon(1e-15));
    }
}

TEST_CASE("fixed-panel Simpson integrates sin over a half period") {
    double v = simpson([](double x) { return std::sin(x); }, 0.0, M_PI, 2000);
    CHECK(v == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("adaptive Simpson on a polynomial is near-exact") {
    double v = adaptive_simpson([](double x) { return x * x; }, 0.0, 1.0, 1e-12, 1.0);
    CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("adaptive Simpson max_step catches a narrow spike") {
    // Gaussian of width 1e-3 centered mid-interval on [0, 1000]: a quadrature
    // that never subdivides below the spike width would miss it entirely.
    auto spike = [](double x) {
        double u = (x - 500.0) / 1e-3;
        return std::exp(-0.5 * u * u);
    };
    double v = adaptive_simpson(spike, 0.0, 1000.0, 1e-10, 0.5);
    double exact = std::sqrt(2.0 * M_PI) * 1e-3;
    CHECK(v == doctest::Approx(exact).epsilon(1e-6));
}

TEST_CASE("uniform-offset mean of sinc^2 matches a dense direct sum") {
    const double t_d = 5e-3;
    double lib = mean_sinc_sq_uniform(t_d);
    // Independent Riemann midpoint sum over the same +-500 Hz offset range.
    const int n = 400000;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        double f = (i + 0.5) * 500.0 / n;
        double x = M_PI * f * t_d;
        double s = std::sin(x) / x;
        acc += s * s;
    }
    acc /= n;
    CHECK(lib == doctest::Approx(acc).epsilon(1e-6));
    CHECK(lib == doctest::Approx(0.191831476).epsilon(1e-5));
}

TEST_CASE("uniform-offset mean of sinc^2 approaches one for short windows") {
    CHECK(mean_sinc_sq_uniform(1e-9) == doctest::Approx(1.0).epsilon(1e-9));
    // Monotone in integration time over the usual range.
    CHECK(mean_sinc_sq_uniform(1e-3) > mean_sinc_sq_uniform(5e-3));
}

TEST_CASE("dB and dBm conversions invert each other") {
    for (double db : {-120.0, -3.0103, 0.0, 10.0, 55.0}) {
        CHECK(linear_to_db(db_to_linear(db)) == doctest::Approx(db).epsilon(1e-12));
    }
    CHECK(dbm_to_watts(0.0) == doctest::Approx(1e-3).epsilon(1e-12));
    CHECK_REL(dbm_to_watts(-75.0), 3.16227766e-11, 1e-8);
    CHECK(watts_to_dbm(dbm_to_watts(-119.0)) == doctest::Approx(-119.0).epsilon(1e-12));
}

TEST_CASE("chip-rate constants are self-consistent") {
    CHECK(kCodeLength == 1023);
    CHECK(kChipRateHz == doctest::Approx(1.023e6));
    CHECK(kChipPeriodS * kChipRateHz == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(kCodePeriodS == doctest::Approx(1e-3).epsilon(1e-15));
    CHECK(kLineSpacingHz == doctest::Approx(1.0 / kCodePeriodS).epsilon(1e-15));
}
