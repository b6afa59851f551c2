#include <doctest.h>

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "gpsemc/cacode.hpp"
#include "testutil.hpp"
#include "gpsemc/errors.hpp"
#include "gpsemc/mathutil.hpp"
#include "gpsemc/units.hpp"

using namespace gpsemc;

namespace {

// Reference generator written against the interface specification of the
// signal, deliberately in a different style from the library (packed integer
// registers instead of per-cell arrays) so the two cannot share a bug.
std::vector<int> reference_code(int prn) {
    static const std::array<std::pair<int, int>, 32> kPhase = {{
        {2, 6},  {3, 7},  {4, 8},  {5, 9},  {1, 9},  {2, 10}, {1, 8},  {2, 9},
        {3, 10}, {2, 3},  {3, 4},  {5, 6},  {6, 7},  {7, 8},  {8, 9},  {9, 10},
        {1, 4},  {2, 5},  {3, 6},  {4, 7},  {5, 8},  {6, 9},  {1, 3},  {4, 6},
        {5, 7},  {6, 8},  {7, 9},  {8, 10}, {1, 6},  {2, 7},  {3, 8},  {4, 9},
    }};
    auto bit = [](std::uint32_t reg, int pos) -> int {  // pos is 1-based stage index
        return static_cast<int>((reg >> (10 - pos)) & 1u);
    };
    std::uint32_t g1 = 0x3FF, g2 = 0x3FF;
    auto [t1, t2] = kPhase[static_cast<std::size_t>(prn - 1)];
    std::vector<int> chips(1023);
    for (int i = 0; i < 1023; ++i) {
        chips[static_cast<std::size_t>(i)] = bit(g1, 10) ^ bit(g2, t1) ^ bit(g2, t2);
        int f1 = bit(g1, 3) ^ bit(g1, 10);
        int f2 = bit(g2, 2) ^ bit(g2, 3) ^ bit(g2, 6) ^ bit(g2, 8) ^ bit(g2, 9) ^ bit(g2, 10);
        g1 = ((g1 >> 1) | (static_cast<std::uint32_t>(f1) << 9)) & 0x3FF;
        g2 = ((g2 >> 1) | (static_cast<std::uint32_t>(f2) << 9)) & 0x3FF;
    }
    return chips;
}

// First ten chips of each PRN, read as a 10-bit number (published octal values).
constexpr std::array<int, 32> kFirstTenOctal = {
    01440, 01620, 01710, 01744, 01133, 01455, 01131, 01454, 01626, 01504, 01642,
    01750, 01764, 01772, 01775, 01776, 01156, 01467, 01633, 01715, 01746, 01763,
    01063, 01706, 01743, 01761, 01770, 01774, 01127, 01453, 01625, 01712,
};

}  // namespace

TEST_CASE("all 32 codes match an independent generator chip for chip") {
    for (int prn = 1; prn <= 32; ++prn) {
        CaCode code = generate_ca_code(prn);
        REQUIRE(code.chips.size() == 1023);
        auto ref = reference_code(prn);
        for (int i = 0; i < 1023; ++i) {
            double expect = ref[static_cast<std::size_t>(i)] ? 1.0 : -1.0;
            REQUIRE(code.chips[i] == expect);
        }
    }
}

TEST_CASE("first ten chips reproduce the published octal words") {
    for (int prn = 1; prn <= 32; ++prn) {
        CaCode code = generate_ca_code(prn);
        int word = 0;
        for (int i = 0; i < 10; ++i) {
            word = (word << 1) | (code.chips[i] > 0.0 ? 1 : 0);
        }
        CHECK(word == kFirstTenOctal[static_cast<std::size_t>(prn - 1)]);
    }
}

TEST_CASE("invalid PRN numbers are rejected") {
    CHECK_THROWS_AS(generate_ca_code(0), std::invalid_argument);
    CHECK_THROWS_AS(generate_ca_code(33), std::invalid_argument);
    CHECK_THROWS_AS(generate_ca_code(-5), std::invalid_argument);
}

TEST_CASE("chip balance: 512 ones and 511 zeros") {
    for (int prn : {1, 7, 19, 32}) {
        CaCode code = generate_ca_code(prn);
        CHECK(code.chips.sum() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("bit-string rendering matches the chips") {
    CaCode code = generate_ca_code(3);
    std::string s = to_bit_string(code);
    REQUIRE(s.size() == 1023);
    for (int i = 0; i < 1023; ++i) {
        CHECK(s[static_cast<std::size_t>(i)] == (code.chips[i] > 0.0 ? '1' : '0'));
    }
}

TEST_CASE("autocorrelation is 1 at zero lag and three-valued elsewhere") {
    CaCode code = generate_ca_code(1);
    CHECK(autocorrelation(code, 0) == doctest::Approx(1.0).epsilon(1e-12));
    double maxoff = 0.0;
    for (int lag = 1; lag < 1023; ++lag) {
        double r = autocorrelation(code, lag);
        double scaled = r * 1023.0;
        double nearest = std::round(scaled);
        REQUIRE(std::abs(scaled - nearest) < 1e-9);
        bool threeval = nearest == -65.0 || nearest == -1.0 || nearest == 63.0;
        REQUIRE(threeval);
        maxoff = std::max(maxoff, std::abs(r));
    }
    CHECK(maxoff == doctest::Approx(65.0 / 1023.0).epsilon(1e-12));
}

TEST_CASE("cross-correlation of distinct codes is three-valued with max 65/1023") {
    CaCode a = generate_ca_code(2);
    CaCode b = generate_ca_code(9);
    double maxabs = 0.0;
    for (int lag = 0; lag < 1023; ++lag) {
        double r = cross_correlation(a, b, lag);
        double scaled = r * 1023.0;
        double nearest = std::round(scaled);
        REQUIRE(std::abs(scaled - nearest) < 1e-9);
        bool threeval = nearest == -65.0 || nearest == -1.0 || nearest == 63.0;
        REQUIRE(threeval);
        maxabs = std::max(maxabs, std::abs(r));
    }
    CHECK(maxabs == doctest::Approx(65.0 / 1023.0).epsilon(1e-12));
}

TEST_CASE("line spectrum is unit power and conjugate-symmetric in magnitude") {
    CaCode code = generate_ca_code(1);
    CodeSpectrum spec = code_spectrum(code);
    CHECK(spec.line_spacing_hz == doctest::Approx(1000.0));
    CHECK(spec.max_k() == 2 * 1023);

    double total = 0.0;
    for (int k = -spec.max_k(); k <= spec.max_k(); ++k) {
        total += spec.line_power(k);
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));

    for (int k : {1, 42, 511, 1023, 2000}) {
        CHECK(std::abs(spec.coefficient(-k)) ==
              doctest::Approx(std::abs(spec.coefficient(k))).epsilon(1e-12));
    }
}

TEST_CASE("lines at multiples of the chip rate vanish") {
    // 1023 kHz is a zero of the per-line sinc weight, so k = +-1023 carry
    // essentially no power compared to the strongest line.
    CaCode code = generate_ca_code(1);
    CodeSpectrum spec = code_spectrum(code);
    double peak = 0.0;
    for (int k = -spec.max_k(); k <= spec.max_k(); ++k) {
        peak = std::max(peak, std::abs(spec.coefficient(k)));
    }
    CHECK(std::abs(spec.coefficient(1023)) < 1e-6 * peak);
    CHECK(std::abs(spec.coefficient(-1023)) < 1e-6 * peak);
}

TEST_CASE("line powers track the sinc envelope within 3 dB in 100 kHz bins") {
    CaCode code = generate_ca_code(1);
    CodeSpectrum spec = code_spectrum(code);
    SincEnvelope env = make_sinc_envelope();
    for (int bin = -5; bin < 5; ++bin) {
        double lo = bin * 100e3, hi = lo + 100e3;
        double measured = 0.0, predicted = 0.0;
        int count = 0;
        for (int k = -spec.max_k(); k <= spec.max_k(); ++k) {
            double f = k * spec.line_spacing_hz;
            if (f < lo || f >= hi) continue;
            measured += spec.line_power(k);
            double e = env.value(f);
            predicted += e * e * kLineSpacingHz;
            ++count;
        }
        REQUIRE(count == 100);
        double ratio_db = linear_to_db(measured / predicted);
        CHECK(std::abs(ratio_db) < 3.0);
    }
}

TEST_CASE("nearest_line maps offsets to the closest 1 kHz index") {
    CaCode code = generate_ca_code(1);
    CodeSpectrum spec = code_spectrum(code);

    CHECK(spec.nearest_line(0.0) == 0);
    CHECK(spec.nearest_line(42e3 + 200.0) == 42);
    CHECK(spec.nearest_line(42e3 + 499.0) == 42);
    CHECK(spec.nearest_line(-1.7e3) == -2);
    CHECK(spec.nearest_line(2046e3) == 2046);

    CHECK_THROWS_AS(spec.nearest_line(2.5e6), OutOfSpanError);
    CHECK_THROWS_AS(spec.nearest_line(-2.5e6), OutOfSpanError);
}

TEST_CASE("envelope peak value and nulls") {
    SincEnvelope env = make_sinc_envelope();
    CHECK_REL(env.a0, std::sqrt(kChipPeriodS), 1e-12);
    CHECK_REL(env.value(0.0), 9.886e-4, 1e-3);
    CHECK(std::abs(env.value(1.023e6)) < 1e-12);
    CHECK(std::abs(env.value(-2.046e6)) < 1e-12);
    CHECK_REL(env.value(550e3) / env.a0, 0.5879231, 1e-6);
    CHECK(sinc_envelope(300e3) == env.value(300e3));
}

TEST_CASE("envelope squared integrates to unit power") {
    // The squared envelope is a probability-like density: integrating
    // a0^2 sinc^2(pi f T_a) over all frequency gives exactly 1. Split as a
    // finite quadrature plus the exact analytic tail bound 1/(pi^2 f T_a).
    SincEnvelope env = make_sinc_envelope();
    double cut = 1000.0 / kChipPeriodS;  // 1000 lobes out
    double body = adaptive_simpson(
        [&](double f) {
            double e = env.value(f);
            return e * e;
        },
        -cut, cut, 1e-10, 10e3);
    // Tail: integral of sin^2(x)/x^2 from X to inf equals 1/(2X) on average;
    // use the exact mean-value bound pair to pin it within 1e-7.
    double x_cut = M_PI * cut * kChipPeriodS;
    double tail = 2.0 * (1.0 / (2.0 * x_cut)) / M_PI;  // both sides, in normalized units
    CHECK(body + tail == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("strongest interior line of the first code sits at 42 kHz") {
    // Frozen from an independent spectral scan: the largest single line of
    // code 1 inside +-1 MHz (excluding DC) is k = +-42 at 5.77x the mean.
    CaCode code = generate_ca_code(1);
    CodeSpectrum spec = code_spectrum(code);
    CHECK_REL(spec.line_power(42), 5.643585e-3, 1e-4);
    CHECK_REL(spec.line_power(-42), 5.643585e-3, 1e-4);
}
