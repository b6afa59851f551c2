#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "gpsemc/errors.hpp"
#include "gpsemc/noise.hpp"
#include "testutil.hpp"
#include "gpsemc/units.hpp"

using namespace gpsemc;

TEST_CASE("make_noise_spectrum sorts tones and keeps phases in [0, 2pi)") {
    std::vector<Tone> tones = {
        {5e3, 1e-9, 7.0},      // phase wraps to 7 - 2*pi
        {-2e3, 2e-9, -1.0},    // phase wraps to 2*pi - 1
        {0.0, 3e-9, 2.0 * M_PI},
    };
    NoiseSpectrum s = make_noise_spectrum(tones, "mix");
    REQUIRE(s.tones.size() == 3);
    CHECK(s.label == "mix");
    CHECK(s.tones[0].offset_hz == -2e3);
    CHECK(s.tones[1].offset_hz == 0.0);
    CHECK(s.tones[2].offset_hz == 5e3);
    for (const Tone& t : s.tones) {
        CHECK(t.phase_rad >= 0.0);
        CHECK(t.phase_rad < 2.0 * M_PI);
    }
    CHECK(s.tones[0].phase_rad == doctest::Approx(2.0 * M_PI - 1.0).epsilon(1e-12));
    CHECK(s.tones[2].phase_rad == doctest::Approx(7.0 - 2.0 * M_PI).epsilon(1e-12));
}

TEST_CASE("duplicate offsets and negative powers are rejected") {
    CHECK_THROWS_AS(make_noise_spectrum({{1e3, 1e-9, 0.0}, {1e3, 2e-9, 0.0}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_noise_spectrum({{0.0, -1e-9, 0.0}}), std::invalid_argument);
    // Zero-power tones are allowed (they simply contribute nothing).
    CHECK_NOTHROW(make_noise_spectrum({{0.0, 0.0, 0.0}}));
}

TEST_CASE("make_cwi builds exactly one tone") {
    NoiseSpectrum s = make_cwi(2.5e-10, 42e3, 1.25);
    REQUIRE(s.tones.size() == 1);
    CHECK(s.tones[0].offset_hz == 42e3);
    CHECK(s.tones[0].power_w == 2.5e-10);
    CHECK(s.tones[0].phase_rad == doctest::Approx(1.25));
    CHECK_REL(total_power(s), 2.5e-10, 1e-15);
}

TEST_CASE("mesoband tone comb: count, spacing, and exact power split") {
    const double total = 1e-9;
    NoiseSpectrum s = make_mesoband(550e3, 20e3, total, 42, PhasePolicy::zero, 7);
    REQUIRE(s.tones.size() == 42);
    double spacing = 20e3 / 41.0;
    CHECK(spacing == doctest::Approx(487.8).epsilon(1e-3));
    for (std::size_t i = 0; i < s.tones.size(); ++i) {
        CHECK(s.tones[i].offset_hz ==
              doctest::Approx(540e3 + static_cast<double>(i) * spacing).epsilon(1e-12));
        CHECK_REL(s.tones[i].power_w, total / 42.0, 1e-12);
        CHECK(s.tones[i].phase_rad == 0.0);
    }
    CHECK(s.tones.front().offset_hz == doctest::Approx(540e3));
    CHECK(s.tones.back().offset_hz == doctest::Approx(560e3));
    CHECK_REL(total_power(s), total, 1e-12);
}

TEST_CASE("mesoband warnings: sub-1kHz band and unresolved spacing") {
    std::vector<std::string> warnings;
    make_mesoband(0.0, 500.0, 1e-9, 5, PhasePolicy::zero, 1, &warnings);
    CHECK(!warnings.empty());

    warnings.clear();
    // 3 tones over 10 kHz puts the spacing at 5 kHz, far above the 1 kHz
    // line spacing: lines between tones would see no excitation.
    make_mesoband(0.0, 10e3, 1e-9, 3, PhasePolicy::zero, 1, &warnings);
    CHECK(!warnings.empty());

    warnings.clear();
    make_mesoband(0.0, 20e3, 1e-9, 42, PhasePolicy::zero, 1, &warnings);
    CHECK(warnings.empty());
}

TEST_CASE("mesoband rejects non-physical arguments") {
    CHECK_THROWS_AS(make_mesoband(0.0, -1.0, 1e-9, 5), std::invalid_argument);
    CHECK_THROWS_AS(make_mesoband(0.0, 20e3, -1e-9, 5), std::invalid_argument);
    CHECK_THROWS_AS(make_mesoband(0.0, 20e3, 1e-9, 1), std::invalid_argument);
}

TEST_CASE("random phases are deterministic per seed and differ across seeds") {
    NoiseSpectrum a1 = make_mesoband(0.0, 20e3, 1e-9, 42, PhasePolicy::random, 11);
    NoiseSpectrum a2 = make_mesoband(0.0, 20e3, 1e-9, 42, PhasePolicy::random, 11);
    NoiseSpectrum b = make_mesoband(0.0, 20e3, 1e-9, 42, PhasePolicy::random, 12);
    bool same = true, differs = false;
    for (std::size_t i = 0; i < a1.tones.size(); ++i) {
        same = same && a1.tones[i].phase_rad == a2.tones[i].phase_rad;
        differs = differs || a1.tones[i].phase_rad != b.tones[i].phase_rad;
        CHECK(a1.tones[i].phase_rad >= 0.0);
        CHECK(a1.tones[i].phase_rad < 2.0 * M_PI);
    }
    CHECK(same);
    CHECK(differs);
}

TEST_CASE("rectangular comb realizes a flat density") {
    const double psd = 1e-14;
    NoiseSpectrum s = make_rectangular(0.0, 100e3, psd, 200.0, PhasePolicy::zero);
    REQUIRE(s.tones.size() == 501);
    for (const Tone& t : s.tones) {
        CHECK_REL(t.power_w, psd * 200.0, 1e-12);
    }
    CHECK(s.tones.front().offset_hz == doctest::Approx(-50e3));
    CHECK(s.tones.back().offset_hz == doctest::Approx(50e3));
    // Total power equals psd * bandwidth up to the half-spacing overhang at
    // each band edge.
    CHECK_REL(total_power(s), psd * 100e3 * 501.0 / 500.0, 1e-9);
}

TEST_CASE("rectangular comb validates inputs") {
    CHECK_THROWS_AS(make_rectangular(0.0, 100e3, 1e-14, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_rectangular(0.0, 100e3, -1e-14, 200.0), std::invalid_argument);
    CHECK_THROWS_AS(make_rectangular(0.0, 0.0, 1e-14, 200.0), std::invalid_argument);
}

TEST_CASE("scale_power shifts every tone by the same dB amount") {
    NoiseSpectrum s = make_mesoband(0.0, 20e3, 1e-9, 42, PhasePolicy::random, 5);
    NoiseSpectrum up = scale_power(s, 10.0);
    NoiseSpectrum back = scale_power(up, -10.0);
    REQUIRE(up.tones.size() == s.tones.size());
    for (std::size_t i = 0; i < s.tones.size(); ++i) {
        CHECK_REL(up.tones[i].power_w, 10.0 * s.tones[i].power_w, 1e-12);
        CHECK(up.tones[i].phase_rad == s.tones[i].phase_rad);
        CHECK(up.tones[i].offset_hz == s.tones[i].offset_hz);
        CHECK_REL(back.tones[i].power_w, s.tones[i].power_w, 1e-12);
    }
    CHECK_REL(total_power(up), 1e-8, 1e-12);
}

TEST_CASE("total_power sums tone powers") {
    NoiseSpectrum s = make_noise_spectrum({{0.0, 1e-9, 0}, {1e3, 2e-9, 0}, {2e3, 3e-9, 0}});
    CHECK_REL(total_power(s), 6e-9, 1e-15);
    CHECK(total_power(NoiseSpectrum{}) == 0.0);
}
