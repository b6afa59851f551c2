#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gpsemc {

// One interference tone. offset_hz is relative to the GPS L1 carrier; power_w
// is the tone power referred to whatever plane the caller is working at.
struct Tone {
  double offset_hz = 0.0;
  double power_w = 0.0;
  double phase_rad = 0.0;  // normalized into [0, 2*pi)
};

// A discrete multi-tone stand-in for an interference spectrum. Tones are kept
// sorted by offset and offsets are unique.
struct NoiseSpectrum {
  std::vector<Tone> tones;
  std::string label;
};

enum class PhasePolicy { zero, random };

// Validates, sorts by offset, and rejects duplicate offsets / negative powers.
NoiseSpectrum make_noise_spectrum(std::vector<Tone> tones, std::string label = "");

// Single continuous-wave interferer.
NoiseSpectrum make_cwi(double power_w, double offset_hz, double phase_rad = 0.0);

// n_tones equally spaced tones spanning bandwidth_hz around center_hz with the
// total power split evenly. Spacing bandwidth/(n_tones-1) should stay below
// the 1 kHz line spacing so every spectral line in the band sees a tone; a
// warning is appended when that or the >= 1 kHz mesoband floor is violated.
NoiseSpectrum make_mesoband(double center_offset_hz, double bandwidth_hz,
                            double total_power_w, int n_tones,
                            PhasePolicy policy = PhasePolicy::random,
                            std::uint64_t seed = 1,
                            std::vector<std::string>* warnings = nullptr);

// Flat power spectral density psd_w_per_hz represented by tones every
// tone_spacing_hz (power psd*spacing each). Total power matches psd*bandwidth
// to within one spacing quantum. Spacing should not exceed the reciprocal of
// the integration time so the band is resolved at the correlator output.
NoiseSpectrum make_rectangular(double center_offset_hz, double bandwidth_hz,
                               double psd_w_per_hz, double tone_spacing_hz,
                               PhasePolicy policy = PhasePolicy::random,
                               std::uint64_t seed = 1);

// Returns a copy with every tone power scaled by delta_db (phases preserved).
NoiseSpectrum scale_power(const NoiseSpectrum& s, double delta_db);

// Sum of tone powers in watts.
double total_power(const NoiseSpectrum& s);

}  // namespace gpsemc
