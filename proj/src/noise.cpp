#include "gpsemc/noise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gpsemc/rng.hpp"
#include "gpsemc/units.hpp"

namespace gpsemc {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

double normalize_phase(double phase) {
  double p = std::fmod(phase, kTwoPi);
  if (p < 0.0) p += kTwoPi;
  return p;
}

std::vector<double> draw_phases(int n, PhasePolicy policy, std::uint64_t seed) {
  std::vector<double> phases(static_cast<std::size_t>(n), 0.0);
  if (policy == PhasePolicy::random) {
    auto eng = make_engine(derive_seed(seed, 0x70686173ULL));  // phase stream
    std::uniform_real_distribution<double> u(0.0, kTwoPi);
    for (auto& p : phases) p = u(eng);
  }
  return phases;
}

}  // namespace

NoiseSpectrum make_noise_spectrum(std::vector<Tone> tones, std::string label) {
  for (auto& t : tones) {
    if (!(t.power_w >= 0.0) || !std::isfinite(t.power_w))
      throw std::invalid_argument("make_noise_spectrum: tone power must be finite and >= 0");
    if (!std::isfinite(t.offset_hz))
      throw std::invalid_argument("make_noise_spectrum: tone offset must be finite");
    t.phase_rad = normalize_phase(t.phase_rad);
  }
  std::sort(tones.begin(), tones.end(),
            [](const Tone& a, const Tone& b) { return a.offset_hz < b.offset_hz; });
  for (std::size_t i = 1; i < tones.size(); ++i)
    if (tones[i].offset_hz == tones[i - 1].offset_hz)
      throw std::invalid_argument("make_noise_spectrum: duplicate tone offset " +
                                  std::to_string(tones[i].offset_hz) + " Hz");
  NoiseSpectrum s;
  s.tones = std::move(tones);
  s.label = std::move(label);
  return s;
}

NoiseSpectrum make_cwi(double power_w, double offset_hz, double phase_rad) {
  if (!(power_w > 0.0))
    throw std::invalid_argument("make_cwi: power must be > 0");
  return make_noise_spectrum({Tone{offset_hz, power_w, phase_rad}}, "cwi");
}

NoiseSpectrum make_mesoband(double center_offset_hz, double bandwidth_hz,
                            double total_power_w, int n_tones, PhasePolicy policy,
                            std::uint64_t seed, std::vector<std::string>* warnings) {
  if (!(bandwidth_hz > 0.0) || !(total_power_w > 0.0))
    throw std::invalid_argument("make_mesoband: bandwidth and power must be > 0");
  if (n_tones < 2)
    throw std::invalid_argument("make_mesoband: need at least 2 tones");
  if (warnings) {
    if (bandwidth_hz < kLineSpacingHz)
      warnings->push_back("mesoband bandwidth below the 1 kHz line spacing; "
                          "a single-tone (CWI) model is more appropriate");
    if (bandwidth_hz / (n_tones - 1) >= kLineSpacingHz)
      warnings->push_back("tone spacing >= 1 kHz line spacing; some spectral "
                          "lines in the band will not see a tone");
  }

  const double spacing = bandwidth_hz / (n_tones - 1);
  const double per_tone = total_power_w / n_tones;
  const auto phases = draw_phases(n_tones, policy, seed);
  std::vector<Tone> tones;
  tones.reserve(static_cast<std::size_t>(n_tones));
  for (int i = 0; i < n_tones; ++i)
    tones.push_back(Tone{center_offset_hz - bandwidth_hz / 2.0 + i * spacing,
                         per_tone, phases[static_cast<std::size_t>(i)]});
  return make_noise_spectrum(std::move(tones), "mesoband");
}

NoiseSpectrum make_rectangular(double center_offset_hz, double bandwidth_hz,
                               double psd_w_per_hz, double tone_spacing_hz,
                               PhasePolicy policy, std::uint64_t seed) {
  if (!(bandwidth_hz > 0.0) || !(psd_w_per_hz > 0.0) || !(tone_spacing_hz > 0.0))
    throw std::invalid_argument("make_rectangular: bandwidth, psd and spacing must be > 0");
  const int n = static_cast<int>(std::llround(bandwidth_hz / tone_spacing_hz)) + 1;
  const double per_tone = psd_w_per_hz * tone_spacing_hz;
  const auto phases = draw_phases(n, policy, seed);
  std::vector<Tone> tones;
  tones.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    tones.push_back(Tone{center_offset_hz - bandwidth_hz / 2.0 + i * tone_spacing_hz,
                         per_tone, phases[static_cast<std::size_t>(i)]});
  return make_noise_spectrum(std::move(tones), "rectangular");
}

NoiseSpectrum scale_power(const NoiseSpectrum& s, double delta_db) {
  NoiseSpectrum out = s;
  const double factor = db_to_linear(delta_db);
  for (auto& t : out.tones) t.power_w *= factor;
  return out;
}

double total_power(const NoiseSpectrum& s) {
  double acc = 0.0;
  for (const auto& t : s.tones) acc += t.power_w;
  return acc;
}

}  // namespace gpsemc
