#include "gpsemc/cn0.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

#include "gpsemc/errors.hpp"
#include "gpsemc/mathutil.hpp"
#include "gpsemc/rng.hpp"

namespace gpsemc {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

double nearest_line_delta(double offset_hz, double line_spacing_hz) {
  return offset_hz - std::llround(offset_hz / line_spacing_hz) * line_spacing_hz;
}

// Complex coupling amplitude of one tone at the correlator output. The
// squared magnitude is the tone's contribution to the SNR denominator; the
// argument carries the line phase so coherent sums are meaningful.
std::complex<double> tone_coupling(const Tone& t, const CodeSpectrum& spec,
                                   const ReceiverParams& rx) {
  const int k = spec.nearest_line(t.offset_hz);
  const double df = t.offset_hz - k * spec.line_spacing_hz;
  return std::sqrt(2.0 * t.power_w) * std::conj(spec.coefficient(k)) *
         sinc(kPi * df * rx.t_d_s);
}

// Envelope-mode coupling amplitude. The squared envelope is a density, so the
// mean power of the nearest line is env^2 * (1 kHz line spacing); folding the
// spacing in here keeps the envelope mode on the same absolute scale as the
// exact mode.
double tone_coupling(const Tone& t, const SincEnvelope& env, const ReceiverParams& rx) {
  const double df = nearest_line_delta(t.offset_hz, kLineSpacingHz);
  return std::sqrt(2.0 * t.power_w * kLineSpacingHz) * env.value(t.offset_hz) *
         sinc(kPi * df * rx.t_d_s);
}

template <typename Model>
double multitone_power(const NoiseSpectrum& noise, const Model& model,
                       const ReceiverParams& rx, int phase_realizations,
                       std::uint64_t seed) {
  rx.validate();
  if (phase_realizations < 0)
    throw std::invalid_argument("multitone_interference_power: realizations must be >= 0");
  const std::size_t n = noise.tones.size();
  if (n == 0) return 0.0;

  std::vector<std::complex<double>> amps(n);
  for (std::size_t i = 0; i < n; ++i)
    amps[i] = tone_coupling(noise.tones[i], model, rx);

  // A lone tone's output power is phase-independent.
  if (n == 1) return std::norm(amps[0]);

  if (phase_realizations == 0) {
    double acc = 0.0;
    for (const auto& a : amps) acc += std::norm(a);
    return acc;
  }

  if (phase_realizations == 1) {
    std::complex<double> sum(0.0, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      sum += amps[i] * std::polar(1.0, noise.tones[i].phase_rad);
    return std::norm(sum);
  }

  auto eng = make_engine(derive_seed(seed, 0x6d746f6eULL));
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  double acc = 0.0;
  for (int r = 0; r < phase_realizations; ++r) {
    std::complex<double> sum(0.0, 0.0);
    for (const auto& a : amps) sum += a * std::polar(1.0, u(eng));
    acc += std::norm(sum);
  }
  return acc / phase_realizations;
}

}  // namespace

void ReceiverParams::validate() const {
  if (!(t_d_s > 0.0) || !(t_s_s > 0.0))
    throw std::invalid_argument("ReceiverParams: integration times must be > 0");
  if (!(n0_w > 0.0))
    throw std::invalid_argument("ReceiverParams: thermal noise power must be > 0");
  if (!(p_s_w > 0.0))
    throw std::invalid_argument("ReceiverParams: signal power must be > 0");
}

double noise_power_from_density_dbm_hz(double density_dbm_hz, double t_s_s) {
  if (!(t_s_s > 0.0))
    throw std::invalid_argument("noise_power_from_density_dbm_hz: t_s must be > 0");
  return dbm_to_watts(density_dbm_hz) / t_s_s;
}

double cwi_correlator_power_exact(const Tone& tone, const CodeSpectrum& spec,
                                  const ReceiverParams& rx) {
  rx.validate();
  return std::norm(tone_coupling(tone, spec, rx));
}

double cwi_correlator_power_sinc(const Tone& tone, const SincEnvelope& env,
                                 const ReceiverParams& rx,
                                 std::optional<double> delta_f_override) {
  rx.validate();
  const double df = delta_f_override
                        ? *delta_f_override
                        : nearest_line_delta(tone.offset_hz, kLineSpacingHz);
  const double e = env.value(tone.offset_hz);
  const double s = sinc(kPi * df * rx.t_d_s);
  return 2.0 * tone.power_w * e * e * s * s;
}

double multitone_interference_power(const NoiseSpectrum& noise, const CodeSpectrum& spec,
                                    const ReceiverParams& rx, int phase_realizations,
                                    std::uint64_t seed) {
  return multitone_power(noise, spec, rx, phase_realizations, seed);
}

double multitone_interference_power(const NoiseSpectrum& noise, const SincEnvelope& env,
                                    const ReceiverParams& rx, int phase_realizations,
                                    std::uint64_t seed) {
  return multitone_power(noise, env, rx, phase_realizations, seed);
}

Cn0Result cn0_from_interference_power(double interference_power_w,
                                      const ReceiverParams& rx) {
  rx.validate();
  if (interference_power_w < 0.0)
    throw std::invalid_argument("cn0_from_interference_power: power must be >= 0");
  const double dopp = sinc(kPi * rx.doppler_hz * rx.t_d_s);
  const double snr = rx.p_s_w * dopp * dopp / (rx.n0_w + interference_power_w);
  Cn0Result res;
  res.snr_db = linear_to_db(snr);
  res.cn0_db_hz = res.snr_db + linear_to_db(1.0 / rx.t_s_s);
  res.interference_power_w = interference_power_w;
  res.thermal_power_w = rx.n0_w;
  return res;
}

Cn0Result cn0(const NoiseSpectrum& noise, const CodeSpectrum& spec,
              const ReceiverParams& rx, int phase_realizations, std::uint64_t seed) {
  return cn0_from_interference_power(
      multitone_interference_power(noise, spec, rx, phase_realizations, seed), rx);
}

Cn0Result cn0(const NoiseSpectrum& noise, const SincEnvelope& env,
              const ReceiverParams& rx, int phase_realizations, std::uint64_t seed) {
  return cn0_from_interference_power(
      multitone_interference_power(noise, env, rx, phase_realizations, seed), rx);
}

double mesoband_correlator_power(double center_offset_hz, double bandwidth_hz,
                                 double total_power_w, int n_tones,
                                 const SincEnvelope& env, const ReceiverParams& rx,
                                 MesobandMode mode, int realizations,
                                 std::uint64_t seed) {
  rx.validate();
  if (bandwidth_hz < kLineSpacingHz)
    throw MesobandRangeError("mesoband bandwidth below the 1 kHz line spacing; "
                             "model the source as a CWI instead");
  if (!(total_power_w > 0.0) || n_tones < 1)
    throw std::invalid_argument("mesoband_correlator_power: power and tone count must be > 0");

  const double e = env.value(center_offset_hz);
  // Per-tone coupled power with the line offset averaged out, times n_tones.
  const double scale = 2.0 * total_power_w * kLineSpacingHz * e * e;
  if (mode == MesobandMode::expectation)
    return scale * mean_sinc_sq_uniform(rx.t_d_s);

  if (realizations < 1)
    throw std::invalid_argument("mesoband_correlator_power: realizations must be >= 1");
  auto eng = make_engine(derive_seed(seed, 0x6d65736fULL));
  std::uniform_real_distribution<double> udf(0.0, 500.0);
  std::uniform_real_distribution<double> uph(0.0, kTwoPi);
  const double amp = std::sqrt(scale / n_tones);
  double acc = 0.0;
  for (int r = 0; r < realizations; ++r) {
    std::complex<double> sum(0.0, 0.0);
    for (int t = 0; t < n_tones; ++t)
      sum += amp * sinc(kPi * udf(eng) * rx.t_d_s) * std::polar(1.0, uph(eng));
    acc += std::norm(sum);
  }
  return acc / realizations;
}

double broadband_penalty_db(const std::vector<std::pair<double, double>>& psd_samples,
                            double baseline_psd_w_per_hz, const SincEnvelope& env,
                            double band_half_hz, double max_step_hz) {
  if (psd_samples.size() < 2)
    throw std::invalid_argument("broadband_penalty_db: need at least 2 samples");
  if (!(baseline_psd_w_per_hz > 0.0))
    throw std::invalid_argument("broadband_penalty_db: baseline psd must be > 0");
  for (std::size_t i = 0; i < psd_samples.size(); ++i) {
    if (!(psd_samples[i].second >= 0.0) || !std::isfinite(psd_samples[i].second))
      throw std::invalid_argument("broadband_penalty_db: psd samples must be finite and >= 0");
    if (i > 0 && !(psd_samples[i].first > psd_samples[i - 1].first))
      throw std::invalid_argument("broadband_penalty_db: samples must be strictly "
                                  "increasing in frequency");
  }

  // sqrt(P)/sqrt(p0) interpolated linearly between samples, zero outside.
  auto rel_amp = [&](double f) -> double {
    if (f < psd_samples.front().first || f > psd_samples.back().first) return 0.0;
    auto it = std::lower_bound(
        psd_samples.begin(), psd_samples.end(), f,
        [](const std::pair<double, double>& s, double x) { return s.first < x; });
    if (it == psd_samples.begin()) ++it;
    const auto& [f1, p1] = *(it - 1);
    const auto& [f2, p2] = *it;
    const double w = (f - f1) / (f2 - f1);
    const double a = (1.0 - w) * std::sqrt(p1) + w * std::sqrt(p2);
    return a / std::sqrt(baseline_psd_w_per_hz);
  };
  auto env_sq = [&](double f) { const double e = env.value(f); return e * e; };

  const double lo = std::max(-band_half_hz, psd_samples.front().first);
  const double hi = std::min(band_half_hz, psd_samples.back().first);
  if (!(hi > lo))
    throw std::invalid_argument("broadband_penalty_db: samples do not overlap the band");

  const double num = adaptive_simpson(
      [&](double f) { const double a = rel_amp(f); return a * a * env_sq(f); },
      lo, hi, 1e-9, max_step_hz);
  const double den = adaptive_simpson(env_sq, -band_half_hz, band_half_hz, 1e-9,
                                      max_step_hz);
  if (!(num > 0.0)) return -std::numeric_limits<double>::infinity();
  return linear_to_db(num / den);
}

}  // namespace gpsemc
