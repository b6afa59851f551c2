#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "gpsemc/cacode.hpp"
#include "gpsemc/noise.hpp"
#include "gpsemc/units.hpp"

namespace gpsemc {

// Receiver operating point. All powers are referred to the correlator input;
// front_end_gain_db records the gain between the antenna reference plane and
// that point so results can be quoted at either plane (the conversion is done
// once, by the limits / reporting layer, never inside the C/N0 math).
//
// Signal convention: the GPS signal contributes sqrt(P_s)*code(t) to the
// complex baseband input, while a tone of power P contributes the rotating
// phasor sqrt(2P)*e^{j(2 pi f t + theta)}. n0_w is the thermal noise power
// falling in the 1/t_s predetection bandwidth.
struct ReceiverParams {
  double t_d_s = 5e-3;       // coherent integration time
  double t_s_s = 5e-3;       // predetection interval used for the C/N0 conversion
  double n0_w = 0.0;         // in-band thermal noise power at the correlator
  double p_s_w = 0.0;        // GPS signal power at the correlator
  double doppler_hz = 0.0;   // residual carrier offset (signal attenuation only)
  double front_end_gain_db = 55.0;
  double cn0_floor_db_hz = 35.0;  // tracking threshold used by limit searches

  void validate() const;
};

// Thermal power over the 1/t_s bandwidth from a noise density in dBm/Hz.
double noise_power_from_density_dbm_hz(double density_dbm_hz, double t_s_s);

struct Cn0Result {
  double cn0_db_hz = 0.0;
  double snr_db = 0.0;
  double interference_power_w = 0.0;  // correlator-output interference power
  double thermal_power_w = 0.0;       // n0 term of the SNR denominator
};

// Correlator-output power of a single tone through its nearest spectral line:
//   2 * P * |C_k|^2 * sinc^2(pi * df * t_d),   df = offset - k * 1 kHz.
// Throws OutOfSpanError when the tone lies beyond the spectrum's span.
double cwi_correlator_power_exact(const Tone& tone, const CodeSpectrum& spec,
                                  const ReceiverParams& rx);

// Envelope form of the same quantity with the line coefficient replaced by the
// continuous unit-power envelope:
//   2 * P * a0^2 * sinc^2(pi * f * T_chip) * sinc^2(pi * df * t_d).
// Because the envelope is a per-hertz density, this value is the line-coupled
// power divided by the 1 kHz line spacing; multiply by 1 kHz to compare with
// cwi_correlator_power_exact. The frequency-shape factors are what matter
// here, and they are shared with the multitone envelope path below (which
// applies the line-spacing scale so the two modes agree in absolute terms).
// delta_f_override substitutes a chosen line offset for the one derived from
// the tone frequency.
double cwi_correlator_power_sinc(const Tone& tone, const SincEnvelope& env,
                                 const ReceiverParams& rx,
                                 std::optional<double> delta_f_override = {});

// Correlator-output interference power of a multi-tone spectrum.
//
// phase_realizations semantics:
//   0  -> phase-averaged expectation, sum of per-tone powers (no RNG);
//   1  -> single coherent sum using the phases stored on the tones;
//   >1 -> mean over that many seeded random-phase realizations.
// A single-tone spectrum short-circuits to the phase-free tone power.
double multitone_interference_power(const NoiseSpectrum& noise, const CodeSpectrum& spec,
                                    const ReceiverParams& rx,
                                    int phase_realizations = 1000,
                                    std::uint64_t seed = 1);
double multitone_interference_power(const NoiseSpectrum& noise, const SincEnvelope& env,
                                    const ReceiverParams& rx,
                                    int phase_realizations = 1000,
                                    std::uint64_t seed = 1);

// Predicted C/N0 for a given correlator-output interference power:
//   SNR  = P_s * L_dopp / (n0 + P_int),  L_dopp = sinc^2(pi * doppler * t_d)
//   C/N0 = SNR + 10 log10(1 / t_s).
Cn0Result cn0_from_interference_power(double interference_power_w,
                                      const ReceiverParams& rx);

// End-to-end C/N0 for a spectrum, exact-line or envelope mode.
Cn0Result cn0(const NoiseSpectrum& noise, const CodeSpectrum& spec,
              const ReceiverParams& rx, int phase_realizations = 1000,
              std::uint64_t seed = 1);
Cn0Result cn0(const NoiseSpectrum& noise, const SincEnvelope& env,
              const ReceiverParams& rx, int phase_realizations = 1000,
              std::uint64_t seed = 1);

enum class MesobandMode { expectation, monte_carlo };

// Band-limited noise narrow enough that the envelope is flat across it, wide
// enough to straddle at least one spectral line (>= 1 kHz, else
// MesobandRangeError). Each of the n_tones sub-tones couples through the
// nearest line with a line offset modeled as uniform on [0, 500 Hz) and a
// uniform random phase. expectation mode evaluates E|sum|^2 = sum E|x|^2 in
// closed form (tones independent); monte_carlo averages seeded realizations.
double mesoband_correlator_power(double center_offset_hz, double bandwidth_hz,
                                 double total_power_w, int n_tones,
                                 const SincEnvelope& env, const ReceiverParams& rx,
                                 MesobandMode mode = MesobandMode::expectation,
                                 int realizations = 1000, std::uint64_t seed = 1);

// Coupling-weighted comparison of a measured broadband shape P(f) against a
// flat density p0 over the integration band:
//   10 log10( integral P(f) sinc^2(pi f T_chip) df /
//             integral p0  sinc^2(pi f T_chip) df ).
// psd_samples are (offset_hz, psd_w_per_hz) pairs; sqrt(P) is interpolated
// linearly between samples and P is taken as zero outside them. Quadrature is
// adaptive Simpson with panels never wider than max_step_hz.
double broadband_penalty_db(const std::vector<std::pair<double, double>>& psd_samples,
                            double baseline_psd_w_per_hz,
                            const SincEnvelope& env,
                            double band_half_hz = 25e6,
                            double max_step_hz = 10e3);

}  // namespace gpsemc
