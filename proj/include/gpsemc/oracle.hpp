#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gpsemc/cacode.hpp"
#include "gpsemc/cn0.hpp"
#include "gpsemc/noise.hpp"

namespace gpsemc {

// Sampled single-channel integrate-and-dump simulation used to check the
// analytic model from the waveform side. The synthesized complex baseband is
//   sqrt(P_s) * code(t) + sum_n sqrt(2 P_n) e^{j(2 pi f_n t + theta_n)} + w(t)
// with w(t) circular white Gaussian noise whose density is n0_w * t_s (the
// in-band power n0_w spread over the 1/t_s bandwidth, then extended flat
// across the full sample bandwidth).
struct SimConfig {
  double sample_rate_hz = 10e6;
  double t_d_s = 0.0;        // 0 -> use rx.t_d_s
  int n_integrations = 500;  // number of consecutive correlation windows
  std::uint64_t seed = 1;
  long code_phase_samples = 0;  // replica misalignment, 0 = aligned

  // factored evaluates the identical correlation sums tone-by-tone against the
  // periodic replica (exact algebraic regrouping, orders of magnitude faster);
  // per_sample synthesizes and correlates every sample. Results agree to
  // rounding; the noise draws differ in sequence but not in distribution.
  enum class Path { factored, per_sample } path = Path::factored;

  // When non-empty, per_sample synthesis streams the waveform to this file as
  // little-endian float32 I/Q pairs behind a small header (see README).
  std::string waveform_dump_path;
};

struct SimResult {
  double signal_peak_power_w = 0.0;   // squared clean aligned correlation peak
  double noise_power_w = 0.0;         // mean squared deviation from the clean peak
  double empirical_cn0_db_hz = 0.0;
  std::string metadata;               // estimator and noise-model notes
};

// Runs the simulation. Deterministic: identical inputs and seed give a
// bit-identical SimResult for a given path.
//
// Noise estimator: the per-window correlator outputs are compared against the
// known clean signal correlation (not the across-window mean), so statically
// coupled interference -- a tone sitting exactly on a spectral line produces a
// window-constant offset -- is counted as noise instead of leaking into the
// signal estimate. For fluctuating contributions this reduces to the ordinary
// across-window variance.
SimResult simulate(const CaCode& code, const NoiseSpectrum& noise,
                   const ReceiverParams& rx, const SimConfig& cfg);

// simulate() at each power offset applied to the template spectrum.
// Returns (offset_db, result) pairs in the order given.
std::vector<std::pair<double, SimResult>> sweep_power(
    const CaCode& code, const NoiseSpectrum& noise, const ReceiverParams& rx,
    const SimConfig& cfg, const std::vector<double>& power_offsets_db);

}  // namespace gpsemc
