#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "gpsemc/cacode.hpp"
#include "gpsemc/cn0.hpp"
#include "gpsemc/noise.hpp"

namespace gpsemc {

enum class NoiseClass { narrowband, mesoband, broadband };

const char* to_string(NoiseClass cls);

// Occupied-bandwidth classification of a tone set. span_hz is the distance
// between the outermost tones, center_offset_hz the midpoint of that extent.
// disjoint flags spectra whose largest internal gap dwarfs the occupied span,
// for which a single-band classification would be misleading.
struct Classification {
  NoiseClass cls = NoiseClass::narrowband;
  double center_offset_hz = 0.0;
  double span_hz = 0.0;
  bool disjoint = false;
};

struct ClassifyOptions {
  double narrow_max_hz = 1e3;   // below: narrowband (under the line spacing)
  double meso_max_hz = 200e3;   // below: mesoband (main lobe / 10); above: broadband
};

Classification classify_spectrum(const NoiseSpectrum& s, const ClassifyOptions& opt = {});

// One limit line. Mesoband curves store (center offset, max total power dBm)
// points for a fixed noise bandwidth. Broadband curves store a single point
// whose level is a flat power *density* limit in dBm/Hz (bandwidth_hz == 0).
// All levels are at the antenna reference plane; gain_reference_db is the
// front-end gain that was removed when referring them there.
struct LimitCurve {
  NoiseClass noise_class = NoiseClass::mesoband;
  double bandwidth_hz = 0.0;
  std::vector<std::pair<double, double>> points;  // (offset_hz, level_dbm[/Hz])
  std::string baseline;                           // anchor-case description
  double gain_reference_db = 0.0;
  double threshold_db_hz = 0.0;  // C/N0 level the curve holds the receiver at

  double level_at(double offset_hz, const SincEnvelope& env,
                  std::vector<std::string>* warnings = nullptr) const;
};

struct Verdict {
  bool pass = false;
  double margin_db = 0.0;  // signed distance to the limit; >= 0 iff pass
  std::string worst_offender;
  double predicted_cn0_db_hz = 0.0;
  std::vector<std::string> warnings;
};

// Largest total power (dBm, antenna plane) the given spectral shape may carry
// while predicted C/N0 stays at or above threshold_db_hz. Bisection on the
// total power in dB until the predicted C/N0 lands within 0.05 dB of the
// threshold. The shape's absolute power is irrelevant; only its distribution
// matters. Throws ConfigError when the zero-interference C/N0 is already
// below the threshold; returns -infinity when it exactly equals it.
double find_baseline_limit_dbm(const NoiseSpectrum& shape, const ReceiverParams& rx,
                               double threshold_db_hz, const SincEnvelope& env);

// Transport a limit from one (center, bandwidth) cell to another:
//   new = base + 20 log10(env(center_from)/env(center_to))
//              - 10 log10(bw_to / bw_from).
// Weaker coupling at the target center raises the limit; more bandwidth at
// fixed PSD lowers it. Exactly additive under composition. Returns +infinity
// (with a warning) at an envelope null; warns when a bandwidth leaves the
// mesoband range [1 kHz, 200 kHz].
double scale_limit_dbm(double baseline_dbm, double from_center_hz, double from_bw_hz,
                       double to_center_hz, double to_bw_hz, const SincEnvelope& env,
                       std::vector<std::string>* warnings = nullptr);

// Mesoband limit curves: one per requested bandwidth, each sampled at the
// requested center offsets, all transported from the single baseline anchor.
std::vector<LimitCurve> build_limit_curve(double baseline_dbm, double baseline_center_hz,
                                          double baseline_bw_hz,
                                          const std::vector<double>& bandwidths_hz,
                                          const std::vector<double>& offsets_hz,
                                          const SincEnvelope& env, const ReceiverParams& rx,
                                          double threshold_db_hz,
                                          std::vector<std::string>* warnings = nullptr);

// Flat-density limit (dBm/Hz, antenna plane) holding predicted C/N0 at
// lol_threshold_db_hz when applied across +/- band_half_hz. The loss-of-lock
// level is deliberately distinct from the mesoband tracking threshold.
double broadband_anchor_dbm_hz(const ReceiverParams& rx, double lol_threshold_db_hz,
                               const SincEnvelope& env, double band_half_hz = 25e6);

LimitCurve broadband_limit_curve(const ReceiverParams& rx, double lol_threshold_db_hz,
                                 const SincEnvelope& env, double band_half_hz = 25e6);

// Direct compliance: predicted C/N0 from the model against the threshold.
// margin_db is how far the measured power could rise before hitting it.
Verdict check_compliance_direct(const NoiseSpectrum& measured, const ReceiverParams& rx,
                                double threshold_db_hz, const SincEnvelope& env);

// Curve compliance: classify the spectrum, pick the applicable curve, and
// compare integrated power (mesoband) or envelope-weighted density (broadband)
// against it. Narrowband, disjoint, or uncovered spectra fall back to the
// direct check with a warning, using the curve set's threshold.
Verdict check_compliance_curve(const NoiseSpectrum& measured, const ReceiverParams& rx,
                               const std::vector<LimitCurve>& curves,
                               const SincEnvelope& env, const ClassifyOptions& opt = {});

// Table serialization: header comments then one
// "offset_hz,bandwidth_hz,max_power_dbm,threshold_db_hz" row per point.
// Rows with bandwidth 0 carry the broadband density limit in dBm/Hz.
void write_limit_curves(std::ostream& os, const std::vector<LimitCurve>& curves);
std::vector<LimitCurve> read_limit_curves(std::istream& is, const std::string& source);
std::vector<LimitCurve> read_limit_curves_file(const std::string& path);

}  // namespace gpsemc
