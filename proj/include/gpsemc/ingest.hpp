#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gpsemc/noise.hpp"
#include "gpsemc/units.hpp"

namespace gpsemc {

// One exported analyzer trace. Levels are either per-bin powers (dBm) or
// densities (dBm/Hz) at the capture plane; corrections_db lists gain and
// attenuation terms that move them to the plane the receiver model wants.
struct SpectrumCapture {
  struct Point {
    double frequency_hz = 0.0;  // absolute RF frequency
    double level = 0.0;
  };
  enum class Unit { dbm, dbm_per_hz };

  std::vector<Point> points;  // strictly increasing frequency
  Unit unit = Unit::dbm;
  double rbw_hz = 0.0;
  std::vector<double> corrections_db;
  std::string metadata;
};

// Documented capture CSV: '# unit: dBm|dBm/Hz', '# rbw_hz: <f>', optional
// repeatable '# correction_db: <f>', other '#' lines kept as metadata; then
// 'frequency_hz,level' rows. Violations raise ParseError naming the line.
SpectrumCapture parse_capture(std::istream& is, const std::string& source);
SpectrumCapture parse_capture_file(const std::string& path);

// Inverse of parse_capture for the fixtures and --emit-spectrum round trips.
void write_capture(std::ostream& os, const SpectrumCapture& cap);

struct IngestOptions {
  double carrier_hz = kL1CarrierHz;
  std::vector<double> extra_corrections_db;  // applied on top of the capture's own
  double band_half_hz = 25e6;                // analysis half-width around the carrier
  double floor_db = 40.0;                    // drop tones this far under the peak
  PhasePolicy phases = PhasePolicy::random;
  std::uint64_t seed = 1;
};

// Points inside the analysis band become tones at offset = f - carrier.
// dBm levels convert point-for-point (power = level + corrections). dBm/Hz
// levels are treated as a sampled density: each point owns its local spacing
// (an isolated point owns one rbw), neighbours are pooled into rbw-wide bins,
// and each bin becomes one tone at its power centroid — so over-dense traces
// do not multiply total power and the 1-tone-per-rbw economy of the analyzer
// is restored. Throws ConfigError when no point falls inside the band.
NoiseSpectrum to_noise_spectrum(const SpectrumCapture& cap, const IngestOptions& opt = {},
                                std::vector<std::string>* warnings = nullptr);

}  // namespace gpsemc
