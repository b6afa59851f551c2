#pragma once

#include <Eigen/Core>
#include <complex>
#include <string>

#include "gpsemc/units.hpp"

namespace gpsemc {

// One period of a GPS L1 C/A spreading code in antipodal form.
// Binary 1 maps to +1.0, binary 0 maps to -1.0.
struct CaCode {
  int prn = 0;
  Eigen::ArrayXd chips;  // length 1023, values exactly +/-1
  double chip_rate_hz = kChipRateHz;
  double chip_period_s = kChipPeriodS;
};

// Generates the C/A code for prn in [1, 32] with the dual 10-stage shift
// register construction (registers seeded all-ones, per-PRN output tap pair on
// the second register). Throws std::invalid_argument for unsupported PRNs.
CaCode generate_ca_code(int prn);

// Code as a 1023-character '0'/'1' string ('1' corresponds to chip +1).
std::string to_bit_string(const CaCode& code);

// Normalized circular correlations; values are integer multiples of 1/1023.
double autocorrelation(const CaCode& code, int lag);
double cross_correlation(const CaCode& a, const CaCode& b, int lag);

// Fourier-series line coefficients of the periodic +/-1 chip waveform with
// rectangular chip shaping. Lines sit on a 1 kHz grid (1 ms period); index k
// runs over [-1023*harmonic_span, 1023*harmonic_span]. Coefficients are
// renormalized so that the retained line powers sum to exactly 1.
struct CodeSpectrum {
  int prn = 0;
  int harmonic_span = 2;
  double line_spacing_hz = kLineSpacingHz;
  Eigen::ArrayXcd coeffs;  // index i holds line k = i - 1023*harmonic_span

  int max_k() const { return kCodeLength * harmonic_span; }
  std::complex<double> coefficient(int k) const { return coeffs[k + max_k()]; }
  double line_power(int k) const { return std::norm(coefficient(k)); }
  // Nearest 1 kHz line to a tone offset; throws OutOfSpanError past the span.
  int nearest_line(double offset_hz) const;
};

CodeSpectrum code_spectrum(const CaCode& code, int harmonic_span = 2);

// Continuous sinc envelope of the code spectrum, a0 * sinc(pi * f * T_chip).
// a0 = sqrt(T_chip) makes the integral of the squared envelope over all
// frequency equal one, i.e. the envelope is a unit-power spectral density.
// The mean power of an individual 1 kHz line is the squared envelope times the
// 1 kHz line spacing.
struct SincEnvelope {
  double a0 = 0.0;
  double chip_period_s = kChipPeriodS;
  double value(double f_hz) const;
};

SincEnvelope make_sinc_envelope();

// Convenience: default envelope amplitude at f_hz.
double sinc_envelope(double f_hz);

}  // namespace gpsemc
