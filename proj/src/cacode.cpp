#include "gpsemc/cacode.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "gpsemc/errors.hpp"
#include "gpsemc/mathutil.hpp"

namespace gpsemc {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Output tap pair on the second register, indexed by PRN (1-based).
constexpr std::array<std::pair<int, int>, 33> kG2Taps = {{
    {0, 0},            // unused
    {2, 6},  {3, 7},  {4, 8},  {5, 9},  {1, 9},  {2, 10}, {1, 8},  {2, 9},
    {3, 10}, {2, 3},  {3, 4},  {5, 6},  {6, 7},  {7, 8},  {8, 9},  {9, 10},
    {1, 4},  {2, 5},  {3, 6},  {4, 7},  {5, 8},  {6, 9},  {1, 3},  {4, 6},
    {5, 7},  {6, 8},  {7, 9},  {8, 10}, {1, 6},  {2, 7},  {3, 8},  {4, 9},
}};

}  // namespace

CaCode generate_ca_code(int prn) {
  if (prn < 1 || prn > 32)
    throw std::invalid_argument("generate_ca_code: prn must be in [1, 32], got " +
                                std::to_string(prn));
  const auto [t1, t2] = kG2Taps[static_cast<std::size_t>(prn)];

  std::array<int, 10> g1, g2;
  g1.fill(1);
  g2.fill(1);

  CaCode code;
  code.prn = prn;
  code.chips.resize(kCodeLength);
  for (int i = 0; i < kCodeLength; ++i) {
    const int out = g1[9] ^ (g2[t1 - 1] ^ g2[t2 - 1]);
    code.chips[i] = out ? 1.0 : -1.0;
    const int fb1 = g1[2] ^ g1[9];
    const int fb2 = g2[1] ^ g2[2] ^ g2[5] ^ g2[7] ^ g2[8] ^ g2[9];
    for (int s = 9; s > 0; --s) {
      g1[s] = g1[s - 1];
      g2[s] = g2[s - 1];
    }
    g1[0] = fb1;
    g2[0] = fb2;
  }
  return code;
}

std::string to_bit_string(const CaCode& code) {
  std::string s(kCodeLength, '0');
  for (int i = 0; i < kCodeLength; ++i)
    if (code.chips[i] > 0.0) s[static_cast<std::size_t>(i)] = '1';
  return s;
}

namespace {

// Circular correlation via a doubled copy of one sequence; sums of +/-1
// products stay integral, so results are exact multiples of 1/1023.
double circular_correlation(const Eigen::ArrayXd& a, const Eigen::ArrayXd& b, int lag) {
  const int n = kCodeLength;
  int l = lag % n;
  if (l < 0) l += n;
  Eigen::ArrayXd doubled(2 * n);
  doubled << b, b;
  const double acc = (a * doubled.segment(l, n)).sum();
  return acc / n;
}

}  // namespace

double autocorrelation(const CaCode& code, int lag) {
  return circular_correlation(code.chips, code.chips, lag);
}

double cross_correlation(const CaCode& a, const CaCode& b, int lag) {
  return circular_correlation(a.chips, b.chips, lag);
}

int CodeSpectrum::nearest_line(double offset_hz) const {
  const int k = static_cast<int>(std::llround(offset_hz / line_spacing_hz));
  if (std::abs(k) > max_k())
    throw OutOfSpanError("tone offset " + std::to_string(offset_hz) +
                         " Hz is outside the +/-" +
                         std::to_string(max_k() * line_spacing_hz) +
                         " Hz harmonic span");
  return k;
}

CodeSpectrum code_spectrum(const CaCode& code, int harmonic_span) {
  if (harmonic_span < 1)
    throw std::invalid_argument("code_spectrum: harmonic_span must be >= 1");

  // DFT of the chip sequence; reused for every alias k + 1023*m.
  Eigen::ArrayXcd dft(kCodeLength);
  for (int k = 0; k < kCodeLength; ++k) {
    std::complex<double> acc(0.0, 0.0);
    const double w = -2.0 * kPi * k / kCodeLength;
    for (int m = 0; m < kCodeLength; ++m)
      acc += code.chips[m] * std::polar(1.0, w * m);
    dft[k] = acc;
  }

  CodeSpectrum spec;
  spec.prn = code.prn;
  spec.harmonic_span = harmonic_span;
  const int kmax = spec.max_k();
  spec.coeffs.resize(2 * kmax + 1);

  // Line k of the chip waveform: (1/1023) * sinc(pi k/1023) * e^{-i pi k/1023}
  // * DFT(k mod 1023). The rectangular chip contributes the sinc rolloff and
  // the half-chip phase ramp.
  for (int k = -kmax; k <= kmax; ++k) {
    int km = k % kCodeLength;
    if (km < 0) km += kCodeLength;
    const double x = kPi * k / kCodeLength;
    spec.coeffs[k + kmax] =
        (sinc(x) / kCodeLength) * std::polar(1.0, -x) * dft[km];
  }

  const double total = spec.coeffs.abs2().sum();
  spec.coeffs /= std::sqrt(total);
  return spec;
}

double SincEnvelope::value(double f_hz) const {
  return a0 * sinc(kPi * f_hz * chip_period_s);
}

SincEnvelope make_sinc_envelope() {
  SincEnvelope env;
  env.a0 = std::sqrt(kChipPeriodS);
  env.chip_period_s = kChipPeriodS;
  return env;
}

double sinc_envelope(double f_hz) { return make_sinc_envelope().value(f_hz); }

}  // namespace gpsemc
