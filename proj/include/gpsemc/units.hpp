#pragma once

#include <cmath>

namespace gpsemc {

// GPS L1 C/A constants.
inline constexpr int kCodeLength = 1023;            // chips per code period
inline constexpr double kChipRateHz = 1.023e6;      // chipping rate
inline constexpr double kChipPeriodS = 1.0 / kChipRateHz;
inline constexpr double kCodePeriodS = 1e-3;        // one code epoch
inline constexpr double kLineSpacingHz = 1e3;       // spectral line spacing of the 1 ms period
inline constexpr double kL1CarrierHz = 1575.42e6;

// Power ratios are always 10*log10; amplitude ratios are never exposed in dB.
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double ratio) { return 10.0 * std::log10(ratio); }
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

}  // namespace gpsemc
