#pragma once

#include <cmath>

namespace mafd {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kPi = 3.14159265358979323846;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double ratio) { return 10.0 * std::log10(ratio); }

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

inline double wavelength_from_ghz(double carrier_ghz) { return kSpeedOfLight / (carrier_ghz * 1e9); }

/// Rate threshold in bps/Hz to the SINR threshold 2^R - 1.
inline double sinr_threshold(double rate_bps_hz) { return std::exp2(rate_bps_hz) - 1.0; }

}  // namespace mafd
