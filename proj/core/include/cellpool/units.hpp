#pragma once

#include <cmath>

// Conversions used at configuration boundaries. Everything past ingest is
// linear SI (W, Hz, m, W/Hz).
namespace cellpool::units {

inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watt_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

inline constexpr double kMHz = 1e6;
inline constexpr double kKm = 1e3;

}  // namespace cellpool::units
