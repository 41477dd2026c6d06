#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cellpool/deployment.hpp"
#include "cellpool/simulator.hpp"

namespace cellpool {

/// One parsed CSV row before projection.
struct BsRecord {
  int op = 1;
  double x = 0.0;  ///< m, or longitude in degrees
  double y = 0.0;  ///< m, or latitude in degrees
};

struct LayoutFile {
  std::vector<BaseStation> stations;
  std::vector<std::string> warnings;  ///< non-fatal: empty body, sites outside the region
  bool geographic = false;            ///< input was lat/lon
};

/// Mean Earth radius used by the projection, m.
inline constexpr double kEarthRadius = 6371008.8;

/// Reads `operator,x_m,y_m` or `operator,lat,lon` CSV. Geographic input is
/// projected equirectangularly about the sites' centroid, which is placed at
/// the region centre. Ids follow file order.
/// Throws ParseError (with line number) on malformed rows or headers.
LayoutFile load_bs_csv(const std::filesystem::path& path, const Region& region = {});
LayoutFile parse_bs_csv(std::string_view text, const Region& region = {});

/// Great-circle distance between two (lat, lon) points in degrees, m.
double haversine_distance(double lat1, double lon1, double lat2, double lon2);

/// "46 dBm" -> watts, "10 MHz" -> hertz and so on; `dimension` is one of
/// power, noise-density, frequency, length, decibel, rate. Throws ParseError.
double parse_quantity(std::string_view text, std::string_view dimension);

/// YAML scenario config. Missing keys take the defaults (32 subchannels,
/// 60 slots, 46 dBm, -174 dBm/Hz, 10 MHz, 8 dB, 30 frames, 5 runs).
/// Relative layout paths resolve against `base_dir`. Throws ValidationError
/// listing every bad field.
ScenarioConfig load_config(const std::filesystem::path& path);
ScenarioConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});

/// YAML text that parse_config turns back into an equal ScenarioConfig.
std::string serialize_config(const ScenarioConfig& config);

}  // namespace cellpool
