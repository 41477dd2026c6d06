#include "cellpool/ingest.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "cellpool/errors.hpp"
#include "cellpool/units.hpp"

namespace cellpool {

namespace {

using std::numbers::pi;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) return out;
    start = comma + 1;
  }
}

std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Shortest text that parses back to exactly `v`.
std::string exact(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

double haversine_distance(double lat1, double lon1, double lat2, double lon2) {
  const double p1 = lat1 * pi / 180.0, p2 = lat2 * pi / 180.0;
  const double dp = p2 - p1, dl = (lon2 - lon1) * pi / 180.0;
  const double a = std::sin(dp / 2) * std::sin(dp / 2) + std::cos(p1) * std::cos(p2) * std::sin(dl / 2) * std::sin(dl / 2);
  return 2.0 * kEarthRadius * std::asin(std::min(1.0, std::sqrt(a)));
}

LayoutFile parse_bs_csv(std::string_view text, const Region& region) {
  LayoutFile out;
  std::vector<BsRecord> records;
  std::size_t line_no = 0;
  bool have_header = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split_commas(line);
    if (!have_header) {
      std::vector<std::string> names;
      for (auto f : fields) names.push_back(lower(f));
      if (names == std::vector<std::string>{"operator", "x_m", "y_m"}) {
        out.geographic = false;
      } else if (names == std::vector<std::string>{"operator", "lat", "lon"}) {
        out.geographic = true;
      } else {
        throw ParseError("unknown header '" + std::string(line) + "'; expected operator,x_m,y_m or operator,lat,lon",
                         line_no);
      }
      have_header = true;
      continue;
    }
    if (fields.size() != 3) throw ParseError("expected 3 fields", line_no);
    const auto op = parse_number(fields[0]);
    const auto a = parse_number(fields[1]);
    const auto b = parse_number(fields[2]);
    if (!op || (*op != 1.0 && *op != 2.0)) throw ParseError("operator must be 1 or 2", line_no);
    if (!a || !b) throw ParseError("coordinates must be finite numbers", line_no);
    if (out.geographic && (std::abs(*a) > 90.0 || std::abs(*b) > 180.0))
      throw ParseError("latitude/longitude out of range", line_no);
    // Geographic rows carry (lat, lon); keep x = lon, y = lat.
    records.push_back(out.geographic ? BsRecord{static_cast<int>(*op), *b, *a} : BsRecord{static_cast<int>(*op), *a, *b});
  }
  if (!have_header) throw ParseError("missing header row", 0);
  if (records.empty()) {
    out.warnings.emplace_back("layout file has no base stations");
    return out;
  }

  if (out.geographic) {
    double lat0 = 0.0, lon0 = 0.0;
    for (const BsRecord& r : records) {
      lat0 += r.y;
      lon0 += r.x;
    }
    lat0 /= static_cast<double>(records.size());
    lon0 /= static_cast<double>(records.size());
    const double k = kEarthRadius * pi / 180.0;
    for (BsRecord& r : records) {
      const double x = k * (r.x - lon0) * std::cos(lat0 * pi / 180.0);
      const double y = k * (r.y - lat0);
      r.x = x + region.width / 2.0;
      r.y = y + region.height / 2.0;
    }
  }
  int id = 0;
  for (const BsRecord& r : records) {
    BaseStation bs{id, r.op, {r.x, r.y}, {}};
    if (!region.contains(bs.position))
      out.warnings.push_back("base station " + std::to_string(id) + " lies outside the region");
    out.stations.push_back(bs);
    ++id;
  }
  return out;
}

LayoutFile load_bs_csv(const std::filesystem::path& path, const Region& region) {
  return parse_bs_csv(read_file(path), region);
}

double parse_quantity(std::string_view text, std::string_view dimension) {
  const std::string_view t = trim(text);
  std::size_t split = 0;
  while (split < t.size() && (std::isdigit(static_cast<unsigned char>(t[split])) || t[split] == '.' || t[split] == '-' ||
                              t[split] == '+' || t[split] == 'e' || t[split] == 'E')) {
    // an 'e' only belongs to the number when followed by a digit or sign
    if ((t[split] == 'e' || t[split] == 'E') &&
        (split + 1 >= t.size() || !(std::isdigit(static_cast<unsigned char>(t[split + 1])) || t[split + 1] == '-' ||
                                     t[split + 1] == '+')))
      break;
    ++split;
  }
  const auto value = parse_number(t.substr(0, split));
  const std::string unit(trim(t.substr(split)));
  if (!value) throw ParseError("'" + std::string(t) + "' does not start with a number", 0);
  if (unit.empty()) throw ParseError("'" + std::string(t) + "' needs a unit suffix", 0);
  const double v = *value;
  if (dimension == "power") {
    if (unit == "W") return v;
    if (unit == "mW") return v * 1e-3;
    if (unit == "dBm") return units::dbm_to_watt(v);
    if (unit == "dBW") return units::dbm_to_watt(v + 30.0);
  } else if (dimension == "noise-density") {
    if (unit == "W/Hz") return v;
    if (unit == "dBm/Hz" || unit == "dBm") return units::dbm_to_watt(v);
    if (unit == "dBW/Hz") return units::dbm_to_watt(v + 30.0);
  } else if (dimension == "frequency") {
    if (unit == "Hz") return v;
    if (unit == "kHz") return v * 1e3;
    if (unit == "MHz") return v * units::kMHz;
    if (unit == "GHz") return v * 1e9;
  } else if (dimension == "length") {
    if (unit == "m") return v;
    if (unit == "km") return v * units::kKm;
  } else if (dimension == "decibel") {
    if (unit == "dB") return v;
  } else if (dimension == "rate") {
    if (unit == "bit/s" || unit == "b/s") return v;
    if (unit == "kb/s") return v * 1e3;
  } else {
    throw DomainError("parse_quantity: unknown dimension");
  }
  throw ParseError("unit '" + unit + "' is not a valid " + std::string(dimension) + " unit", 0);
}

namespace {

// Collects every problem instead of stopping at the first.
class ConfigReader {
 public:
  explicit ConfigReader(std::vector<std::string>& problems) : problems_(problems) {}

  void quantity(const YAML::Node& parent, const char* key, const std::string& path, std::string_view dim, double& out) {
    const YAML::Node n = parent[key];
    if (!n) return;
    try {
      out = parse_quantity(n.as<std::string>(), dim);
    } catch (const std::exception& e) {
      problems_.push_back(path + ": " + e.what());
    }
  }

  template <class T>
  void scalar(const YAML::Node& parent, const char* key, const std::string& path, T& out) {
    const YAML::Node n = parent[key];
    if (!n) return;
    try {
      out = n.as<T>();
    } catch (const std::exception&) {
      problems_.push_back(path + ": expected a " + type_name<T>() + ", got '" + (n.IsScalar() ? n.Scalar() : "?") + "'");
    }
  }

  void check_keys(const YAML::Node& node, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!node) return;
    if (!node.IsMap()) {
      problems_.push_back(path + ": expected a mapping");
      return;
    }
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
        problems_.push_back((path.empty() ? key : path + "." + key) + ": unknown key");
    }
  }

  std::vector<std::string>& problems() { return problems_; }

 private:
  template <class T>
  static const char* type_name() {
    if constexpr (std::is_same_v<T, bool>) return "boolean";
    else if constexpr (std::is_integral_v<T>) return "integer";
    else if constexpr (std::is_floating_point_v<T>) return "number";
    else return "string";
  }

  std::vector<std::string>& problems_;
};

}  // namespace

ScenarioConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw ParseError(std::string("config: ") + e.msg, static_cast<std::size_t>(e.mark.line + 1));
  }
  ScenarioConfig c;
  if (root.IsNull()) {
    c.validate();
    return c;
  }
  std::vector<std::string> problems;
  ConfigReader r(problems);
  r.check_keys(root, "", {"region", "layout", "operators", "radio", "ofdma", "strategy", "seed", "epsilon",
                          "interference_power_literal"});
  if (!root.IsMap()) throw ValidationError({"config: top level must be a mapping"});

  if (const auto n = root["region"]) {
    r.check_keys(n, "region", {"width", "height"});
    r.quantity(n, "width", "region.width", "length", c.region.width);
    r.quantity(n, "height", "region.height", "length", c.region.height);
  }
  if (const auto n = root["layout"]) {
    r.check_keys(n, "layout", {"file", "count1", "count2", "mode", "seed"});
    if (n["file"]) {
      r.scalar(n, "file", "layout.file", c.layout.file);
      std::filesystem::path p(c.layout.file);
      if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
      try {
        LayoutFile lf = load_bs_csv(p, c.region);
        if (lf.stations.empty()) problems.push_back("layout.file: " + c.layout.file + " has no base stations");
        c.layout.stations = std::move(lf.stations);
      } catch (const std::exception& e) {
        problems.push_back("layout.file: " + std::string(e.what()));
      }
    }
    r.scalar(n, "count1", "layout.count1", c.layout.count1);
    r.scalar(n, "count2", "layout.count2", c.layout.count2);
    r.scalar(n, "seed", "layout.seed", c.layout.seed);
    if (n["mode"]) {
      std::string mode;
      r.scalar(n, "mode", "layout.mode", mode);
      if (auto m = parse_layout_mode(mode)) c.layout.mode = *m;
      else problems.push_back("layout.mode: expected uniform or perturbed-grid, got '" + mode + "'");
    }
  }
  if (const auto n = root["operators"]) {
    if (!n.IsSequence() || n.size() != 2) {
      problems.emplace_back("operators: expected a list of two operators");
    } else {
      for (std::size_t i = 0; i < 2; ++i) {
        const std::string path = "operators[" + std::to_string(i + 1) + "]";
        r.check_keys(n[i], path, {"bandwidth", "users_per_cell"});
        r.quantity(n[i], "bandwidth", path + ".bandwidth", "frequency", c.operators[i].bandwidth);
        r.scalar(n[i], "users_per_cell", path + ".users_per_cell", c.operators[i].users_per_cell);
      }
    }
  }
  if (const auto n = root["radio"]) {
    r.check_keys(n, "radio", {"tx_power", "noise_density", "path_loss", "shadowing_sigma", "min_distance"});
    r.quantity(n, "tx_power", "radio.tx_power", "power", c.tx_power);
    r.quantity(n, "noise_density", "radio.noise_density", "noise-density", c.noise_density);
    r.quantity(n, "shadowing_sigma", "radio.shadowing_sigma", "decibel", c.channel.shadowing_sigma_db);
    r.quantity(n, "min_distance", "radio.min_distance", "length", c.channel.min_distance);
    if (const auto pl = n["path_loss"]) {
      r.check_keys(pl, "radio.path_loss", {"model", "exponent", "intercept", "slope"});
      std::string model = "literal";
      r.scalar(pl, "model", "radio.path_loss.model", model);
      if (model == "log-distance") {
        c.channel.path_loss = PathLossModel::literal();
      } else if (auto m = path_loss_preset(model)) {
        c.channel.path_loss = *m;
      } else {
        problems.push_back("radio.path_loss.model: unknown model '" + model + "'");
      }
      r.scalar(pl, "exponent", "radio.path_loss.exponent", c.channel.path_loss.exponent);
      r.quantity(pl, "intercept", "radio.path_loss.intercept", "decibel", c.channel.path_loss.intercept_db);
      r.quantity(pl, "slope", "radio.path_loss.slope", "decibel", c.channel.path_loss.slope_db);
    }
  }
  if (const auto n = root["ofdma"]) {
    r.check_keys(n, "ofdma", {"subchannels", "slots", "frames", "runs"});
    r.scalar(n, "subchannels", "ofdma.subchannels", c.ofdma.subchannels_per_band);
    r.scalar(n, "slots", "ofdma.slots", c.ofdma.slots);
    r.scalar(n, "frames", "ofdma.frames", c.ofdma.frames);
    r.scalar(n, "runs", "ofdma.runs", c.ofdma.runs);
  }
  if (root["strategy"]) {
    std::string s;
    r.scalar(root, "strategy", "strategy", s);
    if (auto st = parse_strategy(s)) c.strategy = *st;
    else problems.push_back("strategy: expected nocoop, flexroam or merger, got '" + s + "'");
  }
  r.scalar(root, "seed", "seed", c.seed);
  r.quantity(root, "epsilon", "epsilon", "rate", c.epsilon);
  r.scalar(root, "interference_power_literal", "interference_power_literal", c.interference_power_literal);

  try {
    c.validate();
  } catch (const ValidationError& e) {
    problems.insert(problems.end(), e.problems().begin(), e.problems().end());
  }
  if (!problems.empty()) throw ValidationError(std::move(problems));
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_file(path), path.parent_path());
}

std::string serialize_config(const ScenarioConfig& c) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "region" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "width" << YAML::Value << exact(c.region.width) + " m";
  out << YAML::Key << "height" << YAML::Value << exact(c.region.height) + " m";
  out << YAML::EndMap;

  out << YAML::Key << "layout" << YAML::Value << YAML::BeginMap;
  if (!c.layout.file.empty()) out << YAML::Key << "file" << YAML::Value << c.layout.file;
  out << YAML::Key << "count1" << YAML::Value << c.layout.count1;
  out << YAML::Key << "count2" << YAML::Value << c.layout.count2;
  out << YAML::Key << "mode" << YAML::Value << std::string(to_string(c.layout.mode));
  out << YAML::Key << "seed" << YAML::Value << c.layout.seed;
  out << YAML::EndMap;

  out << YAML::Key << "operators" << YAML::Value << YAML::BeginSeq;
  for (const OperatorConfig& op : c.operators) {
    out << YAML::BeginMap;
    out << YAML::Key << "bandwidth" << YAML::Value << exact(op.bandwidth) + " Hz";
    out << YAML::Key << "users_per_cell" << YAML::Value << exact(op.users_per_cell);
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  const PathLossModel& pl = c.channel.path_loss;
  out << YAML::Key << "radio" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "tx_power" << YAML::Value << exact(c.tx_power) + " W";
  out << YAML::Key << "noise_density" << YAML::Value << exact(c.noise_density) + " W/Hz";
  out << YAML::Key << "path_loss" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "model" << YAML::Value << std::string(to_string(pl.kind));
  out << YAML::Key << "exponent" << YAML::Value << exact(pl.exponent);
  out << YAML::Key << "intercept" << YAML::Value << exact(pl.intercept_db) + " dB";
  out << YAML::Key << "slope" << YAML::Value << exact(pl.slope_db) + " dB";
  out << YAML::EndMap;
  out << YAML::Key << "shadowing_sigma" << YAML::Value << exact(c.channel.shadowing_sigma_db) + " dB";
  out << YAML::Key << "min_distance" << YAML::Value << exact(c.channel.min_distance) + " m";
  out << YAML::EndMap;

  out << YAML::Key << "ofdma" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "subchannels" << YAML::Value << c.ofdma.subchannels_per_band;
  out << YAML::Key << "slots" << YAML::Value << c.ofdma.slots;
  out << YAML::Key << "frames" << YAML::Value << c.ofdma.frames;
  out << YAML::Key << "runs" << YAML::Value << c.ofdma.runs;
  out << YAML::EndMap;

  out << YAML::Key << "strategy" << YAML::Value << std::string(to_string(c.strategy));
  out << YAML::Key << "seed" << YAML::Value << c.seed;
  out << YAML::Key << "epsilon" << YAML::Value << exact(c.epsilon) + " bit/s";
  out << YAML::Key << "interference_power_literal" << YAML::Value << c.interference_power_literal;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace cellpool
