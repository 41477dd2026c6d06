#include "cli_app.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <variant>

#include "cellpool/analytic.hpp"
#include "cellpool/errors.hpp"
#include "cellpool/ingest.hpp"
#include "cellpool/mc_oracle.hpp"
#include "cellpool/simulator.hpp"
#include "cellpool/stats.hpp"
#include "cellpool/units.hpp"

namespace cellpool::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

// ---- output ---------------------------------------------------------------

using Cell = std::variant<std::string, double, long long, bool>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

struct Provenance {
  std::string command;
  std::string config_hash;
  std::vector<std::uint64_t> seeds;
};

enum class Format { Table, Csv, Json };

std::string shortest(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string cell_text(const Cell& c, bool human) {
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  if (const auto* b = std::get_if<bool>(&c)) return *b ? "true" : "false";
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  const double v = std::get<double>(c);
  if (!human) return shortest(v);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

json provenance_json(const Provenance& p) {
  json seeds = json::array();
  for (auto s : p.seeds) seeds.push_back(s);
  return {{"tool", kToolVersion}, {"command", p.command}, {"config_hash", p.config_hash}, {"seeds", seeds}};
}

std::string provenance_line(const Provenance& p) {
  std::string seeds;
  for (auto s : p.seeds) seeds += (seeds.empty() ? "" : ";") + std::to_string(s);
  return "# tool=" + std::string(kToolVersion) + " command=" + p.command + " config_hash=" + p.config_hash +
         " seeds=" + seeds;
}

json table_json(const Table& t) {
  json rows = json::array();
  for (const auto& row : t.rows) {
    json r = json::object();
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
              if (std::isfinite(v)) r[t.columns[i]] = v;
              else r[t.columns[i]] = nullptr;
            } else {
              r[t.columns[i]] = v;
            }
          },
          row[i]);
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_csv(const Table& t, const Provenance& p, std::ostream& out) {
  out << provenance_line(p) << "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
  out << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_escape(cell_text(row[i], false));
    out << "\n";
  }
}

void emit(const Table& t, const Provenance& p, Format f, std::ostream& out) {
  if (f == Format::Json) {
    json doc = {{"provenance", provenance_json(p)}, {"columns", t.columns}, {"rows", table_json(t)}};
    out << doc.dump(2) << "\n";
    return;
  }
  if (f == Format::Csv) {
    write_csv(t, p, out);
    return;
  }
  std::vector<std::size_t> width(t.columns.size());
  for (std::size_t i = 0; i < t.columns.size(); ++i) width[i] = t.columns[i].size();
  for (const auto& row : t.rows)
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], cell_text(row[i], true).size());
  out << provenance_line(p) << "\n";
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      out << (i ? "  " : "") << cells[i];
      if (i + 1 < cells.size()) out << std::string(width[i] - cells[i].size(), ' ');
    }
    out << "\n";
  };
  line(t.columns);
  for (const auto& row : t.rows) {
    std::vector<std::string> cells;
    for (const auto& c : row) cells.push_back(cell_text(c, true));
    line(cells);
  }
}

std::string fnv_hash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---- shared flags -----------------------------------------------------------

struct ModelFlags {
  double lambda1 = 4e-8;
  double lambda2 = 4e-8;
  std::string w1 = "10 MHz";
  std::string w2 = "10 MHz";
  std::optional<double> eta1, eta2;
  std::string tx_power = "46 dBm";
  std::string noise_density = "-174 dBm/Hz";
  double alpha = 3.76;
  double rel_tol = 1e-7;
  double abs_tol = 0.0;
  int max_subdivisions = 4096;
  std::string format = "table";
  unsigned threads = 0;

  void add_to(CLI::App& app, bool with_quadrature = true) {
    app.add_option("--lambda1", lambda1, "OP1 BS density, BSs per m^2")->capture_default_str();
    app.add_option("--lambda2", lambda2, "OP2 BS density, BSs per m^2")->capture_default_str();
    app.add_option("--w1", w1, "OP1 bandwidth with unit, e.g. '10 MHz'")->capture_default_str();
    app.add_option("--w2", w2, "OP2 bandwidth with unit")->capture_default_str();
    app.add_option("--eta1", eta1, "OP1 user density per m^2 (default 100 x lambda1)");
    app.add_option("--eta2", eta2, "OP2 user density per m^2 (default 100 x lambda2)");
    app.add_option("--tx-power", tx_power, "BS transmit power with unit")->capture_default_str();
    app.add_option("--noise-density", noise_density, "noise spectral density with unit")->capture_default_str();
    app.add_option("--alpha", alpha, "path-loss exponent")->capture_default_str();
    if (with_quadrature) {
      app.add_option("--rel-tol", rel_tol, "quadrature relative tolerance")->capture_default_str();
      app.add_option("--abs-tol", abs_tol, "quadrature absolute tolerance")->capture_default_str();
      app.add_option("--max-subdivisions", max_subdivisions, "quadrature subdivision budget")->capture_default_str();
    }
    add_format(app);
    app.add_option("--threads", threads, "worker threads (0 = all cores)");
  }

  void add_format(CLI::App& app) {
    app.add_option("--format", format, "output format")
        ->check(CLI::IsMember({"table", "csv", "json"}))
        ->capture_default_str();
  }

  Format output_format() const { return format == "csv" ? Format::Csv : format == "json" ? Format::Json : Format::Table; }

  OperatorParams op(int i) const {
    const double lambda = i == 1 ? lambda1 : lambda2;
    const auto& eta = i == 1 ? eta1 : eta2;
    return {lambda, parse_quantity(i == 1 ? w1 : w2, "frequency"), eta ? *eta : 100.0 * lambda};
  }

  RadioParams radio() const {
    return {parse_quantity(tx_power, "power"), parse_quantity(noise_density, "noise-density"), alpha};
  }

  QuadratureConfig quad() const { return {rel_tol, abs_tol, max_subdivisions}; }

  /// Throws ValidationError listing every bad value.
  void validate(bool allow_empty_op2) const {
    std::vector<std::string> p;
    for (int i = 1; i <= 2; ++i) {
      const std::string k = std::to_string(i);
      OperatorParams o;
      try {
        o = op(i);
      } catch (const std::exception& e) {
        p.push_back("--w" + k + ": " + e.what());
        continue;
      }
      const bool may_be_empty = allow_empty_op2 && i == 2;
      if (!(o.bs_density > 0.0) && !(may_be_empty && o.bs_density == 0.0)) p.push_back("--lambda" + k + " must be positive");
      if (!(o.bandwidth > 0.0) && !(may_be_empty && o.bandwidth == 0.0)) p.push_back("--w" + k + " must be positive");
      if (!(o.user_density > 0.0) && !(may_be_empty && o.bs_density == 0.0)) p.push_back("--eta" + k + " must be positive");
      else if (o.user_density < o.bs_density) p.push_back("--eta" + k + " must be at least --lambda" + k);
    }
    try {
      const RadioParams r = radio();
      if (!(r.tx_power > 0.0)) p.emplace_back("--tx-power must be positive");
    } catch (const std::exception& e) {
      p.push_back(std::string("--tx-power/--noise-density: ") + e.what());
    }
    if (!(alpha > 2.0)) p.emplace_back("--alpha must exceed 2");
    if (!(rel_tol > 0.0)) p.emplace_back("--rel-tol must be positive");
    if (!(abs_tol >= 0.0)) p.emplace_back("--abs-tol must be non-negative");
    if (max_subdivisions < 1) p.emplace_back("--max-subdivisions must be at least 1");
    if (!p.empty()) throw ValidationError(std::move(p));
  }

  std::string canonical() const {
    std::ostringstream os;
    os << "lambda=" << shortest(lambda1) << "," << shortest(lambda2) << " w=" << w1 << "," << w2
       << " eta=" << shortest(op(1).user_density) << "," << shortest(op(2).user_density) << " tx=" << tx_power
       << " n0=" << noise_density << " alpha=" << shortest(alpha) << " tol=" << shortest(rel_tol) << ","
       << shortest(abs_tol) << "," << max_subdivisions;
    return os.str();
  }
};

std::uint64_t default_seed(std::uint64_t fallback) {
  if (const char* env = std::getenv("CELLPOOL_SEED")) {
    std::uint64_t v = 0;
    const std::string_view s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc{} && ptr == s.data() + s.size()) return v;
    throw ValidationError({"CELLPOOL_SEED must be a non-negative integer"});
  }
  return fallback;
}

std::vector<Strategy> parse_strategies(const std::string& text) {
  if (text == "all") return {Strategy::NoCoop, Strategy::FlexRoam, Strategy::Merger};
  std::vector<Strategy> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto s = parse_strategy(item);
    if (!s) throw ValidationError({"unknown strategy '" + item + "'"});
    out.push_back(*s);
  }
  if (out.empty()) throw ValidationError({"no strategy given"});
  return out;
}

// ---- analytic ---------------------------------------------------------------

int cmd_analytic(ModelFlags& f, const std::string& strategy_text, std::ostream& out) {
  const auto strategies = parse_strategies(strategy_text);
  const bool needs_nocoop = std::find(strategies.begin(), strategies.end(), Strategy::NoCoop) != strategies.end();
  f.validate(!needs_nocoop);
  const OperatorParams op1 = f.op(1), op2 = f.op(2);
  const RadioParams radio = f.radio();
  const QuadratureConfig quad = f.quad();

  std::array<double, 2> base{};
  if (needs_nocoop)
    for (int op = 1; op <= 2; ++op)
      base[static_cast<std::size_t>(op - 1)] = throughput(Strategy::NoCoop, op1, op2, radio, quad, op).throughput_bps;

  Table t{{"strategy", "operator", "spectral_rate_nats", "throughput_kbps", "gain_vs_nocoop_pct", "error_estimate"}, {}};
  for (Strategy s : strategies) {
    for (int op = 1; op <= 2; ++op) {
      const RateResult r = throughput(s, op1, op2, radio, quad, op);
      const double b = base[static_cast<std::size_t>(op - 1)];
      const double gain = needs_nocoop && b > 0.0 ? 100.0 * (r.throughput_bps / b - 1.0) : std::nan("");
      t.rows.push_back({std::string(to_string(s)), static_cast<long long>(op), r.spectral_rate_nats,
                        r.throughput_bps / 1e3, gain, r.error_estimate});
    }
  }
  emit(t, {"analytic", fnv_hash(f.canonical() + " strategies=" + strategy_text), {}}, f.output_format(), out);
  return kOk;
}

// ---- sweep ------------------------------------------------------------------

int cmd_sweep(ModelFlags& f, const std::string& strategy_text, const std::string& axis_text,
              const std::vector<std::string>& grid_text, std::ostream& out, std::ostream& err) {
  const auto strategies = parse_strategies(strategy_text);
  const auto axis = parse_sweep_axis(axis_text);
  if (!axis) throw ValidationError({"--axis must be bs-density, user-density or bandwidth"});
  f.validate(false);
  std::vector<double> grid;
  std::vector<std::string> bad;
  for (const auto& g : grid_text) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(g.data(), g.data() + g.size(), v);
    if (ec != std::errc{} || ptr != g.data() + g.size()) {
      bad.push_back("--grid: '" + g + "' is not a number");
      continue;
    }
    grid.push_back(v);
  }
  if (!bad.empty()) throw ValidationError(std::move(bad));

  const auto rows = sweep(strategies, f.op(1), f.op(2), f.radio(), f.quad(), *axis, grid, f.threads);
  Table t{{"ratio", "strategy", "operator", "throughput_kbps", "spectral_rate_nats", "ok", "error"}, {}};
  bool all_ok = true;
  for (const auto& r : rows) {
    all_ok = all_ok && r.ok;
    t.rows.push_back({r.ratio, std::string(to_string(r.strategy)), static_cast<long long>(r.op),
                      r.throughput_bps / 1e3, r.spectral_rate_nats, r.ok, r.error});
  }
  std::string grid_key;
  for (double g : grid) grid_key += shortest(g) + ";";
  emit(t, {"sweep", fnv_hash(f.canonical() + " axis=" + axis_text + " grid=" + grid_key + " strategies=" + strategy_text), {}},
       f.output_format(), out);
  if (!all_ok) {
    err << "some sweep rows failed; see the ok/error columns\n";
    return kValidation;
  }
  return kOk;
}

// ---- verify -----------------------------------------------------------------

struct VerifyFlags {
  std::string checks = "all";
  std::int64_t samples = 200000;
  std::int64_t distribution_samples = 100000;
  std::optional<std::uint64_t> seed;
  double inject_alpha_error = 0.0;
};

int cmd_verify(ModelFlags& f, const VerifyFlags& v, std::ostream& out, std::ostream& err) {
  f.validate(false);
  if (v.samples < 2 || v.distribution_samples < 2) throw ValidationError({"sample budgets must be at least 2"});
  const std::uint64_t seed = v.seed ? *v.seed : default_seed(1);
  std::vector<std::string> checks;
  if (v.checks == "all") {
    checks = {"nocoop", "flexroam", "merger", "association", "distance"};
  } else {
    std::stringstream ss(v.checks);
    std::string item;
    while (std::getline(ss, item, ',')) checks.push_back(item);
  }
  const OperatorParams op1 = f.op(1), op2 = f.op(2);
  const RadioParams radio = f.radio();
  RadioParams analytic_radio = radio;
  analytic_radio.path_loss_exponent += v.inject_alpha_error;  // fault-injection hook
  const QuadratureConfig quad = f.quad();

  Table t{{"check", "expected", "observed", "tolerance", "statistic", "pass"}, {}};
  bool all_pass = true;
  for (const auto& name : checks) {
    if (const auto s = parse_strategy(name)) {
      mc::RateOptions opt;
      opt.threads = f.threads;
      const mc::McEstimate est = mc::estimate_rate(*s, op1, op2, radio, v.samples, seed, opt);
      double expected = 0.0;
      if (*s == Strategy::NoCoop) expected = rate_nocoop(op1.bandwidth, op1.bs_density, analytic_radio, quad).spectral_rate_nats;
      else if (*s == Strategy::FlexRoam) expected = rate_flexroam(op1, op2, analytic_radio, quad).spectral_rate_nats;
      else expected = rate_merger(op1, op2, analytic_radio, quad).spectral_rate_nats;
      const bool pass = est.contains(expected);
      all_pass = all_pass && pass;
      t.rows.push_back({"rate-" + name, expected, est.mean, est.half_width_99, std::abs(est.mean - expected), pass});
    } else if (name == "association") {
      const mc::McEstimate est =
          mc::empirical_association_prob(op1.bs_density, op2.bs_density, v.distribution_samples, seed);
      const double p = op1.bs_density / (op1.bs_density + op2.bs_density);
      const double tol = 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(v.distribution_samples));
      const bool pass = std::abs(est.mean - p) <= tol;
      all_pass = all_pass && pass;
      t.rows.push_back({"association", p, est.mean, tol, std::abs(est.mean - p), pass});
    } else if (name == "distance") {
      const auto d = mc::empirical_nearest_distance_cdf(op1.bs_density, op2.bs_density, v.distribution_samples, seed);
      const double total = op1.bs_density + op2.bs_density;
      const double ks = stats::ks_statistic(d, [&](double r) { return 1.0 - std::exp(-total * std::numbers::pi * r * r); });
      const double pv = stats::ks_pvalue(ks, d.size());
      const bool pass = pv > 0.01;
      all_pass = all_pass && pass;
      t.rows.push_back({"distance-ks", 0.01, pv, 0.01, ks, pass});
    } else {
      throw ValidationError({"unknown check '" + name + "'"});
    }
  }
  emit(t,
       {"verify",
        fnv_hash(f.canonical() + " checks=" + v.checks + " n=" + std::to_string(v.samples) + "," +
                 std::to_string(v.distribution_samples) + " inject=" + shortest(v.inject_alpha_error)),
        {seed}},
       f.output_format(), out);
  if (!all_pass) {
    err << "verification failed:";
    for (const auto& row : t.rows)
      if (!std::get<bool>(row.back())) err << " " << std::get<std::string>(row.front());
    err << "\n";
    return kCheckFailed;
  }
  return kOk;
}

// ---- simulate ---------------------------------------------------------------

struct SimulateFlags {
  std::string config;
  std::string strategy;
  std::optional<int> frames, runs;
  std::optional<double> users_per_cell;
  std::optional<std::uint64_t> seed;
  std::string layout;
  std::string out_dir;
  std::size_t cdf_points = 100;
  std::string format = "table";
  unsigned threads = 0;
};

Table users_table(const std::vector<const ThroughputReport*>& reports) {
  Table t{{"strategy", "run", "user_id", "operator", "serving_bs", "throughput_bps"}, {}};
  for (const auto* r : reports)
    for (const auto& u : r->users)
      t.rows.push_back({std::string(to_string(r->strategy)), static_cast<long long>(u.run),
                        static_cast<long long>(u.user_id), static_cast<long long>(u.op),
                        static_cast<long long>(u.serving_bs), u.throughput_bps});
  return t;
}

Table cdf_table(const std::vector<const ThroughputReport*>& reports, std::size_t points) {
  Table t{{"strategy", "throughput_bps", "cumulative_fraction"}, {}};
  for (const auto* r : reports)
    for (const auto& [x, p] : emit_cdf(*r, points)) t.rows.push_back({std::string(to_string(r->strategy)), x, p});
  return t;
}

json report_json(const ThroughputReport& r) {
  json runs = json::array();
  for (const auto& m : r.per_run) runs.push_back({{"op1_bps", m.op1}, {"op2_bps", m.op2}, {"overall_bps", m.overall}});
  return {{"strategy", to_string(r.strategy)},
          {"users", r.users.size()},
          {"mean_op1_bps", r.means.op1},
          {"mean_op2_bps", r.means.op2},
          {"mean_overall_bps", r.means.overall},
          {"per_run", runs},
          {"layout", r.layout_label}};
}

void write_atomically(const fs::path& target, const std::string& content, std::vector<fs::path>& staged) {
  const fs::path tmp = target.string() + ".partial";
  std::ofstream f(tmp, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + tmp.string());
  staged.push_back(tmp);
  f << content;
  if (!f.flush()) throw std::runtime_error("write failed for " + tmp.string());
}

int cmd_simulate(const SimulateFlags& s, std::ostream& out, std::ostream& err) {
  ScenarioConfig config = s.config.empty() ? parse_config("") : load_config(s.config);
  if (!s.layout.empty()) {
    LayoutFile lf = load_bs_csv(s.layout, config.region);
    for (const auto& w : lf.warnings) err << "warning: " << w << "\n";
    if (lf.stations.empty()) throw ValidationError({"--layout: no base stations in " + s.layout});
    config.layout.stations = std::move(lf.stations);
    config.layout.file = s.layout;
  }
  if (s.frames) config.ofdma.frames = *s.frames;
  if (s.runs) config.ofdma.runs = *s.runs;
  if (s.users_per_cell) config.operators[0].users_per_cell = config.operators[1].users_per_cell = *s.users_per_cell;
  config.seed = s.seed ? *s.seed : default_seed(config.seed);
  config.threads = s.threads;
  const bool compare = s.strategy == "compare";
  if (!compare && !s.strategy.empty()) {
    const auto st = parse_strategy(s.strategy);
    if (!st) throw ValidationError({"--strategy must be nocoop, flexroam, merger or compare"});
    config.strategy = *st;
  }
  config.validate();

  std::vector<ThroughputReport> owned;
  StrategyComparison comparison;
  std::vector<const ThroughputReport*> reports;
  if (compare) {
    comparison = compare_strategies(config);
    for (const auto& r : comparison.reports) reports.push_back(&r);
  } else {
    owned.push_back(run_scenario(config));
    reports.push_back(&owned.front());
  }
  const Provenance prov{"simulate", config_hash(config), reports.front()->run_seeds};

  Table summary{{"strategy", "operator", "mean_kbps", "gain_vs_nocoop_pct", "median_kbps", "median_gain_vs_nocoop_pct"}, {}};
  if (compare) {
    for (const auto& row : comparison.rows)
      summary.rows.push_back({std::string(to_string(row.strategy)), static_cast<long long>(row.op), row.mean_bps / 1e3,
                              100.0 * row.gain_vs_nocoop, row.median_bps / 1e3, 100.0 * row.median_gain_vs_nocoop});
  } else {
    // No baseline to compare against: gains are left empty.
    const auto& m = reports.front()->means;
    const std::array<double, 3> v{m.overall, m.op1, m.op2};
    for (int op = 0; op <= 2; ++op) {
      std::vector<double> tp;
      for (const UserThroughput& u : reports.front()->users)
        if (op == 0 || u.op == op) tp.push_back(u.throughput_bps);
      std::sort(tp.begin(), tp.end());
      const double median = tp.empty() ? 0.0 : stats::order_statistic(tp, 0.5);
      summary.rows.push_back({std::string(to_string(config.strategy)), static_cast<long long>(op),
                              v[static_cast<std::size_t>(op)] / 1e3, std::nan(""), median / 1e3, std::nan("")});
    }
  }
  const Format fmt = s.format == "csv" ? Format::Csv : s.format == "json" ? Format::Json : Format::Table;
  emit(summary, prov, fmt, out);

  if (!s.out_dir.empty()) {
    const fs::path dir(s.out_dir);
    std::vector<fs::path> staged;
    try {
      fs::create_directories(dir);
      json doc = {{"provenance", provenance_json(prov)},
                  {"config", serialize_config(config)},
                  {"summary", table_json(summary)},
                  {"reports", json::array()}};
      for (const auto* r : reports) doc["reports"].push_back(report_json(*r));
      write_atomically(dir / "summary.json", doc.dump(2) + "\n", staged);
      std::ostringstream users, cdf;
      write_csv(users_table(reports), prov, users);
      write_csv(cdf_table(reports, s.cdf_points), prov, cdf);
      write_atomically(dir / "users.csv", users.str(), staged);
      write_atomically(dir / "cdf.csv", cdf.str(), staged);
      for (const auto& tmp : staged) {
        fs::path final_path = tmp;
        final_path.replace_extension();
        fs::rename(tmp, final_path);
      }
    } catch (...) {
      std::error_code ec;
      for (const auto& tmp : staged) fs::remove(tmp, ec);
      throw;
    }
  }
  return kOk;
}

// ---- layout -----------------------------------------------------------------

int cmd_layout(int n1, int n2, const std::string& width, const std::string& height, std::uint64_t seed,
               const std::string& mode_text, std::ostream& out) {
  const auto mode = parse_layout_mode(mode_text);
  if (!mode) throw ValidationError({"--mode must be uniform or perturbed-grid"});
  const Region region{parse_quantity(width, "length"), parse_quantity(height, "length")};
  const auto layout = synthesize_layout(n1, n2, region, seed, *mode);
  out << "# synthetic " << mode_text << " layout, " << n1 << "+" << n2 << " sites over " << shortest(region.width) << " x "
      << shortest(region.height) << " m, seed " << seed << "\n";
  out << "operator,x_m,y_m\n";
  char buf[96];
  for (const auto& b : layout) {
    std::snprintf(buf, sizeof buf, "%d,%.3f,%.3f\n", b.op, b.position.x, b.position.y);
    out << buf;
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Capacity of shared cellular infrastructure: analytic rates, Monte Carlo checks, OFDMA simulation",
               "cellpool"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  ModelFlags model;
  std::string strategy = "all";
  auto* analytic = app.add_subcommand("analytic", "average user throughput per strategy");
  model.add_to(*analytic);
  analytic->add_option("--strategy", strategy, "nocoop, flexroam, merger, a comma list, or all")->capture_default_str();

  std::string axis = "bs-density";
  std::vector<std::string> grid{"0.2", "0.4", "0.6", "0.8", "1", "1.2", "1.4", "1.6", "1.8", "2"};
  auto* sweep_cmd = app.add_subcommand("sweep", "throughput versus an OP2/OP1 ratio");
  model.add_to(*sweep_cmd);
  sweep_cmd->add_option("--strategy", strategy, "strategies to include")->capture_default_str();
  sweep_cmd->add_option("--axis", axis, "bs-density, user-density or bandwidth")->capture_default_str();
  sweep_cmd->add_option("--grid", grid, "ratio values, comma separated")->delimiter(',');

  VerifyFlags verify_flags;
  auto* verify = app.add_subcommand("verify", "quadrature versus Monte Carlo and distributional checks");
  model.add_to(*verify);
  verify->add_option("--checks", verify_flags.checks, "nocoop,flexroam,merger,association,distance or all")
      ->capture_default_str();
  verify->add_option("--samples", verify_flags.samples, "Monte Carlo samples per rate check")->capture_default_str();
  verify->add_option("--distribution-samples", verify_flags.distribution_samples, "samples for association/KS")
      ->capture_default_str();
  verify->add_option("--seed", verify_flags.seed, "seed (default: CELLPOOL_SEED or 1)");
  verify->add_option("--inject-alpha-error", verify_flags.inject_alpha_error,
                     "test hook: perturb alpha in the quadrature engine only")
      ->group("");

  SimulateFlags sim;
  auto* simulate = app.add_subcommand("simulate", "OFDMA system simulation");
  simulate->add_option("--config", sim.config, "YAML scenario file (defaults when omitted)");
  simulate->add_option("--strategy", sim.strategy, "nocoop, flexroam, merger or compare");
  simulate->add_option("--frames", sim.frames, "frames per run");
  simulate->add_option("--runs", sim.runs, "independent runs");
  simulate->add_option("--users-per-cell", sim.users_per_cell, "users per cell for both operators");
  simulate->add_option("--seed", sim.seed, "scenario seed (default: config, then CELLPOOL_SEED)");
  simulate->add_option("--layout", sim.layout, "BS layout CSV, overrides the config");
  simulate->add_option("--out-dir", sim.out_dir, "write summary.json, users.csv and cdf.csv here");
  simulate->add_option("--cdf-points", sim.cdf_points, "points in cdf.csv")->capture_default_str();
  simulate->add_option("--format", sim.format, "stdout format")->check(CLI::IsMember({"table", "csv", "json"}));
  simulate->add_option("--threads", sim.threads, "worker threads (0 = all cores)");

  int n1 = 16, n2 = 13;
  std::string width = "20 km", height = "20 km", mode = "perturbed-grid";
  std::uint64_t layout_seed = 1;
  auto* layout = app.add_subcommand("layout", "write a synthetic BS layout as CSV");
  layout->add_option("--n1", n1, "OP1 sites")->capture_default_str();
  layout->add_option("--n2", n2, "OP2 sites")->capture_default_str();
  layout->add_option("--width", width, "region width with unit")->capture_default_str();
  layout->add_option("--height", height, "region height with unit")->capture_default_str();
  layout->add_option("--seed", layout_seed, "layout seed")->capture_default_str();
  layout->add_option("--mode", mode, "uniform or perturbed-grid")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion& e) {
    out << kToolVersion << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    const CLI::App* sub = nullptr;
    for (const auto* s : app.get_subcommands()) sub = s;
    err << (sub ? sub->help() : app.help());
    return kUsage;
  }

  try {
    if (*analytic) return cmd_analytic(model, strategy, out);
    if (*sweep_cmd) return cmd_sweep(model, strategy, axis, grid, out, err);
    if (*verify) return cmd_verify(model, verify_flags, out, err);
    if (*simulate) return cmd_simulate(sim, out, err);
    if (*layout) return cmd_layout(n1, n2, width, height, layout_seed, mode, out);
  } catch (const ValidationError& e) {
    err << "invalid input:\n";
    for (const auto& p : e.problems()) err << "  " << p << "\n";
    return kValidation;
  } catch (const ParseError& e) {
    err << "invalid input: " << e.what() << "\n";
    return kValidation;
  } catch (const DomainError& e) {
    err << "invalid input: " << e.what() << "\n";
    return kValidation;
  } catch (const QuadratureError& e) {
    err << "numerical failure: " << e.what() << " (best estimate " << e.best_estimate() << ", error "
        << e.achieved_error() << ")\n";
    return kNumerical;
  } catch (const SampleBudgetError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kUsage;
}

}  // namespace cellpool::cli
