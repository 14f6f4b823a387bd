#pragma once

// Strict INI run configuration: known sections and keys only, every value
// parsed completely and range-checked before any computation runs.

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "partialwave/grid.hpp"
#include "partialwave/potential.hpp"

namespace pwcli {

/// Bad or inconsistent configuration (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error("config: " + what) {}
};

/// Unreadable input or unwritable output (exit code 4).
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error("io: " + what) {}
};

enum class Spacing { Linear, Log };

struct EnergyGrid {
  double e_min = 0.0;
  double e_max = 0.0;
  int n = 0;
  Spacing spacing = Spacing::Linear;

  std::vector<double> values() const {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const double t = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
      out[static_cast<std::size_t>(i)] = spacing == Spacing::Linear
                                             ? e_min + (e_max - e_min) * t
                                             : e_min * std::pow(e_max / e_min, t);
    }
    if (n > 1) out.back() = e_max;
    return out;
  }
};

struct BoundSection {
  std::vector<int> ells;
  double e_min = 0.0;
  double e_max = 0.0;
  int n_max = 20;
};

struct ResonanceSection {
  int ell = 0;
  std::optional<std::pair<double, double>> window;
  double large_q = 10.0;
};

struct SyntheticSection {
  double energy = 0.0;
  double gamma = 0.0;
  double q = 0.0;
  double sigma_0 = 0.0;
  double sigma_a = 0.0;
};

struct DelaySection {
  bool half = false;
  double median_factor = 3.0;
};

struct PhotoSection {
  int ell = 0;
  int n_radial = 0;
  EnergyGrid energies;
  double bound_e_max = -1e-3;
  EnergyGrid threshold;
  double threshold_decades = 1.0;
};

struct WkbSection {
  int ell = 0;
  EnergyGrid energies;
  double k_min = 1e-3;
  int k_points = 21;
};

struct RunConfig {
  std::filesystem::path source;
  std::vector<std::string> commands;  // intended commands, used by corpus runners
  std::optional<partialwave::PotentialSpec> potential;
  double potential_floor = 0.0;  // no bound state lies below this energy
  partialwave::GridSpec grid;
  std::optional<std::vector<int>> scan_ells;
  std::optional<EnergyGrid> scan;
  std::optional<BoundSection> bound;
  std::optional<ResonanceSection> resonance;
  std::optional<SyntheticSection> synthetic;
  DelaySection delay;
  std::optional<PhotoSection> photo;
  std::optional<WkbSection> wkb;
  std::optional<std::string> out_dir;
  std::optional<std::vector<std::string>> formats;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError("empty entry in list '" + s + "'");
    out.push_back(item);
  }
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

inline double parse_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto t = trim(text);
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size() || !std::isfinite(v)) {
    throw ConfigError(key + ": '" + text + "' is not a finite number");
  }
  return v;
}

inline int parse_int(const std::string& key, const std::string& text) {
  int v = 0;
  const auto t = trim(text);
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw ConfigError(key + ": '" + text + "' is not an integer");
  }
  return v;
}

/// One INI section; every key must be consumed exactly once by the reader.
class Section {
 public:
  Section(std::string name, const boost::property_tree::ptree& tree) : name_(std::move(name)) {
    for (const auto& [key, node] : tree) {
      if (!node.empty()) throw ConfigError("[" + name_ + "] " + key + ": nested keys are not allowed");
      values_[key] = node.data();
    }
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string text(const std::string& key) {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("[" + name_ + "] missing required key '" + key + "'");
    used_.insert(key);
    return trim(it->second);
  }

  std::optional<std::string> optional_text(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return text(key);
  }

  double number(const std::string& key) { return parse_double(qualified(key), text(key)); }
  double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }
  int integer(const std::string& key) { return parse_int(qualified(key), text(key)); }
  int integer(const std::string& key, int fallback) { return has(key) ? integer(key) : fallback; }

  std::vector<int> integers(const std::string& key) {
    std::vector<int> out;
    for (const auto& item : split_list(text(key))) out.push_back(parse_int(qualified(key), item));
    return out;
  }

  std::string qualified(const std::string& key) const { return "[" + name_ + "] " + key; }

  /// Rejects keys that no reader asked for.
  void finish() const {
    for (const auto& [key, value] : values_) {
      if (!used_.count(key)) throw ConfigError("[" + name_ + "] unknown key '" + key + "'");
    }
  }

 private:
  std::string name_;
  std::map<std::string, std::string> values_;
  std::set<std::string> used_;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

inline EnergyGrid read_energy_grid(Section& s, const std::string& prefix, bool positive) {
  EnergyGrid g;
  g.e_min = s.number(prefix + "e_min");
  g.e_max = s.number(prefix + "e_max");
  g.n = s.integer(prefix + "n_energies");
  const auto sp = s.optional_text(prefix + "spacing").value_or("linear");
  if (sp == "linear") {
    g.spacing = Spacing::Linear;
  } else if (sp == "log") {
    g.spacing = Spacing::Log;
  } else {
    throw ConfigError(s.qualified(prefix + "spacing") + ": expected linear or log, got '" + sp + "'");
  }
  require(g.e_max > g.e_min, s.qualified(prefix + "e_max") + " must exceed e_min");
  require(g.n >= 2, s.qualified(prefix + "n_energies") + " must be >= 2");
  if (positive) require(g.e_min > 0.0, s.qualified(prefix + "e_min") + " must be > 0 (energies above threshold)");
  if (g.spacing == Spacing::Log) require(g.e_min > 0.0, s.qualified(prefix + "e_min") + " must be > 0 for log spacing");
  return g;
}

inline void check_ell(const Section& s, const std::string& key, int ell) {
  require(ell >= 0 && ell <= 200, s.qualified(key) + " must lie in [0, 200]");
}

inline partialwave::PotentialSpec read_potential(Section& s, const std::filesystem::path& base, double& floor) {
  using partialwave::PotentialSpec;
  const auto kind = s.text("kind");
  try {
    if (kind == "zero") {
      floor = 0.0;
      return PotentialSpec::zero();
    }
    if (kind == "hard_sphere") {
      floor = 0.0;
      return PotentialSpec::hard_sphere(s.number("radius"));
    }
    if (kind == "square_well") {
      auto spec = PotentialSpec::square_well(s.number("depth"), s.number("radius"));
      floor = -std::get<partialwave::SquareWell>(spec.kind()).depth;
      return spec;
    }
    if (kind == "yukawa") {
      auto spec = PotentialSpec::yukawa(s.number("charge"), s.number("screening"));
      // V >= -Z/r, so nothing lies below the hydrogenic ground state.
      const double z = std::get<partialwave::Yukawa>(spec.kind()).charge;
      floor = -0.5 * z * z * (1.0 + 1e-6);
      return spec;
    }
    if (kind == "tabulated") {
      const auto path = base / s.text("file");
      std::ifstream in(path);
      if (!in) throw IoError("cannot read tabulated potential " + path.string());
      auto table = partialwave::Tabulated::parse(in);
      floor = 0.0;
      for (double v : table.values()) floor = std::min(floor, v);
      return PotentialSpec(std::move(table));
    }
  } catch (const partialwave::Error& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("[potential] kind: unknown potential '" + kind + "'");
}

}  // namespace detail

/// Parses and validates `path`. Throws ConfigError or IoError.
inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path.string());
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(path.string() + ": line " + std::to_string(e.line()) + ": " + e.message());
  }
  static const std::set<std::string> known = {"run",   "potential", "grid",  "scan",  "bound", "resonance",
                                              "synthetic", "delay", "photo", "wkb", "output"};
  std::map<std::string, detail::Section> sections;
  for (const auto& [name, node] : tree) {
    if (!known.count(name)) throw ConfigError("unknown section [" + name + "]");
    if (node.empty() && !node.data().empty()) throw ConfigError("key '" + name + "' outside any section");
    sections.emplace(name, detail::Section(name, node));
  }
  const auto section = [&](const std::string& name) -> detail::Section* {
    auto it = sections.find(name);
    return it == sections.end() ? nullptr : &it->second;
  };
  using detail::check_ell;
  using detail::require;

  RunConfig cfg;
  cfg.source = path;
  if (auto* s = section("run")) {
    if (s->has("commands")) cfg.commands = detail::split_list(s->text("commands"));
  }
  if (auto* s = section("potential")) cfg.potential = detail::read_potential(*s, path.parent_path(), cfg.potential_floor);
  if (auto* s = section("grid")) {
    cfg.grid.r_max = s->number("r_max", cfg.grid.r_max);
    cfg.grid.n_points = s->integer("n_points", cfg.grid.n_points);
    const auto scheme = s->optional_text("scheme").value_or("log_then_uniform");
    if (scheme == "uniform") {
      cfg.grid.scheme = partialwave::GridScheme::Uniform;
    } else if (scheme == "log_then_uniform") {
      cfg.grid.scheme = partialwave::GridScheme::LogThenUniform;
    } else {
      throw ConfigError("[grid] scheme: expected uniform or log_then_uniform, got '" + scheme + "'");
    }
    cfg.grid.r_switch = s->number("r_switch", cfg.grid.r_switch);
    cfg.grid.r_min = s->number("r_min", cfg.grid.r_min);
    require(cfg.grid.n_points <= 5000000, "[grid] n_points must be <= 5000000");
  }
  if (cfg.potential) {
    try {
      partialwave::RadialGrid probe(cfg.grid, *cfg.potential);
      require(probe.r_max() > cfg.potential->range_radius() || cfg.potential->is_zero(),
              "[grid] r_max must exceed the potential range " + std::to_string(cfg.potential->range_radius()));
    } catch (const partialwave::Error& e) {
      throw ConfigError(e.what());
    }
  }
  if (auto* s = section("scan")) {
    cfg.scan_ells = s->integers("ells");
    for (int l : *cfg.scan_ells) check_ell(*s, "ells", l);
    cfg.scan = detail::read_energy_grid(*s, "", true);
  }
  if (auto* s = section("bound")) {
    BoundSection b;
    b.ells = s->integers("ells");
    for (int l : b.ells) check_ell(*s, "ells", l);
    b.e_min = s->number("e_min", cfg.potential_floor);
    b.e_max = s->number("e_max", -1e-3);
    b.n_max = s->integer("n_max", b.n_max);
    require(b.e_max < 0.0, "[bound] e_max must be < 0");
    require(b.e_min < b.e_max, "[bound] e_min must be < e_max");
    require(b.n_max >= 1, "[bound] n_max must be >= 1");
    cfg.bound = b;
  }
  if (auto* s = section("resonance")) {
    ResonanceSection r;
    r.ell = s->integer("ell", 0);
    check_ell(*s, "ell", r.ell);
    if (s->has("window_min") || s->has("window_max")) {
      r.window = std::make_pair(s->number("window_min"), s->number("window_max"));
      require(r.window->second > r.window->first, "[resonance] window_max must exceed window_min");
    }
    r.large_q = s->number("large_q", r.large_q);
    require(r.large_q > 0.0, "[resonance] large_q must be > 0");
    cfg.resonance = r;
  }
  if (auto* s = section("synthetic")) {
    SyntheticSection y;
    y.energy = s->number("energy");
    y.gamma = s->number("gamma");
    y.q = s->number("q");
    y.sigma_0 = s->number("sigma_0");
    y.sigma_a = s->number("sigma_a");
    require(y.gamma > 0.0, "[synthetic] gamma must be > 0");
    require(y.sigma_a > 0.0, "[synthetic] sigma_a must be > 0");
    require(y.sigma_0 >= 0.0, "[synthetic] sigma_0 must be >= 0");
    cfg.synthetic = y;
  }
  if (auto* s = section("delay")) {
    const auto mode = s->optional_text("mode").value_or("full");
    if (mode == "full") {
      cfg.delay.half = false;
    } else if (mode == "half") {
      cfg.delay.half = true;
    } else {
      throw ConfigError("[delay] mode: expected full or half, got '" + mode + "'");
    }
    cfg.delay.median_factor = s->number("median_factor", cfg.delay.median_factor);
    require(cfg.delay.median_factor > 0.0, "[delay] median_factor must be > 0");
  }
  if (auto* s = section("photo")) {
    PhotoSection p;
    p.ell = s->integer("ell");
    check_ell(*s, "ell", p.ell);
    p.n_radial = s->integer("n_radial", 0);
    require(p.n_radial >= 0, "[photo] n_radial must be >= 0");
    p.energies = detail::read_energy_grid(*s, "", true);
    p.bound_e_max = s->number("bound_e_max", p.bound_e_max);
    require(p.bound_e_max < 0.0, "[photo] bound_e_max must be < 0");
    p.threshold = detail::read_energy_grid(*s, "threshold_", true);
    p.threshold_decades = s->number("threshold_decades", p.threshold_decades);
    require(p.threshold_decades > 0.0, "[photo] threshold_decades must be > 0");
    cfg.photo = p;
  }
  if (auto* s = section("wkb")) {
    WkbSection w;
    w.ell = s->integer("ell");
    check_ell(*s, "ell", w.ell);
    w.energies = detail::read_energy_grid(*s, "", true);
    w.k_min = s->number("k_min", w.k_min);
    w.k_points = s->integer("k_points", w.k_points);
    require(w.k_min > 0.0, "[wkb] k_min must be > 0");
    require(w.k_points >= 3, "[wkb] k_points must be >= 3");
    cfg.wkb = w;
  }
  if (auto* s = section("output")) {
    cfg.out_dir = s->optional_text("directory");
    if (s->has("formats")) cfg.formats = detail::split_list(s->text("formats"));
  }
  for (const auto& [name, s] : sections) s.finish();
  return cfg;
}

}  // namespace pwcli
