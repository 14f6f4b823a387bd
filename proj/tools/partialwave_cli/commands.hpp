#pragma once

#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "partialwave/partialwave.hpp"
#include "partialwave_cli/config.hpp"
#include "partialwave_cli/output.hpp"

namespace pwcli {

namespace pw = partialwave;

inline constexpr const char* version = "1.0.0";

enum ExitCode : int { Ok = 0, ConfigFailure = 2, NumericalFailure = 3, IoFailure = 4 };

struct CommandResult {
  Outputs outputs;
  std::vector<std::string> summary;  // human-readable lines for stdout
};

namespace detail {

inline Json describe(const pw::PotentialSpec& spec) {
  Json j;
  j["kind"] = spec.name();
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, pw::HardSphere>) {
          j["radius"] = k.radius;
        } else if constexpr (std::is_same_v<T, pw::SquareWell>) {
          j["depth"] = k.depth;
          j["radius"] = k.radius;
        } else if constexpr (std::is_same_v<T, pw::Yukawa>) {
          j["charge"] = k.charge;
          j["screening"] = k.screening;
        } else if constexpr (std::is_same_v<T, pw::Tabulated>) {
          j["points"] = k.radii().size();
        }
      },
      spec.kind());
  j["range_radius"] = spec.range_radius();
  return j;
}

inline std::string describe_line(const pw::PotentialSpec& spec) {
  std::string s = "potential: " + spec.name();
  const Json d = describe(spec);
  for (const auto& [key, value] : d.items()) {
    if (key == "kind") continue;
    s += " " + key + "=" + (value.is_number_float() ? format_double(value.get<double>()) : value.dump());
  }
  return s;
}

inline double slope_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxy / sxx;
}

inline std::string fixed(double v, int digits = 6) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

inline Json features_json(const std::vector<pw::DelayFeature>& features) {
  Json arr = Json::array();
  for (const auto& f : features) {
    Json j;
    j["kind"] = pw::feature_name(f.kind);
    j["energy"] = f.energy;
    j["tau_au"] = f.tau_extremum;
    j["tau_attosec"] = pw::to_attoseconds(f.tau_extremum);
    j["fwhm"] = f.fwhm;
    arr.push_back(j);
  }
  return arr;
}

inline Table delay_table(const std::string& name, const pw::TimeDelayCurve& tdc, const std::string& potential_line,
                         int ell) {
  Table t;
  t.name = name;
  t.comments = {"units: E hartree, tau atomic units of time and attoseconds", potential_line,
                "ell: " + std::to_string(ell), std::string("mode: ") + pw::mode_name(tdc.mode)};
  t.columns = {"E_hartree", "tau_au", "tau_attosec", "mode"};
  for (std::size_t i = 0; i < tdc.size(); ++i) {
    t.rows.push_back({tdc.energies[i], tdc.tau[i], tdc.attoseconds(i), std::string(pw::mode_name(tdc.mode))});
  }
  t.plot = {1};
  return t;
}

inline void need(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

}  // namespace detail

/// Checks that the sections `command` needs are present.
inline void validate_for(const std::string& command, const RunConfig& cfg) {
  using detail::need;
  if (command == "scan") {
    need(cfg.potential.has_value(), "scan needs a [potential] section");
    need(cfg.scan.has_value(), "scan needs a [scan] section");
  } else if (command == "bound") {
    need(cfg.potential.has_value(), "bound needs a [potential] section");
    need(cfg.bound.has_value(), "bound needs a [bound] section");
  } else if (command == "resonance") {
    need(cfg.scan.has_value(), "resonance needs a [scan] section for its energy grid");
    if (!cfg.synthetic) {
      need(cfg.potential.has_value(), "resonance needs a [potential] or [synthetic] section");
      need(cfg.resonance.has_value(), "resonance needs a [resonance] section");
      need(cfg.scan->n >= 12, "[scan] n_energies must be >= 12 for a phase decomposition");
    }
    if (cfg.resonance && cfg.resonance->window) {
      need(cfg.resonance->window->first < cfg.scan->e_max && cfg.resonance->window->second > cfg.scan->e_min,
           "[resonance] window does not overlap the scan range");
    }
  } else if (command == "delay") {
    need(cfg.potential.has_value(), "delay needs a [potential] section");
    need(cfg.scan.has_value(), "delay needs a [scan] section");
    need(cfg.scan->n >= 5, "[scan] n_energies must be >= 5 for a delay structure scan");
  } else if (command == "photo") {
    need(cfg.potential.has_value(), "photo needs a [potential] section");
    need(cfg.photo.has_value(), "photo needs a [photo] section");
    need(cfg.photo->energies.n >= 5, "[photo] n_energies must be >= 5");
  } else if (command == "wkb") {
    need(cfg.potential.has_value(), "wkb needs a [potential] section");
    need(cfg.wkb.has_value(), "wkb needs a [wkb] section");
  } else {
    throw ConfigError("unknown command '" + command + "'");
  }
}

inline CommandResult cmd_scan(const RunConfig& cfg, std::size_t threads) {
  const auto& spec = *cfg.potential;
  const pw::RadialGrid grid(cfg.grid, spec);
  const auto energies = cfg.scan->values();
  const auto pline = detail::describe_line(spec);
  pw::ScanOptions opts;
  opts.threads = threads;
  CommandResult res;
  std::vector<pw::PhaseShiftCurve> curves;
  Json summary;
  summary["potential"] = detail::describe(spec);
  summary["channels"] = Json::array();
  for (int ell : *cfg.scan_ells) {
    curves.push_back(pw::phase_scan(spec, ell, energies, grid, opts));
    const auto& c = curves.back();
    Table t;
    t.name = "scan_l" + std::to_string(ell);
    t.comments = {"units: E hartree, k inverse bohr, delta rad, sigma bohr^2", pline, "ell: " + std::to_string(ell)};
    t.columns = {"E_hartree", "k_au", "delta_rad", "sin2_delta", "sigma_partial_bohr2"};
    double worst = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      const double k = c.k(i);
      const double s = std::sin(c.deltas[i]);
      const double sigma = pw::partial_cross_section(ell, k, c.deltas[i]);
      worst = std::max(worst, sigma / pw::unitarity_limit(ell, k));
      t.rows.push_back({c.energies[i], k, c.deltas[i], s * s, sigma});
    }
    t.plot = {2};
    res.outputs.tables.push_back(std::move(t));
    Json ch;
    ch["ell"] = ell;
    ch["points"] = c.size();
    ch["delta_first"] = c.deltas.front();
    ch["delta_last"] = c.deltas.back();
    ch["max_unitarity_ratio"] = worst;
    summary["channels"].push_back(ch);
  }
  Table total;
  total.name = "scan_total";
  total.comments = {"units: E hartree, sigma bohr^2", pline};
  total.columns = {"E_hartree", "sigma_total_bohr2"};
  for (double e : energies) total.rows.push_back({e, pw::cross_section(curves, e).sigma_total});
  total.plot = {1};
  res.outputs.tables.push_back(std::move(total));
  res.outputs.documents.emplace_back("scan", summary);
  res.summary.push_back("scanned " + std::to_string(curves.size()) + " partial waves over " +
                        std::to_string(energies.size()) + " energies");
  return res;
}

inline CommandResult cmd_bound(const RunConfig& cfg, std::size_t) {
  const auto& spec = *cfg.potential;
  const auto& b = *cfg.bound;
  pw::BoundSearchOptions opts;
  opts.grid = cfg.grid;
  CommandResult res;
  const auto pline = detail::describe_line(spec);
  Table listing;
  listing.name = "bound";
  listing.comments = {"units: E hartree, kappa inverse bohr, r bohr", pline};
  listing.columns = {"ell", "n_radial", "E_hartree", "kappa_au", "matching_radius_bohr"};
  Json doc;
  doc["potential"] = detail::describe(spec);
  doc["window"] = Json::array({b.e_min, b.e_max});
  doc["states"] = Json::array();
  for (int ell : b.ells) {
    const auto states = pw::find_bound_states(spec, ell, {b.e_min, b.e_max}, b.n_max, opts);
    for (const auto& s : states) {
      listing.rows.push_back({static_cast<long long>(s.ell), static_cast<long long>(s.n_radial), s.energy,
                              s.kappa(), s.matching_radius});
      Json j;
      j["ell"] = s.ell;
      j["n_radial"] = s.n_radial;
      j["energy"] = s.energy;
      j["kappa"] = s.kappa();
      j["matching_radius"] = s.matching_radius;
      doc["states"].push_back(j);
      Table wf;
      wf.name = "bound_l" + std::to_string(s.ell) + "_n" + std::to_string(s.n_radial);
      wf.comments = {"units: r bohr, u bohr^-1/2 (unit norm, positive near the origin)", pline,
                     "ell: " + std::to_string(s.ell) + ", n_radial: " + std::to_string(s.n_radial) +
                         ", E_hartree: " + format_double(s.energy)};
      wf.columns = {"r_bohr", "u"};
      for (std::size_t i = 0; i < s.u.size(); ++i) wf.rows.push_back({s.grid->r(i), s.u[i]});
      wf.plot = {1};
      res.outputs.tables.push_back(std::move(wf));
      res.summary.push_back("l=" + std::to_string(s.ell) + " n=" + std::to_string(s.n_radial) +
                            " E=" + detail::fixed(s.energy, 12) + " hartree");
    }
  }
  res.outputs.tables.insert(res.outputs.tables.begin(), std::move(listing));
  res.outputs.documents.emplace_back("bound", doc);
  if (res.summary.empty()) res.summary.push_back("no bound states in the window");
  return res;
}

inline Json fit_json(const pw::FanoFit& fit, double large_q) {
  Json j;
  const auto& p = fit.params;
  const auto life = pw::resonance_lifetime(p.gamma);
  j["E_r"] = p.energy;
  j["Gamma"] = p.gamma;
  j["q"] = p.q;
  j["sigma_0"] = p.sigma_0;
  j["sigma_a"] = p.sigma_a;
  j["rms"] = fit.rms_residual;
  j["lifetime_au"] = life.au;
  j["lifetime_attosec"] = life.attosec;
  j["large_q_threshold"] = large_q;
  j["breit_wigner_limit"] = std::abs(p.q) > large_q;
  return j;
}

inline CommandResult cmd_resonance(const RunConfig& cfg, std::size_t threads) {
  const auto energies = cfg.scan->values();
  const double large_q = cfg.resonance ? cfg.resonance->large_q : 10.0;
  std::optional<std::pair<double, double>> window;
  if (cfg.resonance) window = cfg.resonance->window;
  CommandResult res;
  Json doc;
  Table t;
  t.name = "resonance";
  if (cfg.synthetic) {
    const auto& y = *cfg.synthetic;
    const pw::ResonanceParams truth{y.energy, y.gamma, y.q, y.sigma_0, y.sigma_a};
    std::vector<std::pair<double, double>> data;
    for (double e : energies) data.push_back({e, pw::fano_eval(truth, e)});
    const auto fit = pw::fano_fit(data, window);
    doc["source"] = "synthetic";
    Json injected;
    injected["E_r"] = truth.energy;
    injected["Gamma"] = truth.gamma;
    injected["q"] = truth.q;
    injected["sigma_0"] = truth.sigma_0;
    injected["sigma_a"] = truth.sigma_a;
    doc["injected"] = injected;
    doc["fit"] = fit_json(fit, large_q);
    t.comments = {"units: E hartree, sigma bohr^2", "source: synthetic Fano profile"};
    t.columns = {"E_hartree", "sigma_bohr2", "sigma_fit_bohr2"};
    for (const auto& [e, s] : data) t.rows.push_back({e, s, pw::fano_eval(fit.params, e)});
    t.plot = {1, 2};
    res.summary.push_back("fit: E_r=" + detail::fixed(fit.params.energy, 10) + " Gamma=" +
                          detail::fixed(fit.params.gamma, 10) + " q=" + detail::fixed(fit.params.q, 8));
  } else {
    const auto& spec = *cfg.potential;
    const int ell = cfg.resonance->ell;
    const pw::RadialGrid grid(cfg.grid, spec);
    pw::ScanOptions opts;
    opts.threads = threads;
    const auto curve = pw::phase_scan(spec, ell, energies, grid, opts);
    const auto w = window.value_or(std::make_pair(energies.front(), energies.back()));
    const auto dec = pw::decompose_phase(curve, w);
    std::vector<std::pair<double, double>> data;
    for (std::size_t i = 0; i < curve.size(); ++i) {
      data.push_back({curve.energies[i], pw::partial_cross_section(ell, curve.k(i), curve.deltas[i])});
    }
    const auto fit = pw::fano_fit(data, w);
    const auto eff = pw::effective_curve(spec, ell, grid);
    doc["source"] = "phase_scan";
    doc["potential"] = detail::describe(spec);
    doc["ell"] = ell;
    doc["window"] = Json::array({w.first, w.second});
    Json d;
    d["E_r"] = dec.energy;
    d["Gamma"] = dec.gamma;
    d["background_residual"] = dec.background_residual;
    d["identity_max_deviation"] = pw::identity_max_deviation(dec.decomp);
    doc["decomposition"] = d;
    doc["fit"] = fit_json(fit, large_q);
    const auto kind = pw::classify_resonance(eff, dec.energy);
    doc["classification"] = kind.empty() ? Json(nullptr) : Json(kind);
    t.comments = {"units: E hartree, phases rad, sigma bohr^2", detail::describe_line(spec),
                  "ell: " + std::to_string(ell)};
    t.columns = {"E_hartree", "delta_rad", "delta_a_rad", "delta_b_rad", "sigma_partial_bohr2", "sigma_fit_bohr2"};
    const auto& dd = dec.decomp;
    for (std::size_t i = 0; i < dd.energies.size(); ++i) {
      const double e = dd.energies[i];
      const double delta = dd.delta_a[i] + dd.delta_b[i];
      const double k = std::sqrt(2.0 * e);
      t.rows.push_back({e, delta, dd.delta_a[i], dd.delta_b[i], pw::partial_cross_section(ell, k, delta),
                        pw::fano_eval(fit.params, e)});
    }
    t.plot = {4, 5};
    res.summary.push_back("phase: E_r=" + detail::fixed(dec.energy, 10) + " Gamma=" + detail::fixed(dec.gamma, 8) +
                          (kind.empty() ? "" : " (" + kind + " resonance)"));
    res.summary.push_back("fit: E_r=" + detail::fixed(fit.params.energy, 10) + " Gamma=" +
                          detail::fixed(fit.params.gamma, 8) + " q=" + detail::fixed(fit.params.q, 6));
  }
  res.outputs.tables.push_back(std::move(t));
  res.outputs.documents.emplace_back("resonance", doc);
  return res;
}

inline CommandResult cmd_delay(const RunConfig& cfg, std::size_t threads) {
  const auto& spec = *cfg.potential;
  const pw::RadialGrid grid(cfg.grid, spec);
  const auto energies = cfg.scan->values();
  const auto mode = cfg.delay.half ? pw::DelayMode::HalfScattering : pw::DelayMode::FullScattering;
  const auto pline = detail::describe_line(spec);
  pw::ScanOptions opts;
  opts.threads = threads;
  pw::StructureOptions sopts;
  sopts.median_factor = cfg.delay.median_factor;
  CommandResult res;
  Json doc;
  doc["potential"] = detail::describe(spec);
  doc["mode"] = pw::mode_name(mode);
  doc["channels"] = Json::array();
  for (int ell : *cfg.scan_ells) {
    const auto curve = pw::phase_scan(spec, ell, energies, grid, opts);
    const auto tdc = pw::time_delay(curve, mode);
    res.outputs.tables.push_back(detail::delay_table("delay_l" + std::to_string(ell), tdc, pline, ell));
    Json ch;
    ch["ell"] = ell;
    if (mode == pw::DelayMode::FullScattering && spec.range_radius() > 0.0) {
      const auto report = pw::causality_check(tdc, spec.range_radius());
      Json c;
      c["range_radius"] = spec.range_radius();
      c["checked"] = report.checked;
      c["violations"] = Json::array();
      for (const auto& v : report.violations) {
        c["violations"].push_back(Json{{"energy", v.energy}, {"tau", v.tau}, {"bound", v.bound}});
      }
      ch["causality"] = c;
      res.summary.push_back("l=" + std::to_string(ell) + ": " + std::to_string(report.violations.size()) +
                            " causality violations in " + std::to_string(report.checked) + " points");
    } else {
      ch["causality"] = nullptr;
    }
    const auto features = pw::delay_structure_scan(tdc, sopts);
    ch["features"] = detail::features_json(features);
    if (cfg.resonance && cfg.resonance->ell == ell) {
      const auto w = cfg.resonance->window.value_or(std::make_pair(energies.front(), energies.back()));
      const auto dec = pw::decompose_phase(curve, w);
      double peak = -std::numeric_limits<double>::infinity();
      for (const auto& f : features) {
        if (f.kind == pw::FeatureKind::Peak && f.energy >= w.first && f.energy <= w.second) {
          peak = std::max(peak, f.tau_extremum);
        }
      }
      Json r;
      r["E_r"] = dec.energy;
      r["Gamma"] = dec.gamma;
      r["four_over_gamma"] = 4.0 / dec.gamma;
      r["tau_peak"] = peak;
      r["ratio"] = peak * dec.gamma / 4.0;
      ch["resonance"] = r;
      res.summary.push_back("l=" + std::to_string(ell) + ": tau peak " + detail::fixed(peak, 8) + " a.u. vs 4/Gamma " +
                            detail::fixed(4.0 / dec.gamma, 8));
    }
    doc["channels"].push_back(ch);
  }
  res.outputs.documents.emplace_back("delay", doc);
  return res;
}

inline CommandResult cmd_photo(const RunConfig& cfg, std::size_t threads) {
  const auto& spec = *cfg.potential;
  const auto& p = *cfg.photo;
  const auto pline = detail::describe_line(spec);
  pw::BoundSearchOptions bopts;
  bopts.grid = cfg.grid;
  if (!(cfg.potential_floor < p.bound_e_max)) {
    throw pw::NumericalError("photo", "potential has no bound states below bound_e_max");
  }
  const auto states = pw::find_bound_states(spec, p.ell, {cfg.potential_floor, p.bound_e_max}, 1000, bopts);
  const pw::BoundState* initial = nullptr;
  for (const auto& s : states) {
    if (s.n_radial == p.n_radial) initial = &s;
  }
  if (!initial) {
    throw pw::NumericalError("photo", "no bound state with l = " + std::to_string(p.ell) +
                                          ", n_radial = " + std::to_string(p.n_radial));
  }
  const auto energies = p.energies.values();
  const auto scan = pw::photodetachment_cross_section(*initial, spec, energies, threads);
  const auto tenergies = p.threshold.values();
  const auto tscan = pw::photodetachment_cross_section(*initial, spec, tenergies, threads);

  CommandResult res;
  Json doc;
  doc["potential"] = detail::describe(spec);
  doc["initial_state"] = Json{{"ell", initial->ell}, {"n_radial", initial->n_radial}, {"energy", initial->energy}};
  doc["channels"] = Json::array();
  res.summary.push_back("initial state l=" + std::to_string(initial->ell) + " n=" + std::to_string(initial->n_radial) +
                        " E=" + detail::fixed(initial->energy, 12) + " hartree");
  for (std::size_t c = 0; c < scan.channels.size(); ++c) {
    const auto& ch = scan.channels[c];
    const int lf = ch.final_ell;
    const std::string tag = "l'=" + std::to_string(lf);
    Table t;
    t.name = "photo_l" + std::to_string(lf);
    t.comments = {"units: E photoelectron energy hartree, omega photon energy hartree, D atomic units, sigma bohr^2",
                  pline, "initial: l=" + std::to_string(initial->ell) + " n_radial=" + std::to_string(initial->n_radial),
                  "final l: " + std::to_string(lf)};
    t.columns = {"E_hartree", "omega_hartree", "D_au", "sigma_partial_bohr2"};
    for (std::size_t i = 0; i < ch.energies.size(); ++i) {
      t.rows.push_back({ch.energies[i], ch.photon_energies[i], ch.dipole[i], ch.sigma_partial[i]});
    }
    t.plot = {2};
    res.outputs.tables.push_back(std::move(t));

    Json j;
    j["final_ell"] = lf;
    j["weight"] = ch.weight;
    j["D_lowest_energy"] = ch.dipole.front();
    std::optional<double> ecm;
    try {
      const auto cm = pw::find_cooper_minimum(ch);
      ecm = cm.energy;
      j["cooper_minimum"] = Json{{"E_CM", cm.energy}, {"lo", cm.lo}, {"hi", cm.hi},
                                 {"sample_lo", cm.sample_lo}, {"sample_hi", cm.sample_hi}};
      res.summary.push_back(tag + ": Cooper minimum at E = " + detail::fixed(cm.energy, 12) + " hartree");
    } catch (const pw::NumericalError& e) {
      if (std::string(e.what()).find("no Cooper minimum") == std::string::npos) throw;
      j["cooper_minimum"] = nullptr;
      j["status"] = "no Cooper minimum detected";
      res.summary.push_back(tag + ": no Cooper minimum detected");
    }
    const auto& tch = tscan.channels[c];
    const auto fit = pw::threshold_exponent_fit(tch, p.threshold_decades, lf);
    j["threshold_fit"] = Json{{"exponent", fit.exponent}, {"stderr", fit.stderr_}, {"expected", fit.expected},
                              {"points", fit.points}};
    res.summary.push_back(tag + ": threshold exponent " + detail::fixed(fit.exponent, 6) + " (expected " +
                          detail::fixed(fit.expected, 3) + ")");
    Table th;
    th.name = "photo_threshold_l" + std::to_string(lf);
    th.comments = {"units: E hartree, D atomic units, sigma bohr^2", pline, "final l: " + std::to_string(lf)};
    th.columns = {"E_hartree", "omega_hartree", "D_au", "sigma_partial_bohr2"};
    for (std::size_t i = 0; i < tch.energies.size(); ++i) {
      th.rows.push_back({tch.energies[i], tch.photon_energies[i], tch.dipole[i], tch.sigma_partial[i]});
    }
    th.plot = {3};
    res.outputs.tables.push_back(std::move(th));

    const auto phase = pw::photoemission_phase(ch, ecm);
    const auto tdc = pw::time_delay(phase, pw::DelayMode::HalfScattering);
    const auto features = pw::delay_structure_scan(tdc);
    j["delay_features"] = detail::features_json(features);
    res.outputs.tables.push_back(detail::delay_table("photo_delay_l" + std::to_string(lf), tdc, pline, lf));
    doc["channels"].push_back(j);
  }
  Table total;
  total.name = "photo_total";
  total.comments = {"units: E hartree, omega hartree, sigma bohr^2", pline};
  total.columns = {"E_hartree", "omega_hartree", "sigma_total_bohr2"};
  for (std::size_t i = 0; i < energies.size(); ++i) {
    total.rows.push_back({energies[i], scan.channels.front().photon_energies[i], scan.sigma_total[i]});
  }
  total.plot = {2};
  res.outputs.tables.push_back(std::move(total));
  res.outputs.documents.emplace_back("photo", doc);
  return res;
}

inline CommandResult cmd_wkb(const RunConfig& cfg, std::size_t) {
  const auto& spec = *cfg.potential;
  const auto& w = *cfg.wkb;
  const pw::RadialGrid grid(cfg.grid, spec);
  const auto curve = pw::effective_curve(spec, w.ell, grid);
  const auto top = pw::langer_barrier_top(curve);
  const auto pline = detail::describe_line(spec);

  // Threshold law: ln T against ln k over one decade from k_min.
  std::vector<double> lk;
  std::vector<double> lt;
  for (int i = 0; i < w.k_points; ++i) {
    const double k = w.k_min * std::pow(10.0, static_cast<double>(i) / (w.k_points - 1));
    const auto seg = pw::barrier_segment(curve, 0.5 * k * k);
    lk.push_back(std::log(k));
    lt.push_back(std::log(pw::tunneling_probability(seg)));
  }
  const double slope = detail::slope_fit(lk, lt);
  const double expected = 2.0 * w.ell + 1.0;
  const std::string fit_line = "T(k) exponent fit: " + detail::fixed(slope, 8) + " (expected 2l+1 = " +
                               detail::fixed(expected, 3) + ", k in [" + detail::fixed(w.k_min, 6) + ", " +
                               detail::fixed(10.0 * w.k_min, 6) + "])";

  Table t;
  t.name = "wkb";
  t.comments = {"units: E hartree, r bohr, action dimensionless, traversal time attoseconds", pline,
                "ell: " + std::to_string(w.ell) + " (Langer form (l+1/2)^2 / 2r^2)",
                "V_B: " + format_double(top.value) + " at r = " + format_double(top.r), fit_line};
  t.columns = {"E_hartree", "r_inner", "r_outer", "action", "T", "traversal_attosec", "status"};
  for (double e : w.energies.values()) {
    if (!(e < top.value)) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      t.rows.push_back({e, nan, nan, nan, nan, nan, std::string("no barrier")});
      continue;
    }
    const auto seg = pw::barrier_segment(curve, e);
    t.rows.push_back({e, seg.r_inner, seg.r_outer, seg.action, pw::tunneling_probability(seg),
                      pw::traversal_time(seg).time_attosec, std::string("ok")});
  }
  t.plot = {3};

  Json doc;
  doc["potential"] = detail::describe(spec);
  doc["ell"] = w.ell;
  doc["langer_barrier"] = Json{{"r", top.r}, {"V", top.value}, {"at_wall", top.at_wall}};
  const auto feature = [](const std::optional<pw::CurveFeature>& f) {
    return f ? Json{{"r", f->r}, {"V", f->value}, {"at_wall", f->at_wall}} : Json(nullptr);
  };
  doc["inner_minimum"] = feature(curve.inner_minimum);
  doc["barrier"] = feature(curve.barrier);
  doc["outer_minimum"] = feature(curve.outer_minimum);
  if (top.value > 0.0) {
    const double e = 0.5 * top.value;
    const auto seg = pw::barrier_segment(curve, e);
    const auto tt = pw::traversal_time(seg);
    doc["mid_barrier"] = Json{{"energy", e},
                              {"r_inner", seg.r_inner},
                              {"r_outer", seg.r_outer},
                              {"action", seg.action},
                              {"T", pw::tunneling_probability(seg)},
                              {"time_au", tt.time_au},
                              {"time_attosec", tt.time_attosec}};
  } else {
    doc["mid_barrier"] = nullptr;
  }
  doc["threshold_fit"] = Json{{"k_min", w.k_min}, {"k_max", 10.0 * w.k_min}, {"points", w.k_points},
                              {"slope", slope}, {"expected", expected}};
  CommandResult res;
  res.outputs.tables.push_back(std::move(t));
  res.outputs.documents.emplace_back("wkb", doc);
  res.summary.push_back(fit_line);
  if (top.value > 0.0) {
    res.summary.push_back("mid-barrier traversal time: " +
                          detail::fixed(doc["mid_barrier"]["time_attosec"].get<double>(), 8) + " as");
  }
  return res;
}

inline CommandResult dispatch(const std::string& command, const RunConfig& cfg, std::size_t threads) {
  if (command == "scan") return cmd_scan(cfg, threads);
  if (command == "bound") return cmd_bound(cfg, threads);
  if (command == "resonance") return cmd_resonance(cfg, threads);
  if (command == "delay") return cmd_delay(cfg, threads);
  if (command == "photo") return cmd_photo(cfg, threads);
  if (command == "wkb") return cmd_wkb(cfg, threads);
  throw ConfigError("unknown command '" + command + "'");
}

inline std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Full command-line entry point. args[0] is the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Partial-wave scattering, resonance, time-delay, photodetachment and JWKB barrier analysis"};
  app.set_version_flag("--version", version);
  app.require_subcommand(1, 1);
  std::string config_path;
  std::string out_dir;
  std::string format;
  int threads_arg = -1;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"scan", "phase shifts and cross sections over an energy grid"},
      {"bound", "bound-state energies and wave functions"},
      {"resonance", "phase decomposition and Fano fit of a resonance"},
      {"delay", "scattering time delays, causality check and delay structures"},
      {"photo", "photodetachment dipoles, Cooper minima and threshold exponents"},
      {"wkb", "JWKB barrier penetration table"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "INI run configuration")->required();
    sub->add_option("--out", out_dir, "output directory (default: [output] directory, else ./partialwave_out)");
    sub->add_option("--format", format, "comma-separated subset of csv,json,svg (default csv,json)");
    sub->add_option("--threads", threads_arg, "worker threads, 0 = hardware concurrency")
        ->check(CLI::NonNegativeNumber);
  }
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? Ok : ConfigFailure;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  RunConfig cfg;
  std::vector<std::string> formats;
  std::size_t threads = 0;
  try {
    cfg = load_config(config_path);
    validate_for(command, cfg);
    formats = !format.empty() ? detail::split_list(format) : cfg.formats.value_or(std::vector<std::string>{"csv", "json"});
    for (const auto& f : formats) {
      if (f != "csv" && f != "json" && f != "svg") throw ConfigError("unknown output format '" + f + "'");
    }
    int requested = threads_arg;
    if (requested < 0) {
      if (const char* env = std::getenv("PARTIALWAVE_THREADS")) {
        requested = detail::parse_int("PARTIALWAVE_THREADS", env);
        if (requested < 0) throw ConfigError("PARTIALWAVE_THREADS must be >= 0");
      } else {
        requested = 0;
      }
    }
    threads = pw::resolve_threads(static_cast<std::size_t>(requested));
  } catch (const ConfigError& e) {
    err << e.what() << "\n";
    return ConfigFailure;
  } catch (const IoError& e) {
    err << e.what() << "\n";
    return IoFailure;
  }

  CommandResult result;
  try {
    result = dispatch(command, cfg, threads);
  } catch (const pw::Error& e) {
    err << e.what() << "\n";
    return NumericalFailure;
  } catch (const std::exception& e) {
    err << command << ": " << e.what() << "\n";
    return NumericalFailure;
  }

  const std::filesystem::path dir = !out_dir.empty() ? std::filesystem::path(out_dir)
                                    : cfg.out_dir     ? std::filesystem::path(*cfg.out_dir)
                                                      : std::filesystem::path("partialwave_out");
  try {
    const auto files = write_outputs(result.outputs, dir, formats);
    Json manifest;
    manifest["tool"] = "partialwave";
    manifest["version"] = version;
    manifest["command"] = command;
    manifest["config"] = config_path;
    manifest["formats"] = formats;
    manifest["threads"] = threads;
    manifest["files"] = files;
    manifest["created_utc"] = utc_now();
    write_file(dir / "manifest.json", to_json_text(manifest));
  } catch (const IoError& e) {
    err << e.what() << "\n";
    return IoFailure;
  }
  for (const auto& line : result.summary) out << line << "\n";
  return Ok;
}

}  // namespace pwcli
