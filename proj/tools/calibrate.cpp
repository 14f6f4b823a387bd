// Parameter search behind the curated configs.
//   calibrate cooper     Yukawa (Z, d) table for a one-node p orbital: bound energy,
//                        D(0+) sign per channel and the first p -> d sign change
//   calibrate confirm    dense-grid check of the Cl-like Cooper bracket
//   calibrate barrier    l = 3 Yukawa curves: inner minimum, barrier top, shape resonance

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oracles/catalog.hpp"
#include "partialwave/partialwave.hpp"

namespace pw = partialwave;

namespace {

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return out;
}

void cooper_table(const std::vector<double>& charges, const std::vector<double>& screenings, int n_radial) {
  std::printf("%6s %6s %14s %12s %12s %14s\n", "Z", "d", "E_b", "D_s(0+)", "D_d(0+)", "E_CM(d)");
  for (double z : charges) {
    for (double d : screenings) {
      const auto spec = pw::PotentialSpec::yukawa(z, d);
      const auto states = pw::find_bound_states(spec, 1, {-0.5 * z * z * (1.0 + 1e-6), -1e-3}, 1000);
      const pw::BoundState* state = nullptr;
      for (const auto& s : states) {
        if (s.n_radial == n_radial) state = &s;
      }
      if (!state) {
        std::printf("%6.2f %6.2f %14s\n", z, d, "unbound");
        continue;
      }
      const auto scan = pw::photodetachment_cross_section(*state, spec, linspace(0.02, 5.0, 125));
      std::string zero = "-";
      try {
        zero = std::to_string(pw::find_cooper_minimum(scan.channels[1]).energy);
      } catch (const pw::NumericalError&) {
      }
      std::printf("%6.2f %6.2f %14.8f %12.4e %12.4e %14s\n", z, d, state->energy, scan.channels[0].dipole.front(),
                  scan.channels[1].dipole.front(), zero.c_str());
    }
  }
}

void confirm() {
  const oracle::DenseDipole dense(20.0, 0.5, 1, 1, 2);
  std::printf("dense-grid bound energy %.10f\n", dense.bound_energy());
  for (int refine : {1, 10}) {
    const auto b = dense.zero_bracket(oracle::cl_coarse_samples(), refine);
    if (!b) {
      std::printf("refine %2d: no sign change\n", refine);
      continue;
    }
    std::printf("refine %2d: bracket [%.6f, %.6f], zero %.12f\n", refine, b->lo, b->hi, b->zero);
  }
}

void barrier_table(const std::vector<double>& charges, const std::vector<double>& screenings) {
  std::printf("%6s %6s %12s %12s %12s %12s %12s\n", "Z", "d", "V_min", "V_B", "r_B", "E_r", "Gamma");
  for (double z : charges) {
    for (double d : screenings) {
      const auto spec = pw::PotentialSpec::yukawa(z, d);
      pw::GridSpec g;
      g.r_max = 30.0;
      g.n_points = 20000;
      const pw::RadialGrid grid(g, spec);
      const auto curve = pw::effective_curve(spec, 3, grid);
      if (!curve.inner_minimum || !curve.barrier || curve.barrier->value <= 0.0) {
        std::printf("%6.1f %6.2f %12s\n", z, d, "no barrier");
        continue;
      }
      std::string er = "-";
      std::string gw = "-";
      try {
        // steepest rise on a coarse scan, then a local window for the decomposition
        const double top = curve.barrier->value;
        const auto coarse = pw::phase_scan(spec, 3, linspace(0.02, top, 2000), grid);
        std::size_t steep = 1;
        for (std::size_t i = 1; i < coarse.size(); ++i) {
          if (coarse.deltas[i] - coarse.deltas[i - 1] > coarse.deltas[steep] - coarse.deltas[steep - 1]) steep = i;
        }
        const double lo = std::max(0.01, coarse.energies[steep] - 0.05);
        const double hi = std::min(top, coarse.energies[steep] + 0.05);
        const auto fine = pw::phase_scan(spec, 3, linspace(lo, hi, 801), grid);
        const auto dec = pw::decompose_phase(fine, {lo, hi});
        er = std::to_string(dec.energy);
        gw = std::to_string(dec.gamma);
      } catch (const pw::Error&) {
        er = "none";
      }
      std::printf("%6.1f %6.2f %12.5f %12.5f %12.5f %12s %12s\n", z, d, curve.inner_minimum->value,
                  curve.barrier->value, curve.barrier->r, er.c_str(), gw.c_str());
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Model-potential calibration tables"};
  app.require_subcommand(1, 1);
  std::vector<double> charges;
  std::vector<double> screenings;
  int n_radial = 1;
  auto* cooper = app.add_subcommand("cooper", "Cooper-minimum search over Yukawa parameters");
  cooper->add_option("--charge", charges, "charges Z")->default_str("10 15 20 25");
  cooper->add_option("--screening", screenings, "screening lengths d")->default_str("0.25 0.5 1");
  cooper->add_option("--n-radial", n_radial, "radial nodes of the p orbital");
  app.add_subcommand("confirm", "dense-grid confirmation of the Cl-like bracket");
  auto* barrier = app.add_subcommand("barrier", "l = 3 barrier and shape-resonance table");
  barrier->add_option("--charge", charges, "charges Z");
  barrier->add_option("--screening", screenings, "screening lengths d");
  CLI11_PARSE(app, argc, argv);

  try {
    if (cooper->parsed()) {
      if (charges.empty()) charges = {10.0, 15.0, 20.0, 25.0};
      if (screenings.empty()) screenings = {0.25, 0.5, 1.0};
      cooper_table(charges, screenings, n_radial);
    } else if (barrier->parsed()) {
      if (charges.empty()) charges = {40.0, 80.0, 112.0, 160.0};
      if (screenings.empty()) screenings = {0.25, 0.5};
      barrier_table(charges, screenings);
    } else {
      confirm();
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 3;
  }
  return 0;
}
