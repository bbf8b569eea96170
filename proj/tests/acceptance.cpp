// Acceptance run: one PASS/FAIL line per criterion, indented diagnostics
// underneath. Exit status is non-zero when any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "biphase/error.hpp"
#include "biphase/io.hpp"
#include "biphase/scenario.hpp"
#include "goldens.hpp"
#include "support.hpp"

using namespace biphase;
using oracle::kPi;

namespace {

struct Verdict {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    notes.push_back(std::string(ok ? "ok   " : "MISS ") + what);
  }
  void note(const std::string& what) { notes.push_back("     " + what); }
};

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

std::filesystem::path scenario_file(const std::string& name) {
  return std::filesystem::path(BIPHASE_SCENARIO_DIR) / (name + ".json");
}

DetectorConfig noiseless() {
  DetectorConfig d;
  d.noiseless = true;
  return d;
}

DetectorConfig lab_noise(std::uint64_t seed) {
  DetectorConfig d;  // 1450 counts per 10 s window at unit probability, 5 repeats
  d.seed = seed;
  return d;
}

IntensitySpectrum exact_spectrum(const BiphotonState& s) {
  IntensitySpectrum out;
  for (const auto& [mode, c] : s.coefficients()) out[mode] = std::norm(c);
  return out;
}

// Full measurement chain: spectrum pass, plan from the measured spectrum,
// phase acquisition.
PhasedSpectrum measure(const Scenario& sc, const BiphotonState& truth, const DetectorConfig& det) {
  const auto spectrum = measure_spectrum(mode_grid(truth.bandwidth()), truth, det);
  return execute_plan(make_plan(sc, spectrum.intensity), truth, det);
}

double circular_std(const std::vector<double>& phases) {
  cplx sum{};
  for (double p : phases) sum += std::polar(1.0, p);
  const double r = std::abs(sum) / static_cast<double>(phases.size());
  return std::sqrt(-2.0 * std::log(r));
}

BiphotonState gaussian_pump_state() {
  return assemble_state(io::load_fixture(data_path("gaussian_pump_phases.json")), 2);
}

// ---------------------------------------------------------------------------

Verdict noiseless_fidelity() {
  Verdict v;
  const auto start = std::chrono::steady_clock::now();
  gen::Rng rng(2024);
  int feasible = 0, attempts = 0;
  double worst = 1.0;
  while (feasible < 120 && attempts < 2000) {
    ++attempts;
    BiphotonState s(2);
    switch (attempts % 4) {
      case 0: s = gen::random_full_state(rng, 2); break;
      case 1: s = gen::random_diagonal_state(rng, 2); break;
      case 2: s = gen::random_two_diagonal_state(rng, 2); break;
      default: {
        // Random support around the root.
        double total = 0.0;
        std::vector<std::pair<ModePair, cplx>> terms;
        for (const auto& mode : mode_grid(2))
          if (mode == ModePair{0, 0} || rng.uniform() < 0.4) {
            const cplx c = std::polar(rng.uniform(0.2, 1.0), rng.uniform(0, 2 * kPi));
            terms.push_back({mode, c});
            total += std::norm(c);
          }
        for (const auto& [mode, c] : terms) s.set(mode, c / std::sqrt(total));
      }
    }
    MeasurementPlan plan;
    try {
      plan = attempts % 4 == 1 ? plan_ancillary(exact_spectrum(s), {0, 0})
                               : plan_inductive(exact_spectrum(s), {0, 0});
    } catch (const InfeasiblePlanError&) {
      continue;
    }
    const auto out = execute_plan(plan, s, noiseless());
    worst = std::min(worst, fidelity(assemble_state(out, 2), s));
    ++feasible;
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  v.require(feasible >= 100, fmt("%d feasible random states (of %d drawn)", feasible, attempts));
  v.require(worst >= 1.0 - 1e-9, fmt("worst fidelity 1 - %.3e", 1.0 - worst));
  v.require(secs < 10.0, fmt("runtime %.3f s", secs));
  return v;
}

Verdict gouy_slope() {
  Verdict v;
  const auto sc = load_scenario(scenario_file("gouy_fit"));
  const auto truth = prepare_state(sc);
  const auto exact = fit_gouy_slope(diagonal_phases(measure(sc, truth, noiseless())));
  v.require(std::abs(exact.slope + 2.57) <= 1e-6, fmt("noiseless C = %.9f", exact.slope));
  double sum = 0.0, sum2 = 0.0;
  const int seeds = 20;
  for (int seed = 1; seed <= seeds; ++seed) {
    const double c = fit_gouy_slope(diagonal_phases(measure(sc, truth, lab_noise(seed)))).slope;
    sum += c;
    sum2 += c * c;
  }
  const double mean = sum / seeds;
  const double sd = std::sqrt(std::max(0.0, sum2 / seeds - mean * mean) * seeds / (seeds - 1));
  v.require(std::abs(mean + 2.57) <= 0.1,
            fmt("lab noise, 20 seeds: mean C = %.4f, seed scatter %.4f", mean, sd));
  return v;
}

Verdict gaussian_pump_table() {
  Verdict v;
  const auto fixture = io::load_fixture(data_path("gaussian_pump_phases.json"));
  const auto state = assemble_state(fixture, 2);
  double worst_i = 0.0;
  for (const auto& e : fixture.entries)
    worst_i = std::max(worst_i, std::abs(coincidence_probability(bare_device(e.mode), state) -
                                         e.intensity));
  v.require(worst_i <= 1e-15, fmt("bare-device probabilities, max deviation %.1e", worst_i));
  const auto plan = plan_ancillary(exact_spectrum(state), {0, 0});
  const auto out = execute_plan(plan, state, noiseless());
  double worst_p = 0.0;
  for (const auto& e : fixture.entries)
    worst_p = std::max(worst_p, oracle::angle_gap(out.at(e.mode).phase, e.phase));
  v.require(worst_p <= 1e-9, fmt("ancillary-plan phases, max deviation %.1e rad", worst_p));
  return v;
}

Verdict high_order_table() {
  Verdict v;
  const auto fixture = io::load_fixture(data_path("high_order_phases.json"));
  const auto fit = fit_gouy_slope(diagonal_phases(fixture));
  v.require(std::abs(fit.slope + 2.91) <= 0.01, fmt("C = %.4f rad", fit.slope));
  std::string pts;
  for (const auto& [order, phase] : fit.unwrapped) pts += fmt(" |m|=%d:%.3f", order, phase);
  v.note("unwrapped phases" + pts);
  return v;
}

Verdict geometric_phase() {
  Verdict v;
  auto sc = load_scenario(scenario_file("dove_sweep"));
  const auto base = prepare_state(sc);
  auto sweep = [&](const DetectorConfig& det) {
    std::vector<std::pair<double, PhasedSpectrum>> spectra;
    for (std::size_t i = 0; i < sc.sweep_eta.size(); ++i) {
      auto d = det;
      if (i) d.seed = stream_seed(det.seed, 0x5eed5eedULL, i);
      spectra.emplace_back(sc.sweep_eta[i],
                           measure(sc, apply_dove_pair(base, sc.sweep_eta[i], sc.sweep_arm), d));
    }
    return extract_geometric_phase(spectra);
  };
  double worst = 0.0, worst_sym = 0.0;
  for (const auto& p : sweep(noiseless())) {
    worst = std::max({worst, oracle::angle_gap(p.shift_plus, 2 * p.eta),
                      oracle::angle_gap(p.shift_minus, -2 * p.eta)});
    worst_sym = std::max(worst_sym, oracle::angle_gap(p.shift_plus, -p.shift_minus));
  }
  v.require(worst <= 1e-9, fmt("noiseless: max |dphi - 2 eta| = %.1e", worst));
  v.require(worst_sym <= 1e-9, fmt("noiseless: series sign-opposite to %.1e", worst_sym));
  bool within = true, opposite = true;
  double worst_z = 0.0;
  for (const auto& p : sweep(lab_noise(sc.detector.seed))) {
    if (p.eta == 0.0) continue;
    const double zp = oracle::angle_gap(p.shift_plus, 2 * p.eta) / p.err_plus;
    const double zm = oracle::angle_gap(p.shift_minus, -2 * p.eta) / p.err_minus;
    worst_z = std::max({worst_z, zp, zm});
    within = within && zp <= 3.0 && zm <= 3.0;
    if (p.eta < kPi / 2 - 1e-9) opposite = opposite && p.shift_plus > 0 && p.shift_minus < 0;
    v.note(fmt("eta %5.1f deg: +%.3f +- %.3f, %.3f +- %.3f (expected +-%.3f)", p.eta * 180 / kPi,
               p.shift_plus, p.err_plus, p.shift_minus, p.err_minus, 2 * p.eta));
  }
  v.require(within, fmt("lab noise: worst deviation %.2f sigma", worst_z));
  v.require(opposite, "lab noise: +1 and -1 series carry opposite signs");
  return v;
}

Verdict structured_pump() {
  Verdict v;
  auto sc = load_scenario(scenario_file("pump_sweep"));
  auto state_at = [&](double phase) {
    PumpSpec pump = *sc.pump;
    for (auto& c : pump.components)
      if (c.ell == sc.sweep_pump_ell) c.weight = std::polar(std::abs(c.weight), phase);
    return synthesize(pump, sc.bandwidth);
  };
  auto offset_of = [&](const PhasedSpectrum& s) {
    cplx main{}, off{};
    for (const auto& e : s.entries) {
      if (e.mode.m + e.mode.n == 0) main += std::polar(1.0, e.phase);
      if (e.mode.m + e.mode.n == sc.sweep_pump_ell) off += std::polar(1.0, e.phase);
    }
    return std::arg(off) - std::arg(main);
  };
  double worst = 0.0, worst_i = 0.0;
  const auto ref = measure(sc, state_at(0.0), noiseless());
  for (double phase : sc.sweep_pump_phases) {
    const auto out = measure(sc, state_at(phase), noiseless());
    worst = std::max(worst, oracle::angle_gap(offset_of(out), phase));
    for (const auto& e : out.entries)
      worst_i = std::max(worst_i, std::abs(e.intensity - ref.at(e.mode).intensity));
  }
  v.require(worst <= 1e-9, fmt("noiseless: max |offset - applied| = %.1e rad", worst));
  v.require(worst_i <= 1e-12, fmt("noiseless: intensities identical to %.1e", worst_i));

  // Lab noise: per-shift ensemble means of each intensity, compared with
  // the seed-to-seed scatter.
  const int seeds = 20;
  std::map<ModePair, std::vector<std::vector<double>>> samples;
  for (std::size_t k = 0; k < sc.sweep_pump_phases.size(); ++k)
    for (int seed = 1; seed <= seeds; ++seed) {
      const auto out = measure(sc, state_at(sc.sweep_pump_phases[k]), lab_noise(seed * 7919 + k));
      for (const auto& e : out.entries) {
        auto& per = samples[e.mode];
        per.resize(sc.sweep_pump_phases.size());
        per[k].push_back(e.intensity);
      }
    }
  double worst_z = 0.0;
  for (const auto& [mode, per] : samples) {
    std::vector<double> means, sems;
    for (const auto& xs : per) {
      double m = 0, s2 = 0;
      for (double x : xs) m += x;
      m /= xs.size();
      for (double x : xs) s2 += (x - m) * (x - m);
      means.push_back(m);
      sems.push_back(std::sqrt(s2 / (xs.size() - 1) / xs.size()));
    }
    for (std::size_t k = 1; k < means.size(); ++k)
      worst_z = std::max(worst_z, std::abs(means[k] - means[0]) / std::hypot(sems[k], sems[0]));
  }
  v.require(worst_z <= 3.0,
            fmt("lab noise: intensity shifts across pump phases within %.2f sigma", worst_z));
  return v;
}

Verdict arm_symmetry() {
  Verdict v;
  gen::Rng rng(77);
  std::vector<BiphotonState> states{gaussian_pump_state()};
  for (int i = 0; i < 30; ++i) states.push_back(gen::random_diagonal_state(rng, 2));
  for (int i = 0; i < 5; ++i)
    states.push_back(apply_dove_pair(gen::random_diagonal_state(rng, 1), rng.uniform(0, kPi), Arm::A));
  double worst = 0.0;
  int edges = 0;
  for (const auto& s : states) {
    PlanOptions a, b;
    a.stepped_arm = Arm::A;
    b.stepped_arm = Arm::B;
    const auto pa = plan_ancillary(exact_spectrum(s), {0, 0}, a);
    const auto pb = plan_ancillary(exact_spectrum(s), {0, 0}, b);
    for (std::size_t i = 0; i < pa.edges.size(); ++i) {
      const double fa = psdh_phase(acquire_series(pa.edges[i], s, noiseless())).phase;
      const double fb = psdh_phase(acquire_series(pb.edges[i], s, noiseless())).phase;
      worst = std::max(worst, oracle::angle_gap(fa, fb));
      ++edges;
    }
  }
  v.require(worst <= 1e-9, fmt("%d edges, max |phi_A - phi_B| = %.1e rad", edges, worst));
  return v;
}

Verdict noise_realism() {
  Verdict v;
  const auto state = gaussian_pump_state();
  const auto plan = plan_ancillary(exact_spectrum(state), {0, 0});
  std::map<ModePair, std::vector<double>> phases;
  std::map<ModePair, double> reported;
  for (int seed = 1; seed <= 100; ++seed) {
    const auto out = execute_plan(plan, state, lab_noise(seed));
    for (const auto& e : out.entries)
      if (e.mode != plan.root) {
        phases[e.mode].push_back(e.phase);
        reported[e.mode] += e.phase_err / 100.0;
      }
  }
  for (const auto& [mode, xs] : phases) {
    const double sd = circular_std(xs);
    v.require(sd >= 0.02 && sd <= 0.4,
              fmt("%s: 100-seed phase scatter %.3f rad (mean propagated error %.3f)",
                  to_string(mode).c_str(), sd, reported[mode]));
  }
  return v;
}

// Propagated one-sigma error of Im(rho_ij) for rho built from measured
// amplitudes and phases, normalised over the chosen basis.
double im_rho_error(const SpectrumEntry& a, const SpectrumEntry& b, double norm) {
  const double ai = std::sqrt(a.intensity), aj = std::sqrt(b.intensity);
  const double d = a.phase - b.phase;
  const double sai = a.intensity_err / (2 * ai), saj = b.intensity_err / (2 * aj);
  const double var = std::pow(aj * std::sin(d) * sai, 2) + std::pow(ai * std::sin(d) * saj, 2) +
                     std::pow(ai * aj * std::cos(d), 2) *
                         (a.phase_err * a.phase_err + b.phase_err * b.phase_err);
  return std::sqrt(var) / norm;
}

Verdict density_matrices() {
  Verdict v;
  // Reconstruction of the Gaussian-pump state at lab noise, ancilla excluded.
  const auto state = gaussian_pump_state();
  const auto out =
      execute_plan(plan_ancillary(exact_spectrum(state), {0, 0}), state, lab_noise(1));
  const auto basis = ordered_basis(2, false);
  const auto assembled = assemble_state(out, 2).without({0, 0});
  const auto rho = density_matrix(assembled, basis);
  double norm = 0.0;
  for (const auto& e : out.entries)
    if (e.mode != out.root) norm += e.intensity;
  double worst = 0.0, worst_err = 0.0, worst_same = 0.0, worst_same_err = 0.0;
  std::string where;
  for (int i = 0; i < rho.dim(); ++i)
    for (int k = 0; k < rho.dim(); ++k) {
      const auto* ei = out.find(basis[i]);
      const auto* ek = out.find(basis[k]);
      if (!ei || !ek || i == k) continue;
      const double im = std::abs(rho.rho(i, k).imag());
      const double err = im_rho_error(*ei, *ek, norm);
      if (std::abs(basis[i].m) == std::abs(basis[k].m)) {
        if (im > worst_same) {
          worst_same = im;
          worst_same_err = err;
        }
      }
      if (im > worst) {
        worst = im;
        worst_err = err;
        where = to_string(basis[i]) + "x" + to_string(basis[k]);
      }
    }
  v.require(worst < worst_err, fmt("max |Im rho| = %.4f at %s, propagated error %.4f", worst,
                                   where.c_str(), worst_err));
  v.note(fmt("equal-|m| entries only: max |Im rho| = %.4f, propagated error %.4f", worst_same,
             worst_same_err));
  double table_im = 0.0;
  const auto exact = density_matrix(state.without({0, 0}), basis);
  for (int i = 0; i < exact.dim(); ++i)
    for (int k = 0; k < exact.dim(); ++k) table_im = std::max(table_im, std::abs(exact.rho(i, k).imag()));
  v.note(fmt("reference table values alone, no noise: max |Im rho| = %.4f", table_im));

  // Geometric-phase states: Im rho between |+1,-1> and |-1,+1> flips sign
  // from eta = pi/6 to eta = pi/3.
  BiphotonState gauss(1, {{{-1, 1}, std::sqrt(0.2)}, {{0, 0}, std::sqrt(0.6)}, {{1, -1}, std::sqrt(0.2)}});
  const auto b4 = ordered_basis(1, false);
  auto off_diag = [&](double eta, const DetectorConfig& det) {
    const auto truth = apply_dove_pair(gauss, eta, Arm::A);
    const auto spec = execute_plan(plan_ancillary(exact_spectrum(truth), {0, 0}), truth, det);
    return density_matrix(assemble_state(spec, 1).without({0, 0}), b4).rho(1, 2).imag();
  };
  for (const auto& [label, det] : {std::pair{"noiseless", noiseless()}, std::pair{"lab noise", lab_noise(1)}}) {
    const double a = off_diag(kPi / 6, det), b = off_diag(kPi / 3, det);
    v.require(a * b < 0 && std::abs(a) > 0.3 && std::abs(b) > 0.3,
              fmt("%s: Im rho[(1,-1),(-1,1)] = %+.4f at pi/6, %+.4f at pi/3 (expected %+.4f, %+.4f)",
                  label, a, b, 0.5 * std::sin(4 * kPi / 6), 0.5 * std::sin(4 * kPi / 3)));
  }
  return v;
}

Verdict hologram_goldens() {
  Verdict v;
  const auto grid = slm_grid(256, 0.032);
  SampledField flat(GridSpec{256, 1.0});
  for (auto& x : flat.values()) x = 1.0;
  v.require(fnv1a(export_pgm(render_field(flat, 16))) == golden::kSawtooth, "sawtooth PGM checksum");
  const auto fork = render_hologram(ArmPattern{{{1, 1.0, 0.0}}}, BeamGeometry{}, grid, 16);
  v.require(fnv1a(export_pgm(fork)) == golden::kForkPlusOne, "LG(+1) fork PGM checksum");
  const auto edge = make_edge({1, 0}, {0, 0});
  bool steps = true;
  for (std::size_t k = 0; k < 4; ++k)
    steps = steps && fnv1a(export_pgm(render_hologram(edge.device(kPhaseSteps[k]).arm_a,
                                                      BeamGeometry{}, grid, 16))) ==
                         golden::kSteppedSuperposition[k];
  v.require(steps, "four phase-stepped superposition PGM checksums");
  for (int m : {1, -1, 2, -2, 3}) {
    const auto h = render_hologram(ArmPattern{{{m, 1.0, 0.0}}}, BeamGeometry{}, slm_grid(), 16);
    const int count = oracle::fork_dislocations(h, 16);
    v.require(count == std::abs(m), fmt("m = %+d: %d dislocation(s)", m, count));
  }
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"1 noiseless end-to-end fidelity", noiseless_fidelity},
      {"2 Gouy slope C = -2.57", gouy_slope},
      {"3 reference Gaussian-pump table regression", gaussian_pump_table},
      {"4 reference m <= 3 table fit C = -2.91", high_order_table},
      {"5 geometric phase 2 eta", geometric_phase},
      {"6 structured pump phase tracking", structured_pump},
      {"7 arm symmetry of the stepped reference", arm_symmetry},
      {"8 noise realism at lab brightness", noise_realism},
      {"9 density matrices", density_matrices},
      {"10 hologram goldens and fork dislocations", hologram_goldens},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    std::printf("%s criterion %s\n", v.pass ? "PASS" : "FAIL", name.c_str());
    for (const auto& n : v.notes) std::printf("    %s\n", n.c_str());
    failed += v.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
