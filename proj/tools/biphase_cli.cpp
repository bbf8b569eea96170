#include <CLI11.hpp>

#include <cstdio>
#include <functional>
#include <iostream>
#include <string>

#include "biphase/error.hpp"
#include "biphase/scenario.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 2, kInfeasible = 3, kIo = 4, kContrast = 5, kInternal = 1 };

void list_files(const biphase::RunReport& report) {
  for (const auto& f : report.files) std::cout << f.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Biphoton OAM phase tomography simulator"};
  app.require_subcommand(1);

  std::string scenario_path;
  biphase::Overrides overrides;
  std::uint64_t seed = 0;
  int bandwidth = 0, repeats = 0;
  double brightness = 0.0;
  std::string out_dir;

  std::function<int(const biphase::Scenario&)> action;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("scenario", scenario_path, "Scenario JSON file")->required();
    sub->add_option("--seed", seed, "RNG seed");
    sub->add_option("--bandwidth", bandwidth, "OAM bandwidth |m| <= M")->check(CLI::NonNegativeNumber);
    sub->add_option("--brightness", brightness, "Expected coincidences per window at unit probability")
        ->check(CLI::PositiveNumber);
    sub->add_option("--repeats", repeats, "Acquisitions per device")->check(CLI::PositiveNumber);
    sub->add_option("-o,--out", out_dir, "Output directory");
    sub->add_flag("--plot", overrides.plot, "Also write an SVG heatmap");
    sub->add_flag("--noiseless", overrides.noiseless, "Use expected counts instead of Poisson draws");
  };

  auto* spectrum = app.add_subcommand("spectrum", "Bare-device coincidence spectrum");
  add_common(spectrum);
  spectrum->callback([&] {
    action = [](const biphase::Scenario& sc) {
      list_files(biphase::run_spectrum(sc));
      return kOk;
    };
  });

  auto* tomo = app.add_subcommand("tomography", "Phase-resolved spectrum and density matrix");
  add_common(tomo);
  bool with_fit = false;
  tomo->add_flag("--fit", with_fit, "Fit the diagonal phase slope");
  tomo->callback([&] {
    action = [&](const biphase::Scenario& sc) {
      const auto run = biphase::run_phase_tomography(sc, with_fit);
      list_files(run);
      std::cout << "fidelity " << run.fidelity << '\n';
      return kOk;
    };
  });

  auto* gouy = app.add_subcommand("gouy-fit", "Tomography plus diagonal phase slope fit");
  add_common(gouy);
  gouy->callback([&] {
    action = [](const biphase::Scenario& sc) {
      const auto run = biphase::run_gouy_fit(sc);
      list_files(run);
      std::printf("slope %.6f rad\n", run.fit->slope);
      return kOk;
    };
  });

  auto* dove = app.add_subcommand("dove-sweep", "Geometric phase versus Dove prism angle");
  add_common(dove);
  dove->callback([&] {
    action = [](const biphase::Scenario& sc) {
      list_files(biphase::run_dove_sweep(sc));
      return kOk;
    };
  });

  auto* pump = app.add_subcommand("pump-sweep", "Off-diagonal phase versus pump phase");
  add_common(pump);
  pump->callback([&] {
    action = [](const biphase::Scenario& sc) {
      list_files(biphase::run_pump_sweep(sc));
      return kOk;
    };
  });

  auto* holo = app.add_subcommand("hologram", "Export SLM holograms as PGM");
  add_common(holo);
  holo->callback([&] {
    action = [](const biphase::Scenario& sc) {
      list_files(biphase::run_hologram_export(sc));
      return kOk;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  for (auto* sub : app.get_subcommands()) {
    if (sub->count("--seed")) overrides.seed = seed;
    if (sub->count("--bandwidth")) overrides.bandwidth = bandwidth;
    if (sub->count("--brightness")) overrides.brightness = brightness;
    if (sub->count("--repeats")) overrides.repeats = repeats;
    if (sub->count("--out")) overrides.output_dir = out_dir;
  }

  try {
    auto sc = biphase::load_scenario(scenario_path);
    biphase::apply_overrides(sc, overrides);
    return action(sc);
  } catch (const biphase::InfeasiblePlanError& e) {
    std::cerr << "infeasible plan: " << e.what() << '\n';
    return kInfeasible;
  } catch (const biphase::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const biphase::ContrastError& e) {
    std::cerr << "contrast error: " << e.what() << '\n';
    return kContrast;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid scenario: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInternal;
  }
}
