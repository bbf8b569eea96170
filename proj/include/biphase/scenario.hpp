#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "biphase/holograms.hpp"
#include "biphase/reconstruct.hpp"

namespace biphase {

inline constexpr const char* kScenarioSchema = "biphase.scenario/1";

struct ChannelSpec {
  enum class Kind { gouy, dove, pump_phase };
  Kind kind = Kind::gouy;
  BeamGeometry arm_a;  // gouy
  BeamGeometry arm_b;
  double eta = 0.0;  // dove, radians
  Arm arm = Arm::A;
  int ell = 0;  // pump_phase
  double delta = 0.0;
};

enum class PlanStrategy { ancillary, inductive };

struct HologramRequest {
  enum class Kind { bare, edge, device };
  Kind kind = Kind::bare;
  ModePair mode;                    // bare
  std::optional<int> edge_index;    // edge
  std::optional<ModePair> target;   // edge, looked up by target
  DeviceSpec device;                // device
  std::optional<Arm> device_stepped;
  BeamGeometry geometry;
  GridSpec grid = slm_grid();
  int fringe_period = 16;
  int levels = 256;
  bool phase_csv = false;
};

struct Scenario {
  std::string name;
  int bandwidth = 2;
  std::optional<PumpSpec> pump;
  std::optional<BiphotonState> state;
  std::vector<ChannelSpec> channels;
  DetectorConfig detector;
  PlanStrategy strategy = PlanStrategy::ancillary;
  ModePair root{0, 0};
  PlanOptions plan_options;
  std::vector<double> sweep_eta;  // radians
  Arm sweep_arm = Arm::A;
  std::vector<double> sweep_pump_phases;
  int sweep_pump_ell = 1;
  std::optional<HologramRequest> hologram;
  std::filesystem::path output_dir = "out";
  bool plot = false;
  bool density_include_zero = true;
};

// Unknown keys anywhere in the document are rejected with
// std::invalid_argument. Relative fixture paths resolve against base_dir.
Scenario parse_scenario(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& path);

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> bandwidth;
  std::optional<double> brightness;
  std::optional<int> repeats;
  std::optional<std::filesystem::path> output_dir;
  bool plot = false;
  bool noiseless = false;
};

void apply_overrides(Scenario& scenario, const Overrides& overrides);

// Source state after every channel in order.
BiphotonState prepare_state(const Scenario& scenario);

MeasurementPlan make_plan(const Scenario& scenario, const IntensitySpectrum& spectrum);

struct RunReport {
  std::vector<std::filesystem::path> files;
};

struct SpectrumRun : RunReport {
  MeasuredSpectrum spectrum;
};

struct TomographyRun : RunReport {
  MeasurementPlan plan;
  PhasedSpectrum spectrum;
  BiphotonState assembled{0};
  double fidelity = 0.0;
  std::optional<FitResult> fit;
};

struct DoveSweepRun : RunReport {
  std::vector<GeometricPhasePoint> points;
};

struct PumpSweepPoint {
  double pump_phase = 0.0;
  double offset = 0.0;  // off-diagonal minus main-diagonal phase, [0, 2 pi)
  double offset_err = 0.0;
  PhasedSpectrum spectrum;
};

struct PumpSweepRun : RunReport {
  std::vector<PumpSweepPoint> points;
};

SpectrumRun run_spectrum(const Scenario& scenario);
TomographyRun run_phase_tomography(const Scenario& scenario, bool fit = false);
TomographyRun run_gouy_fit(const Scenario& scenario);
DoveSweepRun run_dove_sweep(const Scenario& scenario);
PumpSweepRun run_pump_sweep(const Scenario& scenario);
RunReport run_hologram_export(const Scenario& scenario);

}  // namespace biphase
