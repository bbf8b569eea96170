#pragma once

#include <array>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "biphase/measurement.hpp"

namespace biphase {

inline constexpr std::array<double, 4> kPhaseSteps{
    0.0, std::numbers::pi / 2, std::numbers::pi, 3 * std::numbers::pi / 2};

// Four coincidence records taken at reference phases 0, pi/2, pi, 3pi/2.
struct PhaseStepSeries {
  std::array<CoincidenceRecord, 4> records;
  Arm stepped_arm = Arm::B;
};

struct PhaseEstimate {
  double phase = 0.0;  // [0, 2 pi)
  double error = 0.0;
};

// phi = -atan2(I_pi/2 - I_3pi/2, I_0 - I_pi), with first-order propagation
// of the four sample standard deviations. Throws ContrastError when both
// differences vanish.
PhaseEstimate psdh_phase(const PhaseStepSeries& series);

// Default (target, reference) weights for a device whose largest |m| is
// `order`: 0.60 / 0.40 for first order, 0.85 / 0.15 from second order up.
struct EdgeWeights {
  double target = 0.60;
  double reference = 0.40;
};
EdgeWeights default_edge_weights(int order);

// One relative-phase measurement: the phase of `target` relative to
// `reference`. Single-arm edges share one index and interfere in the other
// arm only; the stepped arm is the one that differs. Two-arm edges superpose
// target and reference in both arms and step the reference term of
// `stepped_arm`.
struct PlanEdge {
  ModePair target;
  ModePair reference;
  Arm stepped_arm = Arm::B;
  EdgeWeights weights;

  bool single_arm() const;
  DeviceSpec device(double step_phase) const;
};

PlanEdge make_edge(ModePair target, ModePair reference, Arm stepped_arm = Arm::B);

// Tree of edges rooted at `root`; every edge's reference is the root or the
// target of an earlier edge.
struct MeasurementPlan {
  ModePair root;
  std::vector<PlanEdge> edges;

  void validate() const;
  std::vector<ModePair> modes() const;  // root first, then edge targets
  std::string describe() const;
};

using IntensitySpectrum = std::map<ModePair, double>;

struct PlanOptions {
  double epsilon = 1e-3;      // cross-term budget relative to the reference amplitude
  double finite_floor = 0.0;  // intensities above this count as finite
  Arm stepped_arm = Arm::B;
};

// Unwanted pairings of a device whose amplitude exceeds epsilon times the
// reference pairing amplitude, judged against an intensity spectrum.
std::vector<ModePair> cross_term_violations(const PlanEdge& edge,
                                            const IntensitySpectrum& spectrum,
                                            double epsilon);

MeasurementPlan plan_ancillary(const IntensitySpectrum& spectrum, ModePair root,
                               const PlanOptions& options = {});

MeasurementPlan plan_inductive(const IntensitySpectrum& spectrum, ModePair root,
                               const PlanOptions& options = {});

struct SpectrumEntry {
  ModePair mode;
  double intensity = 0.0;
  double intensity_err = 0.0;
  double phase = 0.0;  // [0, 2 pi), root is 0
  double phase_err = 0.0;
};

struct PhasedSpectrum {
  ModePair root;
  std::vector<SpectrumEntry> entries;  // ModePair order

  const SpectrumEntry* find(ModePair mode) const;
  const SpectrumEntry& at(ModePair mode) const;
};

struct MeasuredSpectrum {
  IntensitySpectrum intensity;  // normalised to unit sum
  IntensitySpectrum error;
};

// Bare-device coincidence spectrum over `modes`.
MeasuredSpectrum measure_spectrum(const std::vector<ModePair>& modes,
                                  const BiphotonState& state, const DetectorConfig& det);

// All |m|, |n| <= bandwidth.
std::vector<ModePair> mode_grid(int bandwidth);

// Four-step series for one edge.
PhaseStepSeries acquire_series(const PlanEdge& edge, const BiphotonState& state,
                               const DetectorConfig& det);

// Runs every edge (concurrently), then accumulates edge phases along the
// tree. Intensities come from a separate bare-device pass over plan modes.
PhasedSpectrum execute_plan(const MeasurementPlan& plan, const BiphotonState& state,
                            const DetectorConfig& det);

}  // namespace biphase
