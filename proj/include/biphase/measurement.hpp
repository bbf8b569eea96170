#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "biphase/state.hpp"

namespace biphase {

// One weighted, phase-shifted mode in an SLM arm pattern.
struct ArmTerm {
  int mode = 0;
  double weight = 1.0;
  double phase = 0.0;
};

struct ArmPattern {
  std::vector<ArmTerm> terms;

  void validate() const;
};

// Product coincidence device |Phi>_A |Phi>_B. Devices are unnormalised.
struct DeviceSpec {
  ArmPattern arm_a;
  ArmPattern arm_b;

  const ArmPattern& arm(Arm which) const { return which == Arm::A ? arm_a : arm_b; }
  void validate() const;
  // Stable 64-bit digest of the terms (FNV-1a over modes, weights, phases).
  std::uint64_t hash() const;
  std::string describe() const;
};

DeviceSpec bare_device(ModePair mode);

// Coincidence counter. `brightness` is the expected count per acquisition
// window at unit projection probability; gate width and coupling losses are
// folded into it. `noiseless` returns the expectation value for every sample.
struct DetectorConfig {
  double brightness = 1450.0;
  double window_s = 10.0;
  int repeats = 5;
  std::uint64_t seed = 1;
  bool noiseless = false;

  void validate() const;
};

struct CoincidenceRecord {
  std::vector<double> samples;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation (n - 1)

  static CoincidenceRecord from_samples(std::vector<double> samples);
};

// <Phi|Psi> = sum over arm-term pairs of dA dB exp(-i (phiA + phiB)) c_{mA, nB}
cplx project(const DeviceSpec& device, const BiphotonState& state);

double coincidence_probability(const DeviceSpec& device, const BiphotonState& state);

// Seed for one acquisition, mixed from the run seed, the device digest and
// a step index. Independent of evaluation order.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t device_hash,
                          std::uint64_t step);

CoincidenceRecord acquire(const DeviceSpec& device, const BiphotonState& state,
                          const DetectorConfig& det, std::uint64_t step = 0);

}  // namespace biphase
