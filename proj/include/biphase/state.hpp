#pragma once

#include <complex>
#include <compare>
#include <map>
#include <string>
#include <vector>

#include "biphase/modes.hpp"

namespace biphase {

// Biphoton mode label |m>_A |n>_B.
struct ModePair {
  int m = 0;
  int n = 0;

  auto operator<=>(const ModePair&) const = default;
};

std::string to_string(ModePair mode);

enum class Arm { A, B };

char arm_name(Arm arm);

// Phase wrapped into [0, 2 pi).
double wrap_phase(double phase);
// Phase wrapped into (-pi, pi].
double wrap_signed(double phase);

// Sparse pure biphoton state sum c_{m,n} |m, n>. Coefficients outside the
// bandwidth |m|, |n| <= bandwidth are rejected. The state is not forced to
// unit norm; call normalize() when that matters.
class BiphotonState {
 public:
  using Coefficients = std::map<ModePair, cplx>;

  explicit BiphotonState(int bandwidth);
  BiphotonState(int bandwidth, Coefficients coeffs);

  int bandwidth() const { return bandwidth_; }
  const Coefficients& coefficients() const { return coeffs_; }

  bool contains(ModePair mode) const;
  cplx coefficient(ModePair mode) const;
  void set(ModePair mode, cplx value);

  double intensity(ModePair mode) const { return std::norm(coefficient(mode)); }
  double amplitude(ModePair mode) const { return std::abs(coefficient(mode)); }
  double phase(ModePair mode) const;  // [0, 2 pi)
  double norm_squared() const;

  // Modes with nonzero coefficient, in ModePair order.
  std::vector<ModePair> support() const;

  // Copy without the given mode.
  BiphotonState without(ModePair mode) const;

 private:
  void check_bounds(ModePair mode) const;

  int bandwidth_;
  Coefficients coeffs_;
};

BiphotonState normalize(const BiphotonState& state);

struct PumpComponent {
  int ell = 0;
  cplx weight{1.0, 0.0};
};

// Pump OAM content and the real amplitude profile g placed along each
// conserved diagonal m + n = ell, indexed by min(|m|, |n|). Offsets missing
// from the profile carry zero weight.
struct PumpSpec {
  std::vector<PumpComponent> components;
  std::map<int, double> diagonal_profile;

  void validate() const;
};

BiphotonState synthesize(const PumpSpec& pump, int bandwidth);

// -(|m| + 1) arctan(z / z_R)
double gouy_phase(int m, const BeamGeometry& geom);

BiphotonState apply_gouy(const BiphotonState& state, const BeamGeometry& arm_a,
                         const BeamGeometry& arm_b);

// Dove-prism pair misoriented by eta in one arm: c_{m,n} picks up
// exp(2 i m eta) on arm A, exp(2 i n eta) on arm B.
BiphotonState apply_dove_pair(const BiphotonState& state, double eta, Arm arm);

// Phase shift of one pump component: every coefficient on m + n == ell picks
// up exp(i delta).
BiphotonState apply_pump_phase(const BiphotonState& state, int ell, double delta);

}  // namespace biphase
