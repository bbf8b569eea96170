#include "biphase/state.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace biphase {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

std::string to_string(ModePair mode) {
  return "(" + std::to_string(mode.m) + "," + std::to_string(mode.n) + ")";
}

char arm_name(Arm arm) { return arm == Arm::A ? 'A' : 'B'; }

double wrap_phase(double phase) {
  double w = std::fmod(phase, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;
  return w;
}

double wrap_signed(double phase) {
  double w = wrap_phase(phase);
  if (w > std::numbers::pi) w -= kTwoPi;
  return w;
}

BiphotonState::BiphotonState(int bandwidth) : bandwidth_(bandwidth) {
  if (bandwidth < 0) throw std::invalid_argument("bandwidth must be non-negative");
}

BiphotonState::BiphotonState(int bandwidth, Coefficients coeffs) : BiphotonState(bandwidth) {
  for (const auto& [mode, value] : coeffs) set(mode, value);
}

void BiphotonState::check_bounds(ModePair mode) const {
  if (std::abs(mode.m) > bandwidth_ || std::abs(mode.n) > bandwidth_)
    throw std::out_of_range("mode " + to_string(mode) + " outside bandwidth " +
                            std::to_string(bandwidth_));
}

bool BiphotonState::contains(ModePair mode) const {
  const auto it = coeffs_.find(mode);
  return it != coeffs_.end() && it->second != cplx{};
}

cplx BiphotonState::coefficient(ModePair mode) const {
  const auto it = coeffs_.find(mode);
  return it == coeffs_.end() ? cplx{} : it->second;
}

void BiphotonState::set(ModePair mode, cplx value) {
  check_bounds(mode);
  if (!std::isfinite(value.real()) || !std::isfinite(value.imag()))
    throw std::invalid_argument("non-finite coefficient at " + to_string(mode));
  if (value == cplx{})
    coeffs_.erase(mode);
  else
    coeffs_[mode] = value;
}

double BiphotonState::phase(ModePair mode) const { return wrap_phase(std::arg(coefficient(mode))); }

double BiphotonState::norm_squared() const {
  double sum = 0.0;
  for (const auto& [mode, value] : coeffs_) sum += std::norm(value);
  return sum;
}

std::vector<ModePair> BiphotonState::support() const {
  std::vector<ModePair> modes;
  modes.reserve(coeffs_.size());
  for (const auto& [mode, value] : coeffs_) modes.push_back(mode);
  return modes;
}

BiphotonState BiphotonState::without(ModePair mode) const {
  BiphotonState copy = *this;
  copy.coeffs_.erase(mode);
  return copy;
}

BiphotonState normalize(const BiphotonState& state) {
  const double n2 = state.norm_squared();
  if (!(n2 > 0.0)) throw std::invalid_argument("cannot normalise the zero state");
  const double scale = 1.0 / std::sqrt(n2);
  BiphotonState out(state.bandwidth());
  for (const auto& [mode, value] : state.coefficients()) out.set(mode, value * scale);
  return out;
}

void PumpSpec::validate() const {
  if (components.empty()) throw std::invalid_argument("pump has no OAM components");
  double total = 0.0;
  for (const auto& c : components) total += std::norm(c.weight);
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("pump weights must satisfy sum |w|^2 = 1");
  bool any = false;
  for (const auto& [offset, g] : diagonal_profile) {
    if (offset < 0) throw std::invalid_argument("diagonal profile offsets are |m| values");
    if (!(g >= 0.0) || !std::isfinite(g))
      throw std::invalid_argument("diagonal profile weights must be non-negative");
    any = any || g > 0.0;
  }
  if (!any) throw std::invalid_argument("diagonal profile is identically zero");
}

BiphotonState synthesize(const PumpSpec& pump, int bandwidth) {
  pump.validate();
  BiphotonState state(bandwidth);
  for (const auto& component : pump.components) {
    for (int m = -bandwidth; m <= bandwidth; ++m) {
      const int n = component.ell - m;
      if (std::abs(n) > bandwidth) continue;
      const auto it = pump.diagonal_profile.find(std::min(std::abs(m), std::abs(n)));
      if (it == pump.diagonal_profile.end() || it->second == 0.0) continue;
      const ModePair mode{m, n};
      state.set(mode, state.coefficient(mode) + component.weight * it->second);
    }
  }
  if (state.norm_squared() == 0.0)
    throw std::invalid_argument("pump and profile produce no modes inside the bandwidth");
  return normalize(state);
}

double gouy_phase(int m, const BeamGeometry& geom) {
  return -(std::abs(m) + 1) * geom.gouy_angle();
}

BiphotonState apply_gouy(const BiphotonState& state, const BeamGeometry& arm_a,
                         const BeamGeometry& arm_b) {
  arm_a.validate();
  arm_b.validate();
  BiphotonState out(state.bandwidth());
  for (const auto& [mode, value] : state.coefficients())
    out.set(mode, value * std::polar(1.0, gouy_phase(mode.m, arm_a) + gouy_phase(mode.n, arm_b)));
  return out;
}

BiphotonState apply_dove_pair(const BiphotonState& state, double eta, Arm arm) {
  BiphotonState out(state.bandwidth());
  for (const auto& [mode, value] : state.coefficients()) {
    const int charge = arm == Arm::A ? mode.m : mode.n;
    out.set(mode, charge == 0 ? value : value * std::polar(1.0, 2.0 * charge * eta));
  }
  return out;
}

BiphotonState apply_pump_phase(const BiphotonState& state, int ell, double delta) {
  BiphotonState out(state.bandwidth());
  for (const auto& [mode, value] : state.coefficients())
    out.set(mode, mode.m + mode.n == ell ? value * std::polar(1.0, delta) : value);
  return out;
}

}  // namespace biphase
