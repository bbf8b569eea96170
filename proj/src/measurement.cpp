#include "biphase/measurement.hpp"

#include <bit>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace biphase {

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

void fnv_mix(std::uint64_t& h, std::uint64_t word) {
  for (int i = 0; i < 8; ++i) {
    h ^= (word >> (8 * i)) & 0xffU;
    h *= kFnvPrime;
  }
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void hash_arm(std::uint64_t& h, const ArmPattern& arm, std::uint64_t tag) {
  fnv_mix(h, tag);
  fnv_mix(h, arm.terms.size());
  for (const auto& t : arm.terms) {
    fnv_mix(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(t.mode)));
    fnv_mix(h, std::bit_cast<std::uint64_t>(t.weight));
    fnv_mix(h, std::bit_cast<std::uint64_t>(t.phase));
  }
}

}  // namespace

void ArmPattern::validate() const {
  if (terms.empty() || terms.size() > 2)
    throw std::invalid_argument("arm pattern must hold one or two terms");
  for (const auto& t : terms) {
    if (!(t.weight > 0.0) || !std::isfinite(t.weight))
      throw std::invalid_argument("arm term weights must be positive");
    if (!std::isfinite(t.phase)) throw std::invalid_argument("arm term phase must be finite");
  }
}

void DeviceSpec::validate() const {
  arm_a.validate();
  arm_b.validate();
}

std::uint64_t DeviceSpec::hash() const {
  std::uint64_t h = kFnvOffset;
  hash_arm(h, arm_a, 'A');
  hash_arm(h, arm_b, 'B');
  return h;
}

std::string DeviceSpec::describe() const {
  std::ostringstream out;
  out.precision(4);
  auto arm_text = [&](const ArmPattern& arm) {
    for (std::size_t i = 0; i < arm.terms.size(); ++i) {
      const auto& t = arm.terms[i];
      if (i) out << " + ";
      out << t.weight;
      if (t.phase != 0.0) out << "*e^(i" << t.phase << ")";
      out << "|" << t.mode << ">";
    }
  };
  out << "A: ";
  arm_text(arm_a);
  out << "  B: ";
  arm_text(arm_b);
  return out.str();
}

DeviceSpec bare_device(ModePair mode) {
  return DeviceSpec{ArmPattern{{ArmTerm{mode.m, 1.0, 0.0}}}, ArmPattern{{ArmTerm{mode.n, 1.0, 0.0}}}};
}

void DetectorConfig::validate() const {
  if (!(brightness > 0.0) || !std::isfinite(brightness))
    throw std::invalid_argument("detector brightness must be positive");
  if (!(window_s > 0.0)) throw std::invalid_argument("acquisition window must be positive");
  if (repeats < 1) throw std::invalid_argument("detector needs at least one repeat");
}

CoincidenceRecord CoincidenceRecord::from_samples(std::vector<double> samples) {
  CoincidenceRecord rec;
  rec.samples = std::move(samples);
  const auto n = static_cast<double>(rec.samples.size());
  if (rec.samples.empty()) return rec;
  double sum = 0.0;
  for (double s : rec.samples) sum += s;
  rec.mean = sum / n;
  if (rec.samples.size() > 1) {
    double ss = 0.0;
    for (double s : rec.samples) ss += (s - rec.mean) * (s - rec.mean);
    rec.stddev = std::sqrt(ss / (n - 1.0));
  }
  return rec;
}

cplx project(const DeviceSpec& device, const BiphotonState& state) {
  cplx amp{};
  for (const auto& a : device.arm_a.terms)
    for (const auto& b : device.arm_b.terms) {
      const cplx c = state.coefficient({a.mode, b.mode});
      if (c == cplx{}) continue;
      amp += a.weight * b.weight * std::polar(1.0, -(a.phase + b.phase)) * c;
    }
  return amp;
}

double coincidence_probability(const DeviceSpec& device, const BiphotonState& state) {
  return std::norm(project(device, state));
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t device_hash, std::uint64_t step) {
  std::uint64_t s = splitmix64(seed);
  s = splitmix64(s ^ device_hash);
  return splitmix64(s ^ (step * 0xd6e8feb86659fd93ULL + 1));
}

CoincidenceRecord acquire(const DeviceSpec& device, const BiphotonState& state,
                          const DetectorConfig& det, std::uint64_t step) {
  device.validate();
  det.validate();
  const double expected = det.brightness * coincidence_probability(device, state);
  std::vector<double> samples(static_cast<std::size_t>(det.repeats), 0.0);
  if (det.noiseless) {
    std::fill(samples.begin(), samples.end(), expected);
  } else if (expected > 0.0) {
    std::mt19937_64 rng(stream_seed(det.seed, device.hash(), step));
    std::poisson_distribution<long long> counts(expected);
    for (auto& s : samples) s = static_cast<double>(counts(rng));
  }
  return CoincidenceRecord::from_samples(std::move(samples));
}

}  // namespace biphase
