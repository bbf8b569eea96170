#pragma once

// Independent oracles and random generators shared by the test binaries.
// Nothing here calls into the library's numerics; the oracles recompute
// each quantity from dense vectors or closed forms.

#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "biphase/holograms.hpp"
#include "biphase/measurement.hpp"
#include "biphase/state.hpp"

namespace oracle {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

// Dense index of |m, n> for |m|, |n| <= M.
inline int dense_index(int m, int n, int bandwidth) {
  const int side = 2 * bandwidth + 1;
  return (m + bandwidth) * side + (n + bandwidth);
}

inline std::vector<cplx> dense(const biphase::BiphotonState& s) {
  const int side = 2 * s.bandwidth() + 1;
  std::vector<cplx> v(static_cast<std::size_t>(side) * side);
  for (const auto& [mode, c] : s.coefficients())
    v[dense_index(mode.m, mode.n, s.bandwidth())] = c;
  return v;
}

// Single-arm vector of a device pattern, length 2M + 1.
inline std::vector<cplx> arm_vector(const biphase::ArmPattern& arm, int bandwidth) {
  std::vector<cplx> v(2 * bandwidth + 1);
  for (const auto& t : arm.terms)
    if (std::abs(t.mode) <= bandwidth) v[t.mode + bandwidth] += std::polar(t.weight, t.phase);
  return v;
}

// <Phi_A Phi_B | Psi> by a dense double sum.
inline cplx project(const biphase::DeviceSpec& d, const biphase::BiphotonState& s) {
  const int M = s.bandwidth();
  const auto a = arm_vector(d.arm_a, M);
  const auto b = arm_vector(d.arm_b, M);
  const auto psi = dense(s);
  cplx sum{};
  for (int m = -M; m <= M; ++m)
    for (int n = -M; n <= M; ++n)
      sum += std::conj(a[m + M] * b[n + M]) * psi[dense_index(m, n, M)];
  return sum;
}

// LG_m^0 at z = 0 written as a complex polynomial in (x + i sgn y).
inline double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

inline cplx lg(int m, double w0, double x, double y) {
  const int a = std::abs(m);
  const cplx u{x, m >= 0 ? y : -y};
  const double gauss = std::exp(-(x * x + y * y) / (w0 * w0));
  return std::sqrt(2.0 / (kPi * factorial(a))) * gauss * std::pow(std::sqrt(2.0) / w0, a) *
         std::pow(u, a);
}

// Four-step interferogram |c_t + d e^{-i phi} c_r|^2 expanded by hand.
inline double interferogram(cplx target, cplx reference, double phi) {
  const double cross = 2.0 * (std::conj(target) * reference * std::polar(1.0, -phi)).real();
  return std::norm(target) + std::norm(reference) + cross;
}

// Smallest signed distance between two angles.
inline double angle_gap(double a, double b) {
  return std::abs(std::remainder(a - b, 2.0 * kPi));
}

// Grating value with the amplitude modulation divided back out, in (-pi, pi].
inline double unmodulated(const biphase::Hologram& h, int row, int col) {
  const double v = h.at(row, col);
  return (v <= kPi ? v : v - 2 * kPi) / h.envelope_at(row, col);
}

// Fork dislocation count: net winding of the grating phase around a square
// loop of half-width `offset` about the centre. The carrier winds zero times
// around any closed loop, so only the vortex survives.
inline int fork_dislocations(const biphase::Hologram& h, int offset) {
  const int lo = h.side() / 2 - offset, hi = h.side() / 2 + offset - 1;
  std::vector<std::pair<int, int>> loop;
  for (int c = lo; c < hi; ++c) loop.push_back({lo, c});
  for (int r = lo; r < hi; ++r) loop.push_back({r, hi});
  for (int c = hi; c > lo; --c) loop.push_back({hi, c});
  for (int r = hi; r > lo; --r) loop.push_back({r, lo});
  double total = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const auto [r0, c0] = loop[i];
    const auto [r1, c1] = loop[(i + 1) % loop.size()];
    total += std::remainder(unmodulated(h, r1, c1) - unmodulated(h, r0, c0), 2 * kPi);
  }
  return static_cast<int>(std::lround(std::abs(total) / (2 * kPi)));
}

}  // namespace oracle

namespace gen {

// Hand-rolled generators; deterministic from a seed.
struct Rng {
  std::mt19937_64 engine;
  explicit Rng(std::uint64_t seed) : engine(seed) {}
  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(engine);
  }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine); }
  double normal() { return std::normal_distribution<double>()(engine); }
};

// Dense random pure state over every |m|, |n| <= M (complex Gaussian
// entries), normalised.
inline biphase::BiphotonState random_full_state(Rng& rng, int bandwidth) {
  biphase::BiphotonState s(bandwidth);
  double total = 0.0;
  std::vector<std::pair<biphase::ModePair, oracle::cplx>> entries;
  for (int m = -bandwidth; m <= bandwidth; ++m)
    for (int n = -bandwidth; n <= bandwidth; ++n) {
      const oracle::cplx c{rng.normal(), rng.normal()};
      entries.push_back({{m, n}, c});
      total += std::norm(c);
    }
  for (const auto& [mode, c] : entries) s.set(mode, c / std::sqrt(total));
  return s;
}

// Random state on the conserved diagonal m + n = ell with every
// coefficient finite and random phase.
inline biphase::BiphotonState random_diagonal_state(Rng& rng, int bandwidth, int ell = 0) {
  biphase::BiphotonState s(bandwidth);
  double total = 0.0;
  for (int m = -bandwidth; m <= bandwidth; ++m) {
    const int n = ell - m;
    if (std::abs(n) > bandwidth) continue;
    const double amp = rng.uniform(0.3, 1.0);
    s.set({m, n}, std::polar(amp, rng.uniform(0.0, 2.0 * oracle::kPi)));
    total += amp * amp;
  }
  biphase::BiphotonState out(bandwidth);
  for (const auto& [mode, c] : s.coefficients()) out.set(mode, c / std::sqrt(total));
  return out;
}

// Random two-diagonal state (main diagonal plus m + n = 1), as produced by
// an LG0 + LG1 pump, with random finite amplitudes and phases.
inline biphase::BiphotonState random_two_diagonal_state(Rng& rng, int bandwidth) {
  biphase::BiphotonState s(bandwidth);
  double total = 0.0;
  for (int ell : {0, 1})
    for (int m = -bandwidth; m <= bandwidth; ++m) {
      const int n = ell - m;
      if (std::abs(n) > bandwidth) continue;
      const double amp = rng.uniform(0.3, 1.0);
      s.set({m, n}, std::polar(amp, rng.uniform(0.0, 2.0 * oracle::kPi)));
      total += amp * amp;
    }
  biphase::BiphotonState out(bandwidth);
  for (const auto& [mode, c] : s.coefficients()) out.set(mode, c / std::sqrt(total));
  return out;
}

inline biphase::ArmPattern random_arm(Rng& rng, int bandwidth) {
  biphase::ArmPattern arm;
  const int count = rng.integer(1, 2);
  for (int i = 0; i < count; ++i)
    arm.terms.push_back({rng.integer(-bandwidth, bandwidth), rng.uniform(0.05, 1.0),
                         rng.uniform(0.0, 2.0 * oracle::kPi)});
  return arm;
}

}  // namespace gen

#ifdef BIPHASE_DATA_DIR
inline std::filesystem::path data_path(const std::string& name) {
  return std::filesystem::path(BIPHASE_DATA_DIR) / name;
}
#endif
