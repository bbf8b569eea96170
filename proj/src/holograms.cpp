#include "biphase/holograms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

#include "biphase/kernels.hpp"

namespace biphase {

GridSpec slm_grid(int side, double pitch_mm) {
  if (side < 2 || !(pitch_mm > 0.0)) throw std::invalid_argument("degenerate SLM grid");
  return GridSpec{side, 0.5 * pitch_mm * (side - 1)};
}

Hologram render_field(const SampledField& slm, int fringe_period) {
  if (fringe_period < 2) throw std::invalid_argument("fringe period must be at least 2 samples");
  Hologram holo;
  holo.grid = slm.grid();
  holo.fringe_period = fringe_period;
  const auto n = slm.values().size();
  holo.phase.assign(n, 0.0);
  holo.envelope.assign(n, 0.0);
  const double peak = kernels::parallel::peak_modulus(slm.values());
  kernels::parallel::render_blazed(slm.values(), slm.side(), fringe_period, peak, holo.phase,
                                   holo.envelope);
  return holo;
}

Hologram render_hologram(const ArmPattern& arm, const BeamGeometry& geom, const GridSpec& grid,
                         int fringe_period) {
  arm.validate();
  std::vector<ModeTerm> terms;
  for (const auto& t : arm.terms) terms.push_back({ModeIndex{t.mode}, std::polar(t.weight, t.phase)});
  return render_field(sample_field(terms, geom, grid), fringe_period);
}

std::vector<std::uint8_t> export_pgm(const Hologram& holo, int levels) {
  if (levels < 2 || levels > 65536) throw std::invalid_argument("PGM levels must lie in [2, 65536]");
  const int maxval = levels - 1;
  const std::string header = "P5\n" + std::to_string(holo.side()) + " " +
                             std::to_string(holo.side()) + "\n" + std::to_string(maxval) + "\n";
  std::vector<std::uint8_t> bytes(header.begin(), header.end());
  const bool wide = maxval > 255;
  bytes.reserve(bytes.size() + holo.phase.size() * (wide ? 2 : 1));
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  for (double h : holo.phase) {
    auto v = static_cast<long>(std::floor(h / kTwoPi * maxval));
    v = std::clamp(v, 0L, static_cast<long>(maxval));
    if (wide) bytes.push_back(static_cast<std::uint8_t>(v >> 8));
    bytes.push_back(static_cast<std::uint8_t>(v & 0xff));
  }
  return bytes;
}

void write_phase_csv(std::ostream& out, const Hologram& holo) {
  const auto old = out.precision(17);
  for (int r = 0; r < holo.side(); ++r) {
    for (int c = 0; c < holo.side(); ++c) {
      if (c) out << ',';
      out << holo.at(r, c);
    }
    out << '\n';
  }
  out.precision(old);
}

std::uint64_t fnv1a(const std::vector<std::uint8_t>& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (auto b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace biphase
