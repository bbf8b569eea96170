#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "biphase/measurement.hpp"

namespace biphase {

// Amplitude-modulated blazed grating. `phase` holds H in [0, 2 pi);
// `envelope` holds the modulation depth |SLM| / max|SLM|.
struct Hologram {
  GridSpec grid;
  int fringe_period = 16;
  std::vector<double> phase;
  std::vector<double> envelope;

  int side() const { return grid.side; }
  double at(int row, int col) const {
    return phase[static_cast<std::size_t>(row) * grid.side + col];
  }
  double envelope_at(int row, int col) const {
    return envelope[static_cast<std::size_t>(row) * grid.side + col];
  }
};

// SLM grid: `side` pixels at `pitch_mm`; defaults to a 1080-pixel panel at
// 8 um pitch.
GridSpec slm_grid(int side = 1080, double pitch_mm = 0.008);

// H = [arg(SLM exp(i k_g x)) |SLM| / max|SLM|] mod 2 pi with k_g = 2 pi / N
// and x the column index.
Hologram render_field(const SampledField& slm, int fringe_period);

Hologram render_hologram(const ArmPattern& arm, const BeamGeometry& geom,
                         const GridSpec& grid, int fringe_period = 16);

// Binary P5 greymap, value floor(H / 2 pi * (levels - 1)). Two bytes per
// pixel (big-endian) when levels > 256.
std::vector<std::uint8_t> export_pgm(const Hologram& holo, int levels = 256);

void write_phase_csv(std::ostream& out, const Hologram& holo);

// 64-bit FNV-1a digest, used for golden checks on exported images.
std::uint64_t fnv1a(const std::vector<std::uint8_t>& bytes);

}  // namespace biphase
