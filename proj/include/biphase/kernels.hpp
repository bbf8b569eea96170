#pragma once

// Grid kernels behind field sampling, overlaps and hologram rendering.
//
// Each kernel exists twice: `serial` is the plain reference loop and
// `parallel` splits rows across OpenMP threads. The per-pixel arithmetic is
// identical, so sampling and rendering agree bit for bit; reductions agree
// to rounding. The public API in modes.hpp / holograms.hpp uses `parallel`.

#include <span>

#include "biphase/modes.hpp"

namespace biphase::kernels {

namespace serial {

void sample_superposition(std::span<const ModeTerm> terms, const BeamGeometry& geom,
                          const GridSpec& grid, std::span<cplx> out);

cplx inner_product(std::span<const cplx> a, std::span<const cplx> b);

double peak_modulus(std::span<const cplx> field);

// phase[r, c] = [wrap(arg(field) + 2 pi c / period) * |field| / peak] mod 2 pi
// envelope[r, c] = |field| / peak (zero everywhere when peak == 0)
void render_blazed(std::span<const cplx> field, int side, int period, double peak,
                   std::span<double> phase, std::span<double> envelope);

}  // namespace serial

namespace parallel {

void sample_superposition(std::span<const ModeTerm> terms, const BeamGeometry& geom,
                          const GridSpec& grid, std::span<cplx> out);

cplx inner_product(std::span<const cplx> a, std::span<const cplx> b);

double peak_modulus(std::span<const cplx> field);

void render_blazed(std::span<const cplx> field, int side, int period, double peak,
                   std::span<double> phase, std::span<double> envelope);

}  // namespace parallel

// Shared per-pixel helpers; both variants call these.
namespace detail {

cplx superposition_at(std::span<const ModeTerm> terms, const BeamGeometry& geom,
                      double x_mm, double y_mm);

double blazed_value(cplx value, int col, int period, double peak, double* envelope);

}  // namespace detail

}  // namespace biphase::kernels
