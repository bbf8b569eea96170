#include <cmath>
#include <numbers>
#include <stdexcept>

#include "biphase/kernels.hpp"

namespace biphase::kernels {

namespace detail {

cplx superposition_at(std::span<const ModeTerm> terms, const BeamGeometry& geom,
                      double x_mm, double y_mm) {
  cplx sum{};
  for (const auto& term : terms) sum += term.weight * eval_lg(term.mode, geom, x_mm, y_mm);
  return sum;
}

double blazed_value(cplx value, int col, int period, double peak, double* envelope) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  const double depth = peak > 0.0 ? std::abs(value) / peak : 0.0;
  *envelope = depth;
  if (depth == 0.0) return 0.0;
  // Carrier phase taken from the integer column so that a flat field yields
  // an exact sawtooth.
  const double carrier = kTwoPi * static_cast<double>(col % period) / period;
  const double wrapped = std::remainder(std::arg(value) + carrier, kTwoPi);
  double h = std::fmod(wrapped * depth, kTwoPi);
  if (h < 0.0) h += kTwoPi;
  if (h >= kTwoPi) h = 0.0;
  return h;
}

}  // namespace detail

namespace serial {

void sample_superposition(std::span<const ModeTerm> terms, const BeamGeometry& geom,
                          const GridSpec& grid, std::span<cplx> out) {
  const int side = grid.side;
  if (out.size() != static_cast<std::size_t>(side) * side)
    throw std::invalid_argument("output span does not match grid");
  for (int r = 0; r < side; ++r) {
    const double y = grid.coord(r);
    for (int c = 0; c < side; ++c)
      out[static_cast<std::size_t>(r) * side + c] =
          detail::superposition_at(terms, geom, grid.coord(c), y);
  }
}

cplx inner_product(std::span<const cplx> a, std::span<const cplx> b) {
  if (a.size() != b.size()) throw std::invalid_argument("inner product of unequal spans");
  double re = 0.0;
  double im = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const cplx v = std::conj(a[i]) * b[i];
    re += v.real();
    im += v.imag();
  }
  return {re, im};
}

double peak_modulus(std::span<const cplx> field) {
  double peak = 0.0;
  for (const auto& v : field) peak = std::max(peak, std::abs(v));
  return peak;
}

void render_blazed(std::span<const cplx> field, int side, int period, double peak,
                   std::span<double> phase, std::span<double> envelope) {
  for (int r = 0; r < side; ++r)
    for (int c = 0; c < side; ++c) {
      const auto i = static_cast<std::size_t>(r) * side + c;
      phase[i] = detail::blazed_value(field[i], c, period, peak, &envelope[i]);
    }
}

}  // namespace serial

}  // namespace biphase::kernels
