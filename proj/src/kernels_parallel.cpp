#include <cmath>
#include <stdexcept>

#include "biphase/kernels.hpp"

namespace biphase::kernels::parallel {

void sample_superposition(std::span<const ModeTerm> terms, const BeamGeometry& geom,
                          const GridSpec& grid, std::span<cplx> out) {
  const int side = grid.side;
  if (out.size() != static_cast<std::size_t>(side) * side)
    throw std::invalid_argument("output span does not match grid");
#pragma omp parallel for schedule(static)
  for (int r = 0; r < side; ++r) {
    const double y = grid.coord(r);
    for (int c = 0; c < side; ++c)
      out[static_cast<std::size_t>(r) * side + c] =
          detail::superposition_at(terms, geom, grid.coord(c), y);
  }
}

cplx inner_product(std::span<const cplx> a, std::span<const cplx> b) {
  if (a.size() != b.size()) throw std::invalid_argument("inner product of unequal spans");
  const auto n = static_cast<std::ptrdiff_t>(a.size());
  double re = 0.0;
  double im = 0.0;
#pragma omp parallel for reduction(+ : re, im) schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const cplx v = std::conj(a[i]) * b[i];
    re += v.real();
    im += v.imag();
  }
  return {re, im};
}

double peak_modulus(std::span<const cplx> field) {
  const auto n = static_cast<std::ptrdiff_t>(field.size());
  double peak = 0.0;
#pragma omp parallel for reduction(max : peak) schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) peak = std::max(peak, std::abs(field[i]));
  return peak;
}

void render_blazed(std::span<const cplx> field, int side, int period, double peak,
                   std::span<double> phase, std::span<double> envelope) {
#pragma omp parallel for schedule(static)
  for (int r = 0; r < side; ++r)
    for (int c = 0; c < side; ++c) {
      const auto i = static_cast<std::size_t>(r) * side + c;
      phase[i] = detail::blazed_value(field[i], c, period, peak, &envelope[i]);
    }
}

}  // namespace biphase::kernels::parallel
