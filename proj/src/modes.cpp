#include "biphase/modes.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "biphase/kernels.hpp"

namespace biphase {

double BeamGeometry::rayleigh_range_mm() const {
  const double lambda_mm = lambda_nm * 1e-6;
  return std::numbers::pi * w0_mm * w0_mm / lambda_mm;
}

double BeamGeometry::gouy_angle() const { return std::atan(z_mm / rayleigh_range_mm()); }

void BeamGeometry::validate() const {
  if (!(w0_mm > 0.0) || !std::isfinite(w0_mm))
    throw std::invalid_argument("beam waist must be positive");
  if (!(lambda_nm > 0.0) || !std::isfinite(lambda_nm))
    throw std::invalid_argument("wavelength must be positive");
  if (!std::isfinite(z_mm)) throw std::invalid_argument("propagation distance must be finite");
}

BeamGeometry BeamGeometry::with_gouy_angle(double angle, double w0_mm, double lambda_nm) {
  if (!(std::abs(angle) < std::numbers::pi / 2))
    throw std::invalid_argument("Gouy angle must lie in (-pi/2, pi/2)");
  BeamGeometry geom{w0_mm, lambda_nm, 0.0};
  geom.validate();
  geom.z_mm = std::tan(angle) * geom.rayleigh_range_mm();
  return geom;
}

void GridSpec::validate() const {
  if (side < 2) throw std::invalid_argument("grid needs at least 2 samples per side");
  if (!(extent_mm > 0.0) || !std::isfinite(extent_mm))
    throw std::invalid_argument("grid extent must be positive");
}

GridSpec default_grid(const BeamGeometry& geom) { return GridSpec{512, 4.0 * geom.w0_mm}; }

SampledField::SampledField(GridSpec grid) : grid_(grid) {
  grid_.validate();
  values_.assign(static_cast<std::size_t>(grid_.side) * grid_.side, cplx{});
}

cplx eval_lg(ModeIndex mode, const BeamGeometry& geom, double x_mm, double y_mm) {
  const int order = std::abs(mode.m);
  const double r2 = x_mm * x_mm + y_mm * y_mm;
  const double w2 = geom.w0_mm * geom.w0_mm;
  const double norm = std::sqrt(2.0 / (std::numbers::pi * std::tgamma(order + 1.0)));
  const double radial = std::pow(std::sqrt(2.0 * r2 / w2), order);
  const double modulus = norm * std::exp(-r2 / w2) * radial;
  if (mode.m == 0) return {modulus, 0.0};
  const double theta = mode.m * std::atan2(y_mm, x_mm);
  return std::polar(modulus, theta);
}

SampledField sample_field(std::span<const ModeTerm> terms, const BeamGeometry& geom,
                          const GridSpec& grid, FieldNorm norm) {
  if (terms.empty()) throw std::invalid_argument("superposition has no terms");
  geom.validate();
  SampledField field(grid);
  kernels::parallel::sample_superposition(terms, geom, grid, field.values());
  if (norm == FieldNorm::unit) {
    const double n = l2_norm(field);
    if (n > 0.0)
      for (auto& v : field.values()) v /= n;
  }
  return field;
}

cplx overlap(const SampledField& a, const SampledField& b) {
  if (!(a.grid() == b.grid())) throw std::invalid_argument("overlap of fields on different grids");
  const double area = a.pitch() * a.pitch();
  return kernels::parallel::inner_product(a.values(), b.values()) * area;
}

double l2_norm(const SampledField& field) { return std::sqrt(overlap(field, field).real()); }

void write_csv(std::ostream& out, const SampledField& field) {
  const auto old = out.precision(17);
  for (int r = 0; r < field.side(); ++r) {
    for (int c = 0; c < field.side(); ++c) {
      const cplx v = field.at(r, c);
      if (c) out << ',';
      out << v.real() << ',' << v.imag();
    }
    out << '\n';
  }
  out.precision(old);
}

}  // namespace biphase
