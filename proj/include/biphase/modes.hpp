#pragma once

#include <complex>
#include <compare>
#include <iosfwd>
#include <span>
#include <vector>

namespace biphase {

using cplx = std::complex<double>;

// Single-photon LG mode label. Only the p = 0 radial family is modelled.
struct ModeIndex {
  int m = 0;
  static constexpr int p = 0;

  auto operator<=>(const ModeIndex&) const = default;
};

struct BeamGeometry {
  double w0_mm = 2.0;
  double lambda_nm = 812.0;
  double z_mm = 0.0;

  // z_R = pi w0^2 / lambda, in mm.
  double rayleigh_range_mm() const;
  // arctan(z / z_R), the per-order Gouy angle.
  double gouy_angle() const;
  void validate() const;

  // Geometry whose propagation distance gives arctan(z / z_R) == angle.
  static BeamGeometry with_gouy_angle(double angle, double w0_mm = 2.0,
                                      double lambda_nm = 812.0);
};

// Square sampling grid centred on the optical axis. Sample i sits at
// coordinate (2i - (side - 1)) * extent / (side - 1), which is exactly
// antisymmetric about the centre.
struct GridSpec {
  int side = 512;
  double extent_mm = 8.0;  // half-width

  double pitch() const { return 2.0 * extent_mm / (side - 1); }
  double coord(int i) const {
    return (2.0 * i - (side - 1)) * (extent_mm / (side - 1));
  }
  void validate() const;

  bool operator==(const GridSpec&) const = default;
};

// 512^2 samples spanning +-4 w0.
GridSpec default_grid(const BeamGeometry& geom);

struct ModeTerm {
  ModeIndex mode;
  cplx weight{1.0, 0.0};
};

class SampledField {
 public:
  explicit SampledField(GridSpec grid);

  const GridSpec& grid() const { return grid_; }
  int side() const { return grid_.side; }
  double extent() const { return grid_.extent_mm; }
  double pitch() const { return grid_.pitch(); }

  cplx& at(int row, int col) { return values_[index(row, col)]; }
  const cplx& at(int row, int col) const { return values_[index(row, col)]; }

  std::span<cplx> values() { return values_; }
  std::span<const cplx> values() const { return values_; }

 private:
  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * grid_.side + col;
  }

  GridSpec grid_;
  std::vector<cplx> values_;
};

// Unnormalised LG_m^0 field at z = 0:
//   sqrt(2 / (pi |m|!)) exp(-r^2 / w0^2) (sqrt(2) r / w0)^|m| exp(i m theta)
// Its continuous L2 norm squared is w0^2 (mm^2).
cplx eval_lg(ModeIndex mode, const BeamGeometry& geom, double x_mm, double y_mm);

enum class FieldNorm { none, unit };

SampledField sample_field(std::span<const ModeTerm> terms, const BeamGeometry& geom,
                          const GridSpec& grid, FieldNorm norm = FieldNorm::none);

// Discrete inner product sum(conj(a) * b) * pitch^2.
cplx overlap(const SampledField& a, const SampledField& b);

double l2_norm(const SampledField& field);

// One row per grid row; re and im interleaved across columns.
void write_csv(std::ostream& out, const SampledField& field);

}  // namespace biphase
