#pragma once

#include <map>
#include <vector>

#include <Eigen/Dense>

#include "biphase/psdh.hpp"

namespace biphase {

// c_{m,n} = sqrt(intensity) exp(i phase) for every spectrum entry.
BiphotonState assemble_state(const PhasedSpectrum& spectrum, int bandwidth);

// Product basis with m and n each running from +bandwidth down to
// -bandwidth. With include_zero = false and bandwidth 2 this is the 16-vector
// ordering |+2,+2>, |+2,+1>, |+2,-1>, ... , |-2,-2>.
std::vector<ModePair> ordered_basis(int bandwidth, bool include_zero);

struct DensityMatrix {
  std::vector<ModePair> basis;
  Eigen::MatrixXcd rho;

  int dim() const { return static_cast<int>(basis.size()); }
  double trace() const;
  double purity() const;
  double largest_eigenvalue() const;
  double hermiticity_defect() const;  // max |rho - rho^dagger|
};

// rho = |psi><psi| of the state normalised over `basis`. Throws if the state
// has weight on a mode outside the basis.
DensityMatrix density_matrix(const BiphotonState& state, const std::vector<ModePair>& basis);

// |<reference|state>|^2 for unit-normalised copies of both.
double fidelity(const BiphotonState& state, const BiphotonState& reference);

struct FitResult {
  double slope = 0.0;      // C, radians per |m|
  double intercept = 0.0;  // radians
  double residual = 0.0;   // RMS, radians
  std::map<int, double> unwrapped;  // |m| -> phase used in the fit
};

struct FitOptions {
  // 1/err^2 weights; requires every point to carry a positive error.
  bool weighted = false;
};

// Straight-line fit phi(|m|) = C |m| + b through the per-order diagonal
// phases, with the reference point (0, 0) added when |m| = 0 is absent.
// Each nonzero order is tried at every 2 pi offset up to
// +-(max|m| + 1) turns; the assignment with the smallest RMS residual and
// |C| <= pi wins, ties going to the smaller total offset.
FitResult fit_gouy_slope(const std::map<int, PhaseEstimate>& diagonal_phases,
                         const FitOptions& options = {});

// Per-|m| phases of the conserved diagonal m + n = 0 (circular mean of the
// +m and -m modes; errors combined in quadrature and halved).
std::map<int, PhaseEstimate> diagonal_phases(const PhasedSpectrum& spectrum);

struct GeometricPhasePoint {
  double eta = 0.0;
  double shift_plus = 0.0;  // phi_{+1,-1}(eta) - phi_{+1,-1}(0), in (-pi, pi]
  double err_plus = 0.0;
  double shift_minus = 0.0;  // same for |-1,+1>
  double err_minus = 0.0;
};

// Shifts relative to the eta == 0 spectrum, which must be present.
std::vector<GeometricPhasePoint> extract_geometric_phase(
    const std::vector<std::pair<double, PhasedSpectrum>>& sweep);

}  // namespace biphase
