#include "biphase/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace biphase {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

BiphotonState assemble_state(const PhasedSpectrum& spectrum, int bandwidth) {
  BiphotonState state(bandwidth);
  for (const auto& e : spectrum.entries) {
    if (e.intensity < 0.0) throw std::invalid_argument("negative intensity in spectrum");
    state.set(e.mode, std::polar(std::sqrt(e.intensity), e.mode == spectrum.root ? 0.0 : e.phase));
  }
  return state;
}

std::vector<ModePair> ordered_basis(int bandwidth, bool include_zero) {
  std::vector<ModePair> basis;
  for (int m = bandwidth; m >= -bandwidth; --m) {
    if (m == 0 && !include_zero) continue;
    for (int n = bandwidth; n >= -bandwidth; --n) {
      if (n == 0 && !include_zero) continue;
      basis.push_back({m, n});
    }
  }
  return basis;
}

double DensityMatrix::trace() const { return rho.trace().real(); }

double DensityMatrix::purity() const { return (rho * rho).trace().real(); }

double DensityMatrix::largest_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().maxCoeff();
}

double DensityMatrix::hermiticity_defect() const {
  return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

DensityMatrix density_matrix(const BiphotonState& state, const std::vector<ModePair>& basis) {
  for (const auto& mode : state.support())
    if (std::find(basis.begin(), basis.end(), mode) == basis.end())
      throw std::invalid_argument("basis is missing finite mode " + to_string(mode));
  const double n2 = state.norm_squared();
  if (!(n2 > 0.0)) throw std::invalid_argument("density matrix of the zero state");
  Eigen::VectorXcd psi(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i)
    psi(static_cast<Eigen::Index>(i)) = state.coefficient(basis[i]) / std::sqrt(n2);
  return DensityMatrix{basis, psi * psi.adjoint()};
}

double fidelity(const BiphotonState& state, const BiphotonState& reference) {
  const double na = state.norm_squared();
  const double nb = reference.norm_squared();
  if (!(na > 0.0) || !(nb > 0.0)) throw std::invalid_argument("fidelity with the zero state");
  cplx inner{};
  for (const auto& [mode, value] : reference.coefficients())
    inner += std::conj(value) * state.coefficient(mode);
  return std::min(1.0, std::norm(inner) / (na * nb));
}

FitResult fit_gouy_slope(const std::map<int, PhaseEstimate>& diagonal_phases,
                         const FitOptions& options) {
  if (diagonal_phases.size() < 2)
    throw std::invalid_argument("slope fit needs at least two distinct |m| values");
  struct Point {
    int order;
    double phase;
    double weight;
    bool anchored;
  };
  std::vector<Point> points;
  int max_order = 0;
  double max_weight = 0.0;
  for (const auto& [order, est] : diagonal_phases) {
    if (order < 0) throw std::invalid_argument("diagonal phases are keyed by |m|");
    double w = 1.0;
    if (options.weighted) {
      if (!(est.error > 0.0)) throw std::invalid_argument("weighted fit needs positive errors");
      w = 1.0 / (est.error * est.error);
    }
    max_weight = std::max(max_weight, w);
    max_order = std::max(max_order, order);
    points.push_back({order, order == 0 ? 0.0 : est.phase, w, order == 0});
  }
  // The reference mode anchors the line at the origin.
  if (!diagonal_phases.count(0)) points.insert(points.begin(), {0, 0.0, max_weight, true});
  for (auto& p : points)
    if (p.anchored) p.weight = max_weight;

  const int turns = max_order + 1;
  std::vector<int> free_idx;
  for (std::size_t i = 0; i < points.size(); ++i)
    if (!points[i].anchored) free_idx.push_back(static_cast<int>(i));

  FitResult best;
  double best_rms = std::numeric_limits<double>::infinity();
  int best_offset = std::numeric_limits<int>::max();
  std::vector<int> offsets(free_idx.size(), -turns);
  while (true) {
    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::vector<double> y(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) y[i] = points[i].phase;
    int total_offset = 0;
    for (std::size_t k = 0; k < free_idx.size(); ++k) {
      y[free_idx[k]] += kTwoPi * offsets[k];
      total_offset += std::abs(offsets[k]);
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double w = points[i].weight;
      const double x = points[i].order;
      sw += w;
      sx += w * x;
      sy += w * y[i];
      sxx += w * x * x;
      sxy += w * x * y[i];
    }
    const double det = sw * sxx - sx * sx;
    if (det > 0.0) {
      const double slope = (sw * sxy - sx * sy) / det;
      const double intercept = (sy - slope * sx) / sw;
      double ss = 0.0;
      for (std::size_t i = 0; i < points.size(); ++i) {
        const double r = y[i] - (slope * points[i].order + intercept);
        ss += r * r;
      }
      const double rms = std::sqrt(ss / static_cast<double>(points.size()));
      const bool in_range = slope > -std::numbers::pi - 1e-12 && slope <= std::numbers::pi + 1e-12;
      const bool better = rms < best_rms - 1e-12 ||
                          (std::abs(rms - best_rms) <= 1e-12 && total_offset < best_offset);
      if (in_range && better) {
        best_rms = rms;
        best_offset = total_offset;
        best.slope = slope;
        best.intercept = intercept;
        best.residual = rms;
        best.unwrapped.clear();
        for (std::size_t i = 0; i < points.size(); ++i) best.unwrapped[points[i].order] = y[i];
      }
    }
    std::size_t k = 0;
    while (k < offsets.size() && ++offsets[k] > turns) offsets[k++] = -turns;
    if (k == offsets.size()) break;
  }
  if (!std::isfinite(best_rms))
    throw std::invalid_argument("slope fit has no admissible unwrapping");
  return best;
}

std::map<int, PhaseEstimate> diagonal_phases(const PhasedSpectrum& spectrum) {
  struct Acc {
    cplx sum{};
    double var = 0.0;
    int count = 0;
  };
  std::map<int, Acc> acc;
  for (const auto& e : spectrum.entries) {
    if (e.mode.m + e.mode.n != 0) continue;
    auto& a = acc[std::abs(e.mode.m)];
    a.sum += std::polar(1.0, e.phase);
    a.var += e.phase_err * e.phase_err;
    ++a.count;
  }
  std::map<int, PhaseEstimate> out;
  for (const auto& [order, a] : acc)
    out[order] = {wrap_phase(std::arg(a.sum)), std::sqrt(a.var) / a.count};
  return out;
}

std::vector<GeometricPhasePoint> extract_geometric_phase(
    const std::vector<std::pair<double, PhasedSpectrum>>& sweep) {
  const PhasedSpectrum* base = nullptr;
  for (const auto& [eta, spectrum] : sweep)
    if (eta == 0.0) base = &spectrum;
  if (!base) throw std::invalid_argument("geometric-phase sweep needs an eta = 0 spectrum");
  const ModePair plus{1, -1};
  const ModePair minus{-1, 1};
  auto lookup = [](const PhasedSpectrum& s, ModePair mode) -> const SpectrumEntry& {
    const auto* e = s.find(mode);
    if (!e) throw std::invalid_argument("spectrum lacks anti-diagonal mode " + to_string(mode));
    return *e;
  };
  const auto& p0 = lookup(*base, plus);
  const auto& m0 = lookup(*base, minus);
  std::vector<GeometricPhasePoint> out;
  for (const auto& [eta, spectrum] : sweep) {
    const auto& p = lookup(spectrum, plus);
    const auto& m = lookup(spectrum, minus);
    GeometricPhasePoint pt;
    pt.eta = eta;
    pt.shift_plus = wrap_signed(p.phase - p0.phase);
    pt.shift_minus = wrap_signed(m.phase - m0.phase);
    if (&spectrum != base) {
      pt.err_plus = std::hypot(p.phase_err, p0.phase_err);
      pt.err_minus = std::hypot(m.phase_err, m0.phase_err);
    }
    out.push_back(pt);
  }
  return out;
}

}  // namespace biphase
