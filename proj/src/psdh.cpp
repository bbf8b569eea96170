#include "biphase/psdh.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <iomanip>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "biphase/error.hpp"

namespace biphase {

namespace {

// BFS / listing order: (|m| + |n|, m, n).
auto order_key(ModePair p) { return std::make_tuple(std::abs(p.m) + std::abs(p.n), p.m, p.n); }

bool order_less(ModePair a, ModePair b) { return order_key(a) < order_key(b); }

double intensity_of(const IntensitySpectrum& spectrum, ModePair mode) {
  const auto it = spectrum.find(mode);
  return it == spectrum.end() ? 0.0 : it->second;
}

std::vector<ModePair> finite_modes(const IntensitySpectrum& spectrum, double floor) {
  std::vector<ModePair> modes;
  for (const auto& [mode, value] : spectrum)
    if (value > floor) modes.push_back(mode);
  std::sort(modes.begin(), modes.end(), order_less);
  return modes;
}

std::string mode_list(const std::vector<ModePair>& modes) {
  std::string text;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    if (i) text += ", ";
    text += to_string(modes[i]);
  }
  return text;
}

void require_root(const IntensitySpectrum& spectrum, ModePair root, double floor) {
  if (!(intensity_of(spectrum, root) > floor))
    throw std::invalid_argument("root mode " + to_string(root) + " has no finite intensity");
}

bool single_arm_neighbours(ModePair a, ModePair b) {
  return (a.n == b.n && std::abs(a.m - b.m) == 1) || (a.m == b.m && std::abs(a.n - b.n) == 1);
}

}  // namespace

PhaseEstimate psdh_phase(const PhaseStepSeries& series) {
  const auto& r = series.records;
  const double x = r[0].mean - r[2].mean;
  const double y = r[1].mean - r[3].mean;
  double scale = 0.0;
  for (const auto& rec : r) scale = std::max(scale, std::abs(rec.mean));
  if (std::hypot(x, y) <= 1e-12 * scale || (x == 0.0 && y == 0.0))
    throw ContrastError("no interference contrast in phase-step series");
  const double var_x = r[0].stddev * r[0].stddev + r[2].stddev * r[2].stddev;
  const double var_y = r[1].stddev * r[1].stddev + r[3].stddev * r[3].stddev;
  const double r2 = x * x + y * y;
  return {wrap_phase(-std::atan2(y, x)), std::sqrt(x * x * var_y + y * y * var_x) / r2};
}

EdgeWeights default_edge_weights(int order) {
  if (order <= 1) return {0.60, 0.40};
  return {0.85, 0.15};
}

bool PlanEdge::single_arm() const { return target.m == reference.m || target.n == reference.n; }

DeviceSpec PlanEdge::device(double step_phase) const {
  const double dt = weights.target;
  const double dr = weights.reference;
  if (target.n == reference.n) {
    return DeviceSpec{ArmPattern{{{target.m, dt, 0.0}, {reference.m, dr, step_phase}}},
                      ArmPattern{{{target.n, 1.0, 0.0}}}};
  }
  if (target.m == reference.m) {
    return DeviceSpec{ArmPattern{{{target.m, 1.0, 0.0}}},
                      ArmPattern{{{target.n, dt, 0.0}, {reference.n, dr, step_phase}}}};
  }
  const double phase_a = stepped_arm == Arm::A ? step_phase : 0.0;
  const double phase_b = stepped_arm == Arm::B ? step_phase : 0.0;
  return DeviceSpec{ArmPattern{{{target.m, dt, 0.0}, {reference.m, dr, phase_a}}},
                    ArmPattern{{{target.n, dt, 0.0}, {reference.n, dr, phase_b}}}};
}

PlanEdge make_edge(ModePair target, ModePair reference, Arm stepped_arm) {
  if (target == reference) throw std::invalid_argument("edge target equals its reference");
  PlanEdge edge;
  edge.target = target;
  edge.reference = reference;
  if (target.n == reference.n)
    edge.stepped_arm = Arm::A;
  else if (target.m == reference.m)
    edge.stepped_arm = Arm::B;
  else
    edge.stepped_arm = stepped_arm;
  const int order = std::max({std::abs(target.m), std::abs(target.n), std::abs(reference.m),
                              std::abs(reference.n)});
  edge.weights = default_edge_weights(order);
  return edge;
}

void MeasurementPlan::validate() const {
  std::set<ModePair> known{root};
  for (const auto& e : edges) {
    if (!known.count(e.reference))
      throw std::invalid_argument("edge " + to_string(e.target) + " references unmeasured mode " +
                                  to_string(e.reference));
    if (!known.insert(e.target).second)
      throw std::invalid_argument("mode " + to_string(e.target) + " measured twice");
    e.device(0.0).validate();
  }
}

std::vector<ModePair> MeasurementPlan::modes() const {
  std::vector<ModePair> out{root};
  for (const auto& e : edges) out.push_back(e.target);
  return out;
}

std::string MeasurementPlan::describe() const {
  std::ostringstream out;
  out << "root " << to_string(root) << ", " << edges.size() << " edge(s)\n";
  out << std::left << std::setw(4) << "#" << std::setw(10) << "target" << std::setw(11)
      << "reference" << std::setw(6) << "step" << std::setw(8) << "d_t" << std::setw(8) << "d_r"
      << "device at phi_ref\n";
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto& e = edges[i];
    out << std::left << std::setw(4) << i << std::setw(10) << to_string(e.target)
        << std::setw(11) << to_string(e.reference) << std::setw(6) << arm_name(e.stepped_arm)
        << std::setw(8) << e.weights.target << std::setw(8) << e.weights.reference
        << e.device(0.0).describe() << '\n';
  }
  return out.str();
}

std::vector<ModePair> cross_term_violations(const PlanEdge& edge,
                                            const IntensitySpectrum& spectrum, double epsilon) {
  const DeviceSpec device = edge.device(0.0);
  double reference_amp = 0.0;
  for (const auto& a : device.arm_a.terms)
    for (const auto& b : device.arm_b.terms)
      if (ModePair{a.mode, b.mode} == edge.reference)
        reference_amp = a.weight * b.weight * std::sqrt(intensity_of(spectrum, edge.reference));
  std::vector<ModePair> bad;
  for (const auto& a : device.arm_a.terms)
    for (const auto& b : device.arm_b.terms) {
      const ModePair pair{a.mode, b.mode};
      if (pair == edge.target || pair == edge.reference) continue;
      const double amp = a.weight * b.weight * std::sqrt(intensity_of(spectrum, pair));
      if (amp > 0.0 && amp >= epsilon * reference_amp) bad.push_back(pair);
    }
  return bad;
}

MeasurementPlan plan_ancillary(const IntensitySpectrum& spectrum, ModePair root,
                               const PlanOptions& options) {
  require_root(spectrum, root, options.finite_floor);
  MeasurementPlan plan{root, {}};
  const auto finite = finite_modes(spectrum, options.finite_floor);
  std::vector<ModePair> sharing;
  for (const auto& mode : finite)
    if (mode != root && (mode.m == root.m || mode.n == root.n)) sharing.push_back(mode);
  if (!sharing.empty())
    throw InfeasiblePlanError("root " + to_string(root) +
                              " is not ancillary: finite mode(s) " + mode_list(sharing) +
                              " share a single-photon index with it");
  for (const auto& target : finite) {
    if (target == root) continue;
    PlanEdge edge = make_edge(target, root, options.stepped_arm);
    const auto bad = cross_term_violations(edge, spectrum, options.epsilon);
    if (!bad.empty())
      throw InfeasiblePlanError("edge " + to_string(target) + " <- " + to_string(root) +
                                " has cross term(s) above threshold: " + mode_list(bad));
    plan.edges.push_back(edge);
  }
  return plan;
}

MeasurementPlan plan_inductive(const IntensitySpectrum& spectrum, ModePair root,
                               const PlanOptions& options) {
  require_root(spectrum, root, options.finite_floor);
  MeasurementPlan plan{root, {}};
  const auto finite = finite_modes(spectrum, options.finite_floor);
  std::set<ModePair> reached{root};
  std::vector<ModePair> frontier{root};

  auto reference_key = [](ModePair ref, Arm stepped) {
    return std::make_tuple(stepped == Arm::B ? 0 : 1, std::abs(ref.m) + std::abs(ref.n),
                           std::abs(ref.m), ref.m, ref.n);
  };

  while (true) {
    // Level-synchronous BFS over single-arm (+-1) steps.
    while (!frontier.empty()) {
      std::vector<ModePair> next;
      for (const auto& target : finite) {
        if (reached.count(target)) continue;
        const ModePair* best = nullptr;
        for (const auto& ref : frontier) {
          if (!single_arm_neighbours(target, ref)) continue;
          const Arm arm = target.m == ref.m ? Arm::B : Arm::A;
          const Arm best_arm = best && target.m == best->m ? Arm::B : Arm::A;
          if (!best || reference_key(ref, arm) < reference_key(*best, best_arm)) best = &ref;
        }
        if (!best) continue;
        plan.edges.push_back(make_edge(target, *best, options.stepped_arm));
        next.push_back(target);
      }
      for (const auto& mode : next) reached.insert(mode);
      frontier = std::move(next);
    }

    // No single-arm neighbour left: attach the first reachable mode through a
    // two-arm step from the smallest feasible reference, then resume.
    bool attached = false;
    for (const auto& target : finite) {
      if (reached.count(target)) continue;
      std::vector<ModePair> refs(reached.begin(), reached.end());
      std::sort(refs.begin(), refs.end(), [](ModePair a, ModePair b) {
        return std::make_tuple(std::abs(a.m) + std::abs(a.n), std::abs(a.m), a.m, a.n) <
               std::make_tuple(std::abs(b.m) + std::abs(b.n), std::abs(b.m), b.m, b.n);
      });
      for (const auto& ref : refs) {
        if (ref.m == target.m || ref.n == target.n) continue;
        PlanEdge edge = make_edge(target, ref, options.stepped_arm);
        if (!cross_term_violations(edge, spectrum, options.epsilon).empty()) continue;
        plan.edges.push_back(edge);
        reached.insert(target);
        frontier = {target};
        attached = true;
        break;
      }
      if (attached) break;
    }
    if (!attached) break;
  }

  std::vector<ModePair> missing;
  for (const auto& mode : finite)
    if (!reached.count(mode)) missing.push_back(mode);
  if (!missing.empty())
    throw InfeasiblePlanError("spectrum is not connected to root " + to_string(root) +
                              "; unreachable mode(s): " + mode_list(missing));
  return plan;
}

const SpectrumEntry* PhasedSpectrum::find(ModePair mode) const {
  for (const auto& e : entries)
    if (e.mode == mode) return &e;
  return nullptr;
}

const SpectrumEntry& PhasedSpectrum::at(ModePair mode) const {
  const auto* e = find(mode);
  if (!e) throw std::out_of_range("mode " + to_string(mode) + " not in spectrum");
  return *e;
}

std::vector<ModePair> mode_grid(int bandwidth) {
  std::vector<ModePair> modes;
  for (int m = -bandwidth; m <= bandwidth; ++m)
    for (int n = -bandwidth; n <= bandwidth; ++n) modes.push_back({m, n});
  return modes;
}

MeasuredSpectrum measure_spectrum(const std::vector<ModePair>& modes, const BiphotonState& state,
                                  const DetectorConfig& det) {
  det.validate();
  std::vector<CoincidenceRecord> records(modes.size());
  const auto count = static_cast<std::ptrdiff_t>(modes.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < count; ++i) records[i] = acquire(bare_device(modes[i]), state, det);
  double total = 0.0;
  for (const auto& rec : records) total += rec.mean;
  if (!(total > 0.0)) throw std::invalid_argument("no coincidences recorded in spectrum pass");
  MeasuredSpectrum out;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    out.intensity[modes[i]] = records[i].mean / total;
    out.error[modes[i]] = records[i].stddev / total;
  }
  return out;
}

PhaseStepSeries acquire_series(const PlanEdge& edge, const BiphotonState& state,
                               const DetectorConfig& det) {
  PhaseStepSeries series;
  series.stepped_arm = edge.stepped_arm;
  for (std::size_t k = 0; k < kPhaseSteps.size(); ++k)
    series.records[k] = acquire(edge.device(kPhaseSteps[k]), state, det, k);
  return series;
}

PhasedSpectrum execute_plan(const MeasurementPlan& plan, const BiphotonState& state,
                            const DetectorConfig& det) {
  plan.validate();
  det.validate();
  const auto modes = plan.modes();
  const MeasuredSpectrum bare = measure_spectrum(modes, state, det);

  const auto count = static_cast<std::ptrdiff_t>(plan.edges.size());
  std::vector<PhaseEstimate> estimates(plan.edges.size());
  std::vector<std::exception_ptr> failures(plan.edges.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      estimates[i] = psdh_phase(acquire_series(plan.edges[i], state, det));
    } catch (...) {
      failures[i] = std::current_exception();
    }
  }
  for (std::size_t i = 0; i < failures.size(); ++i) {
    if (!failures[i]) continue;
    const auto& e = plan.edges[i];
    try {
      std::rethrow_exception(failures[i]);
    } catch (const ContrastError& err) {
      throw ContrastError("edge " + std::to_string(i) + " " + to_string(e.target) + " <- " +
                          to_string(e.reference) + ": " + err.what());
    }
  }

  std::map<ModePair, PhaseEstimate> absolute{{plan.root, {0.0, 0.0}}};
  for (std::size_t i = 0; i < plan.edges.size(); ++i) {
    const auto& e = plan.edges[i];
    const auto& ref = absolute.at(e.reference);
    absolute[e.target] = {ref.phase + estimates[i].phase, std::hypot(ref.error, estimates[i].error)};
  }

  PhasedSpectrum out;
  out.root = plan.root;
  for (const auto& [mode, est] : absolute)
    out.entries.push_back({mode, bare.intensity.at(mode), bare.error.at(mode),
                           wrap_phase(est.phase), est.error});
  return out;
}

}  // namespace biphase
