#include "biphase/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

#include "biphase/error.hpp"
#include "biphase/io.hpp"

namespace biphase {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
  if (!obj.is_object()) throw std::invalid_argument(where + ": expected an object");
  const std::set<std::string> names(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items())
    if (!names.count(key)) throw std::invalid_argument(where + ": unknown key '" + key + "'");
}

template <typename T>
T get(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw std::invalid_argument(where + ": missing key '" + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(where + "." + key + ": " + e.what());
  }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback, const std::string& where) {
  return obj.contains(key) ? get<T>(obj, key, where) : fallback;
}

ModePair parse_mode(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument(where + ": expected [m, n]");
  return {j.at(0).get<int>(), j.at(1).get<int>()};
}

Arm parse_arm(const std::string& text, const std::string& where) {
  if (text == "A" || text == "a") return Arm::A;
  if (text == "B" || text == "b") return Arm::B;
  throw std::invalid_argument(where + ": arm must be \"A\" or \"B\"");
}

BeamGeometry parse_geometry(const json& j, const std::string& where) {
  check_keys(j, {"w0_mm", "lambda_nm", "z_mm"}, where);
  BeamGeometry g;
  g.w0_mm = get_or(j, "w0_mm", g.w0_mm, where);
  g.lambda_nm = get_or(j, "lambda_nm", g.lambda_nm, where);
  g.z_mm = get_or(j, "z_mm", g.z_mm, where);
  g.validate();
  return g;
}

}  // namespace

Scenario parse_scenario(const json& doc, const fs::path& base_dir) {
  check_keys(doc, {"schema", "name", "bandwidth", "source", "channels", "detector", "plan", "sweep",
                   "hologram", "outputs"},
             "scenario");
  const auto schema = get<std::string>(doc, "schema", "scenario");
  if (schema != kScenarioSchema)
    throw std::invalid_argument("unsupported scenario schema '" + schema + "'");
  Scenario sc;
  sc.name = get_or<std::string>(doc, "name", "scenario", "scenario");
  sc.bandwidth = get_or(doc, "bandwidth", sc.bandwidth, "scenario");
  if (sc.bandwidth < 0) throw std::invalid_argument("scenario: bandwidth must be >= 0");

  if (doc.contains("source")) {
    const auto& src = doc.at("source");
    check_keys(src, {"pump", "fixture", "state"}, "source");
    if (src.size() != 1)
      throw std::invalid_argument("source: give exactly one of pump, fixture, state");
    if (src.contains("pump")) {
      const auto& p = src.at("pump");
      check_keys(p, {"components", "profile"}, "source.pump");
      PumpSpec pump;
      const auto& comps = p.at("components");
      if (!comps.is_array() || comps.empty())
        throw std::invalid_argument("source.pump: pump has no OAM components");
      double total = 0.0;
      for (const auto& c : comps) {
        check_keys(c, {"ell", "amplitude", "phase"}, "source.pump.components");
        const double amp = get_or(c, "amplitude", 1.0, "source.pump.components");
        if (amp < 0.0) throw std::invalid_argument("source.pump: amplitude must be >= 0");
        pump.components.push_back({get<int>(c, "ell", "source.pump.components"),
                                   std::polar(amp, get_or(c, "phase", 0.0, "source.pump"))});
        total += amp * amp;
      }
      if (!(total > 0.0)) throw std::invalid_argument("source.pump: components are all zero");
      for (auto& c : pump.components) c.weight /= std::sqrt(total);
      const auto& profile = p.at("profile");
      if (!profile.is_object()) throw std::invalid_argument("source.pump.profile: expected object");
      for (const auto& [key, value] : profile.items()) {
        int offset = 0;
        try {
          std::size_t used = 0;
          offset = std::stoi(key, &used);
          if (used != key.size()) throw std::invalid_argument(key);
        } catch (const std::exception&) {
          throw std::invalid_argument("source.pump.profile: key '" + key + "' is not an integer");
        }
        pump.diagonal_profile[offset] = value.get<double>();
      }
      pump.validate();
      sc.pump = pump;
    } else if (src.contains("fixture")) {
      fs::path path = src.at("fixture").get<std::string>();
      if (path.is_relative()) path = base_dir / path;
      sc.state = assemble_state(io::load_fixture(path), sc.bandwidth);
    } else {
      sc.state = io::state_from_json(src.at("state"));
    }
  } else {
    throw std::invalid_argument("scenario: missing key 'source'");
  }

  if (doc.contains("channels")) {
    for (const auto& c : doc.at("channels")) {
      const auto type = get<std::string>(c, "type", "channels");
      ChannelSpec ch;
      if (type == "gouy") {
        check_keys(c, {"type", "angle", "arm_a", "arm_b"}, "channels.gouy");
        ch.kind = ChannelSpec::Kind::gouy;
        if (c.contains("angle")) {
          if (c.contains("arm_a") || c.contains("arm_b"))
            throw std::invalid_argument("channels.gouy: give either angle or arm geometries");
          ch.arm_a = ch.arm_b = BeamGeometry::with_gouy_angle(c.at("angle").get<double>());
        } else {
          ch.arm_a = parse_geometry(c.at("arm_a"), "channels.gouy.arm_a");
          ch.arm_b = parse_geometry(c.at("arm_b"), "channels.gouy.arm_b");
        }
      } else if (type == "dove") {
        check_keys(c, {"type", "eta_deg", "arm"}, "channels.dove");
        ch.kind = ChannelSpec::Kind::dove;
        ch.eta = get<double>(c, "eta_deg", "channels.dove") * kDeg;
        ch.arm = parse_arm(get_or<std::string>(c, "arm", "A", "channels.dove"), "channels.dove");
      } else if (type == "pump_phase") {
        check_keys(c, {"type", "ell", "phase"}, "channels.pump_phase");
        ch.kind = ChannelSpec::Kind::pump_phase;
        ch.ell = get<int>(c, "ell", "channels.pump_phase");
        ch.delta = get<double>(c, "phase", "channels.pump_phase");
      } else {
        throw std::invalid_argument("channels: unknown channel type '" + type + "'");
      }
      sc.channels.push_back(ch);
    }
  }

  if (doc.contains("detector")) {
    const auto& d = doc.at("detector");
    check_keys(d, {"brightness", "window_s", "repeats", "seed", "noiseless"}, "detector");
    sc.detector.brightness = get_or(d, "brightness", sc.detector.brightness, "detector");
    sc.detector.window_s = get_or(d, "window_s", sc.detector.window_s, "detector");
    sc.detector.repeats = get_or(d, "repeats", sc.detector.repeats, "detector");
    sc.detector.seed = get_or<std::uint64_t>(d, "seed", sc.detector.seed, "detector");
    sc.detector.noiseless = get_or(d, "noiseless", sc.detector.noiseless, "detector");
  }
  sc.detector.validate();

  if (doc.contains("plan")) {
    const auto& p = doc.at("plan");
    check_keys(p, {"strategy", "root", "stepped_arm", "epsilon"}, "plan");
    const auto strategy = get_or<std::string>(p, "strategy", "ancillary", "plan");
    if (strategy == "ancillary")
      sc.strategy = PlanStrategy::ancillary;
    else if (strategy == "inductive")
      sc.strategy = PlanStrategy::inductive;
    else
      throw std::invalid_argument("plan: unknown strategy '" + strategy + "'");
    if (p.contains("root")) sc.root = parse_mode(p.at("root"), "plan.root");
    sc.plan_options.stepped_arm =
        parse_arm(get_or<std::string>(p, "stepped_arm", "B", "plan"), "plan.stepped_arm");
    sc.plan_options.epsilon = get_or(p, "epsilon", sc.plan_options.epsilon, "plan");
    if (!(sc.plan_options.epsilon > 0.0)) throw std::invalid_argument("plan: epsilon must be > 0");
  }

  if (doc.contains("sweep")) {
    const auto& s = doc.at("sweep");
    check_keys(s, {"eta_deg", "arm", "pump_phases", "ell"}, "sweep");
    if (s.contains("eta_deg"))
      for (double eta : s.at("eta_deg").get<std::vector<double>>()) sc.sweep_eta.push_back(eta * kDeg);
    sc.sweep_arm = parse_arm(get_or<std::string>(s, "arm", "A", "sweep"), "sweep.arm");
    if (s.contains("pump_phases"))
      sc.sweep_pump_phases = s.at("pump_phases").get<std::vector<double>>();
    sc.sweep_pump_ell = get_or(s, "ell", sc.sweep_pump_ell, "sweep");
  }

  if (doc.contains("hologram")) {
    const auto& h = doc.at("hologram");
    check_keys(h, {"bare", "edge", "target", "device", "w0_mm", "lambda_nm", "grid_side", "pitch_mm",
                   "fringe_period", "levels", "phase_csv"},
               "hologram");
    HologramRequest req;
    const int selectors = static_cast<int>(h.contains("bare")) + h.contains("edge") +
                          h.contains("target") + h.contains("device");
    if (selectors != 1)
      throw std::invalid_argument("hologram: give exactly one of bare, edge, target, device");
    if (h.contains("bare")) {
      req.kind = HologramRequest::Kind::bare;
      req.mode = parse_mode(h.at("bare"), "hologram.bare");
    } else if (h.contains("edge")) {
      req.kind = HologramRequest::Kind::edge;
      req.edge_index = h.at("edge").get<int>();
    } else if (h.contains("target")) {
      req.kind = HologramRequest::Kind::edge;
      req.target = parse_mode(h.at("target"), "hologram.target");
    } else {
      const auto& d = h.at("device");
      check_keys(d, {"A", "B", "stepped_arm"}, "hologram.device");
      req.kind = HologramRequest::Kind::device;
      auto parse_terms = [](const json& arr, const std::string& where) {
        ArmPattern arm;
        for (const auto& t : arr) {
          check_keys(t, {"m", "weight", "phase"}, where);
          arm.terms.push_back({get<int>(t, "m", where), get_or(t, "weight", 1.0, where),
                               get_or(t, "phase", 0.0, where)});
        }
        return arm;
      };
      req.device.arm_a = parse_terms(d.at("A"), "hologram.device.A");
      req.device.arm_b = parse_terms(d.at("B"), "hologram.device.B");
      if (d.contains("stepped_arm"))
        req.device_stepped = parse_arm(d.at("stepped_arm").get<std::string>(), "hologram.device");
    }
    req.geometry.w0_mm = get_or(h, "w0_mm", req.geometry.w0_mm, "hologram");
    req.geometry.lambda_nm = get_or(h, "lambda_nm", req.geometry.lambda_nm, "hologram");
    req.geometry.validate();
    req.grid = slm_grid(get_or(h, "grid_side", 1080, "hologram"),
                        get_or(h, "pitch_mm", 0.008, "hologram"));
    req.fringe_period = get_or(h, "fringe_period", req.fringe_period, "hologram");
    if (req.fringe_period < 2) throw std::invalid_argument("hologram: fringe_period must be >= 2");
    req.levels = get_or(h, "levels", req.levels, "hologram");
    req.phase_csv = get_or(h, "phase_csv", req.phase_csv, "hologram");
    sc.hologram = req;
  }

  if (doc.contains("outputs")) {
    const auto& o = doc.at("outputs");
    check_keys(o, {"dir", "plot", "density_basis"}, "outputs");
    sc.output_dir = get_or<std::string>(o, "dir", sc.output_dir.string(), "outputs");
    sc.plot = get_or(o, "plot", sc.plot, "outputs");
    const auto basis = get_or<std::string>(o, "density_basis", "full", "outputs");
    if (basis != "full" && basis != "nonzero")
      throw std::invalid_argument("outputs.density_basis must be \"full\" or \"nonzero\"");
    sc.density_include_zero = basis == "full";
  }
  return sc;
}

Scenario load_scenario(const fs::path& path) {
  return parse_scenario(io::read_json(path), path.parent_path());
}

void apply_overrides(Scenario& sc, const Overrides& o) {
  if (o.seed) sc.detector.seed = *o.seed;
  if (o.bandwidth) {
    if (sc.state) throw std::invalid_argument("--bandwidth only applies to pump-synthesised sources");
    sc.bandwidth = *o.bandwidth;
  }
  if (o.brightness) sc.detector.brightness = *o.brightness;
  if (o.repeats) sc.detector.repeats = *o.repeats;
  if (o.output_dir) sc.output_dir = *o.output_dir;
  if (o.plot) sc.plot = true;
  if (o.noiseless) sc.detector.noiseless = true;
  sc.detector.validate();
}

namespace {

BiphotonState apply_channels(BiphotonState state, const std::vector<ChannelSpec>& channels) {
  for (const auto& ch : channels) {
    switch (ch.kind) {
      case ChannelSpec::Kind::gouy:
        state = apply_gouy(state, ch.arm_a, ch.arm_b);
        break;
      case ChannelSpec::Kind::dove:
        state = apply_dove_pair(state, ch.eta, ch.arm);
        break;
      case ChannelSpec::Kind::pump_phase:
        state = apply_pump_phase(state, ch.ell, ch.delta);
        break;
    }
  }
  return state;
}

BiphotonState source_state(const Scenario& sc) {
  if (sc.pump) return synthesize(*sc.pump, sc.bandwidth);
  if (sc.state) return *sc.state;
  throw std::invalid_argument("scenario has no source");
}

std::uint64_t sweep_seed(std::uint64_t seed, std::size_t index) {
  return index == 0 ? seed : stream_seed(seed, 0x5eed5eedULL, index);
}

std::string fixed(double v, int digits = 6) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(digits) << v;
  return out.str();
}

std::string file_stem(ModePair mode) {
  return "m" + std::to_string(mode.m) + "_n" + std::to_string(mode.n);
}

fs::path ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  return dir;
}

void emit(RunReport& report, const fs::path& path, const std::string& text) {
  io::write_text(path, text);
  report.files.push_back(path);
}

std::string heatmap_svg(const MeasuredSpectrum& spectrum, int bandwidth) {
  const int cells = 2 * bandwidth + 1;
  const int size = 40;
  double peak = 0.0;
  for (const auto& [mode, v] : spectrum.intensity) peak = std::max(peak, v);
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << cells * size << "\" height=\""
      << cells * size << "\">\n";
  for (const auto& [mode, v] : spectrum.intensity) {
    const int col = mode.n + bandwidth;
    const int row = bandwidth - mode.m;
    const int level = peak > 0.0 ? static_cast<int>(std::lround(255.0 * v / peak)) : 0;
    svg << "<rect x=\"" << col * size << "\" y=\"" << row * size << "\" width=\"" << size
        << "\" height=\"" << size << "\" fill=\"rgb(" << level << "," << level << "," << level
        << ")\"><title>|" << mode.m << "," << mode.n << "&gt; " << fixed(v) << "</title></rect>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

TomographyRun tomography(const Scenario& sc, const BiphotonState& truth, const DetectorConfig& det,
                         const fs::path& dir, bool write) {
  TomographyRun run;
  const auto measured = measure_spectrum(mode_grid(truth.bandwidth()), truth, det);
  run.plan = make_plan(sc, measured.intensity);
  run.spectrum = execute_plan(run.plan, truth, det);
  run.assembled = assemble_state(run.spectrum, truth.bandwidth());
  run.fidelity = fidelity(run.assembled, truth);
  if (!write) return run;

  emit(run, dir / "plan.txt", run.plan.describe());
  std::ostringstream csv;
  io::write_spectrum_csv(csv, run.spectrum);
  emit(run, dir / "phased_spectrum.csv", csv.str());
  emit(run, dir / "phased_spectrum.json", io::spectrum_to_json(run.spectrum).dump(2) + "\n");
  emit(run, dir / "state.json", io::state_to_json(run.assembled).dump(2) + "\n");

  std::ostringstream records;
  records << "device,step,samples...,mean,std\n";
  for (std::size_t i = 0; i < run.plan.edges.size(); ++i) {
    const auto& e = run.plan.edges[i];
    io::write_records_csv(records, "edge" + std::to_string(i) + to_string(e.target),
                          acquire_series(e, truth, det));
  }
  emit(run, dir / "records.csv", records.str());

  const auto basis = ordered_basis(truth.bandwidth(), sc.density_include_zero);
  BiphotonState restricted(truth.bandwidth());
  for (const auto& mode : basis) restricted.set(mode, run.assembled.coefficient(mode));
  if (restricted.norm_squared() > 0.0) {
    const auto rho = density_matrix(restricted, basis);
    std::ostringstream re, im;
    io::write_density_csv(re, rho, false);
    io::write_density_csv(im, rho, true);
    emit(run, dir / "density_real.csv", re.str());
    emit(run, dir / "density_imag.csv", im.str());
  }
  nlohmann::json summary = {{"scenario", sc.name},
                            {"seed", det.seed},
                            {"edges", run.plan.edges.size()},
                            {"fidelity_vs_truth", run.fidelity}};
  emit(run, dir / "summary.json", summary.dump(2) + "\n");
  return run;
}

}  // namespace

BiphotonState prepare_state(const Scenario& sc) { return apply_channels(source_state(sc), sc.channels); }

MeasurementPlan make_plan(const Scenario& sc, const IntensitySpectrum& spectrum) {
  return sc.strategy == PlanStrategy::ancillary ? plan_ancillary(spectrum, sc.root, sc.plan_options)
                                                : plan_inductive(spectrum, sc.root, sc.plan_options);
}

SpectrumRun run_spectrum(const Scenario& sc) {
  SpectrumRun run;
  const auto state = prepare_state(sc);
  run.spectrum = measure_spectrum(mode_grid(state.bandwidth()), state, sc.detector);
  const auto dir = ensure_dir(sc.output_dir);
  std::ostringstream csv;
  io::write_intensity_csv(csv, run.spectrum);
  emit(run, dir / "spectrum.csv", csv.str());
  emit(run, dir / "spectrum.json", io::intensity_to_json(run.spectrum).dump(2) + "\n");
  if (sc.plot) emit(run, dir / "spectrum.svg", heatmap_svg(run.spectrum, state.bandwidth()));
  return run;
}

TomographyRun run_phase_tomography(const Scenario& sc, bool fit) {
  const auto dir = ensure_dir(sc.output_dir);
  auto run = tomography(sc, prepare_state(sc), sc.detector, dir, true);
  if (fit) {
    run.fit = fit_gouy_slope(diagonal_phases(run.spectrum));
    emit(run, dir / "fit.json", io::fit_to_json(*run.fit).dump(2) + "\n");
  }
  return run;
}

TomographyRun run_gouy_fit(const Scenario& sc) { return run_phase_tomography(sc, true); }

DoveSweepRun run_dove_sweep(const Scenario& sc) {
  if (sc.sweep_eta.empty()) throw std::invalid_argument("dove-sweep needs sweep.eta_deg");
  DoveSweepRun run;
  const auto base = prepare_state(sc);
  const auto dir = ensure_dir(sc.output_dir);
  std::vector<std::pair<double, PhasedSpectrum>> spectra;
  for (std::size_t i = 0; i < sc.sweep_eta.size(); ++i) {
    DetectorConfig det = sc.detector;
    det.seed = sweep_seed(sc.detector.seed, i);
    const auto state = apply_dove_pair(base, sc.sweep_eta[i], sc.sweep_arm);
    spectra.emplace_back(sc.sweep_eta[i], tomography(sc, state, det, dir, false).spectrum);
  }
  run.points = extract_geometric_phase(spectra);
  std::ostringstream csv;
  csv << "eta_deg,shift_plus,err_plus,shift_minus,err_minus,expected_plus\n";
  csv << std::setprecision(10);
  for (const auto& p : run.points)
    csv << p.eta / kDeg << ',' << p.shift_plus << ',' << p.err_plus << ',' << p.shift_minus << ','
        << p.err_minus << ',' << wrap_signed((sc.sweep_arm == Arm::A ? 2.0 : -2.0) * p.eta) << '\n';
  emit(run, dir / "dove_sweep.csv", csv.str());
  return run;
}

PumpSweepRun run_pump_sweep(const Scenario& sc) {
  if (!sc.pump) throw std::invalid_argument("pump-sweep needs a pump source");
  if (sc.sweep_pump_phases.empty()) throw std::invalid_argument("pump-sweep needs sweep.pump_phases");
  PumpSweepRun run;
  const auto dir = ensure_dir(sc.output_dir);
  const int ell = sc.sweep_pump_ell;
  std::ostringstream csv;
  csv << std::setprecision(10);
  csv << "pump_phase,m,n,intensity,intensity_err,phase,phase_err\n";
  for (std::size_t i = 0; i < sc.sweep_pump_phases.size(); ++i) {
    PumpSpec pump = *sc.pump;
    bool found = false;
    for (auto& c : pump.components)
      if (c.ell == ell) {
        c.weight = std::polar(std::abs(c.weight), sc.sweep_pump_phases[i]);
        found = true;
      }
    if (!found) throw std::invalid_argument("pump-sweep: pump has no ell = " + std::to_string(ell));
    DetectorConfig det = sc.detector;
    det.seed = sweep_seed(sc.detector.seed, i);
    const auto state = apply_channels(synthesize(pump, sc.bandwidth), sc.channels);
    PumpSweepPoint pt;
    pt.pump_phase = sc.sweep_pump_phases[i];
    pt.spectrum = tomography(sc, state, det, dir, false).spectrum;
    cplx main{}, off{};
    double var_main = 0.0, var_off = 0.0;
    int n_main = 0, n_off = 0;
    for (const auto& e : pt.spectrum.entries) {
      const int diag = e.mode.m + e.mode.n;
      if (diag == 0) {
        main += std::polar(1.0, e.phase);
        var_main += e.phase_err * e.phase_err;
        ++n_main;
      } else if (diag == ell) {
        off += std::polar(1.0, e.phase);
        var_off += e.phase_err * e.phase_err;
        ++n_off;
      }
      csv << pt.pump_phase << ',' << e.mode.m << ',' << e.mode.n << ',' << e.intensity << ','
          << e.intensity_err << ',' << e.phase << ',' << e.phase_err << '\n';
    }
    if (n_main == 0 || n_off == 0)
      throw std::invalid_argument("pump-sweep: spectrum lacks the main or the ell diagonal");
    pt.offset = wrap_phase(std::arg(off) - std::arg(main));
    pt.offset_err = std::sqrt(var_main / (n_main * n_main) + var_off / (n_off * n_off));
    run.points.push_back(std::move(pt));
  }
  emit(run, dir / "pump_sweep_modes.csv", csv.str());
  std::ostringstream summary;
  summary << std::setprecision(10) << "pump_phase,offset,offset_err\n";
  for (const auto& p : run.points)
    summary << p.pump_phase << ',' << p.offset << ',' << p.offset_err << '\n';
  emit(run, dir / "pump_sweep.csv", summary.str());
  return run;
}

RunReport run_hologram_export(const Scenario& sc) {
  if (!sc.hologram) throw std::invalid_argument("hologram export needs a hologram section");
  const auto& req = *sc.hologram;
  RunReport run;
  const auto dir = ensure_dir(sc.output_dir);
  auto write = [&](const ArmPattern& arm, const std::string& stem) {
    const auto holo = render_hologram(arm, req.geometry, req.grid, req.fringe_period);
    const auto path = dir / (stem + ".pgm");
    io::write_bytes(path, export_pgm(holo, req.levels));
    run.files.push_back(path);
    if (req.phase_csv) {
      std::ostringstream csv;
      write_phase_csv(csv, holo);
      emit(run, dir / (stem + ".csv"), csv.str());
    }
  };
  // One grating per arm, four for the stepped arm.
  auto write_device = [&](const std::string& prefix, auto device_at, std::optional<Arm> stepped) {
    const DeviceSpec still = device_at(0.0);
    still.validate();
    for (Arm arm : {Arm::A, Arm::B}) {
      const std::string stem = prefix + "_" + arm_name(arm);
      if (stepped && *stepped == arm) {
        for (std::size_t k = 0; k < kPhaseSteps.size(); ++k)
          write(device_at(kPhaseSteps[k]).arm(arm), stem + "_step" + std::to_string(k));
      } else {
        write(still.arm(arm), stem);
      }
    }
  };

  switch (req.kind) {
    case HologramRequest::Kind::bare:
      write_device("bare_" + file_stem(req.mode), [&](double) { return bare_device(req.mode); },
                   std::nullopt);
      break;
    case HologramRequest::Kind::device: {
      const Arm arm = req.device_stepped.value_or(Arm::B);
      auto device_at = [&](double phase) {
        DeviceSpec d = req.device;
        auto& terms = (arm == Arm::A ? d.arm_a : d.arm_b).terms;
        if (!terms.empty()) terms.back().phase += phase;
        return d;
      };
      write_device("device", device_at, req.device_stepped);
      break;
    }
    case HologramRequest::Kind::edge: {
      const auto state = prepare_state(sc);
      const auto measured = measure_spectrum(mode_grid(state.bandwidth()), state, sc.detector);
      const auto plan = make_plan(sc, measured.intensity);
      std::optional<std::size_t> index;
      if (req.edge_index) {
        if (*req.edge_index >= 0 && static_cast<std::size_t>(*req.edge_index) < plan.edges.size())
          index = static_cast<std::size_t>(*req.edge_index);
      } else {
        for (std::size_t i = 0; i < plan.edges.size(); ++i)
          if (plan.edges[i].target == *req.target) index = i;
      }
      if (!index)
        throw std::invalid_argument("hologram: unknown edge " +
                                    (req.edge_index ? std::to_string(*req.edge_index)
                                                    : to_string(*req.target)) +
                                    " in a plan of " + std::to_string(plan.edges.size()) +
                                    " edge(s)");
      const auto& edge = plan.edges[*index];
      write_device("edge" + std::to_string(*index) + "_" + file_stem(edge.target),
                   [&](double phase) { return edge.device(phase); }, edge.stepped_arm);
      break;
    }
  }
  return run;
}

}  // namespace biphase
