#include "biphase/io.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "biphase/error.hpp"

namespace biphase::io {

namespace {

std::string num(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

}  // namespace

json state_to_json(const BiphotonState& state) {
  json coeffs = json::array();
  for (const auto& [mode, value] : state.coefficients())
    coeffs.push_back({{"m", mode.m}, {"n", mode.n}, {"re", value.real()}, {"im", value.imag()}});
  return {{"bandwidth", state.bandwidth()}, {"coefficients", coeffs}};
}

BiphotonState state_from_json(const json& j) {
  BiphotonState state(j.at("bandwidth").get<int>());
  for (const auto& c : j.at("coefficients"))
    state.set({c.at("m").get<int>(), c.at("n").get<int>()},
              {c.at("re").get<double>(), c.at("im").get<double>()});
  return state;
}

json spectrum_to_json(const PhasedSpectrum& spectrum) {
  json rows = json::array();
  for (const auto& e : spectrum.entries)
    rows.push_back({{"m", e.mode.m},
                    {"n", e.mode.n},
                    {"intensity", e.intensity},
                    {"intensity_err", e.intensity_err},
                    {"phase", e.phase},
                    {"phase_err", e.phase_err}});
  return {{"root", {spectrum.root.m, spectrum.root.n}}, {"rows", rows}};
}

void write_spectrum_csv(std::ostream& out, const PhasedSpectrum& spectrum) {
  out << "m,n,intensity,phase,phase_err\n";
  for (const auto& e : spectrum.entries)
    out << e.mode.m << ',' << e.mode.n << ',' << num(e.intensity) << ',' << num(e.phase) << ','
        << num(e.phase_err) << '\n';
}

PhasedSpectrum fixture_from_json(const json& j) {
  PhasedSpectrum table;
  const auto& root = j.at("root");
  table.root = {root.at(0).get<int>(), root.at(1).get<int>()};
  for (const auto& r : j.at("rows")) {
    SpectrumEntry e;
    e.mode = {r.at("m").get<int>(), r.at("n").get<int>()};
    e.intensity = r.at("intensity").get<double>();
    e.intensity_err = r.value("intensity_err", 0.0);
    e.phase = r.value("phase", 0.0);
    e.phase_err = r.value("phase_err", 0.0);
    table.entries.push_back(e);
  }
  std::sort(table.entries.begin(), table.entries.end(),
            [](const SpectrumEntry& a, const SpectrumEntry& b) { return a.mode < b.mode; });
  return table;
}

PhasedSpectrum load_fixture(const std::filesystem::path& path) {
  return fixture_from_json(read_json(path));
}

void write_intensity_csv(std::ostream& out, const MeasuredSpectrum& spectrum) {
  out << "m,n,intensity,intensity_err\n";
  for (const auto& [mode, value] : spectrum.intensity)
    out << mode.m << ',' << mode.n << ',' << num(value) << ',' << num(spectrum.error.at(mode))
        << '\n';
}

json intensity_to_json(const MeasuredSpectrum& spectrum) {
  json rows = json::array();
  for (const auto& [mode, value] : spectrum.intensity)
    rows.push_back({{"m", mode.m},
                    {"n", mode.n},
                    {"intensity", value},
                    {"intensity_err", spectrum.error.at(mode)}});
  return {{"rows", rows}};
}

void write_density_csv(std::ostream& out, const DensityMatrix& rho, bool imaginary) {
  out << (imaginary ? "imag" : "real");
  for (const auto& mode : rho.basis) out << ",\"" << to_string(mode) << '"';
  out << '\n';
  for (int i = 0; i < rho.dim(); ++i) {
    out << '"' << to_string(rho.basis[i]) << '"';
    for (int k = 0; k < rho.dim(); ++k) {
      const cplx v = rho.rho(i, k);
      out << ',' << num(imaginary ? v.imag() : v.real());
    }
    out << '\n';
  }
}

json fit_to_json(const FitResult& fit) {
  json unwrapped = json::array();
  for (const auto& [order, phase] : fit.unwrapped)
    unwrapped.push_back({{"abs_m", order}, {"phase", phase}});
  return {{"slope", fit.slope},
          {"intercept", fit.intercept},
          {"residual", fit.residual},
          {"points", unwrapped}};
}

void write_records_csv(std::ostream& out, const std::string& device_id,
                       const PhaseStepSeries& series) {
  for (std::size_t k = 0; k < series.records.size(); ++k) {
    const auto& rec = series.records[k];
    out << device_id << ',' << k;
    for (double s : rec.samples) out << ',' << num(s);
    out << ',' << num(rec.mean) << ',' << num(rec.stddev) << '\n';
  }
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace biphase::io
