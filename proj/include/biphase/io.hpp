#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "biphase/reconstruct.hpp"

namespace biphase::io {

using nlohmann::json;

// {"bandwidth": M, "coefficients": [{"m", "n", "re", "im"}, ...]}
json state_to_json(const BiphotonState& state);
BiphotonState state_from_json(const json& j);

json spectrum_to_json(const PhasedSpectrum& spectrum);
void write_spectrum_csv(std::ostream& out, const PhasedSpectrum& spectrum);

// Reference tables: {"name", "root": [m, n], "rows": [{"m", "n", "intensity",
// "intensity_err", "phase", "phase_err"}]}. Rows are returned as written,
// without renormalisation.
PhasedSpectrum fixture_from_json(const json& j);
PhasedSpectrum load_fixture(const std::filesystem::path& path);

void write_intensity_csv(std::ostream& out, const MeasuredSpectrum& spectrum);
json intensity_to_json(const MeasuredSpectrum& spectrum);

// Real and imaginary parts as two square CSV grids in basis order; the
// first row and column carry the mode labels.
void write_density_csv(std::ostream& out, const DensityMatrix& rho, bool imaginary);

json fit_to_json(const FitResult& fit);

// device id, step, samples..., mean, std
void write_records_csv(std::ostream& out, const std::string& device_id,
                       const PhaseStepSeries& series);

json read_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);
void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

}  // namespace biphase::io
