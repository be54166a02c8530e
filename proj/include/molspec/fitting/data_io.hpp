#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "molspec/observables/trace.hpp"

namespace molspec::fitting {

/// Spectrum on an ascending detuning axis (meV from the ZPL). Wavelength input is converted with
/// δ = hc(1/λ − 1/λ_ZPL); longer wavelengths map to negative detuning.
struct SpectrumData {
    std::vector<double> detuning_meV;
    std::vector<double> intensity;
    bool peak_normalized = false;
    std::optional<double> temperature_K;

    static constexpr std::size_t kMinPoints = 50;

    /// Throws DataError unless ≥ kMinPoints, intensities ≥ 0 and the axis is strictly ascending.
    void validate() const;
    double peak() const;
    void normalize_to_peak();
};

enum class SpectrumAxis { from_header, wavelength_nm, detuning_meV };

/// Reads comma-separated columns after optional `#` comment lines and an optional header row.
/// The axis column is the first; intensity is the `s_total` or `intensity` column if named, else the second.
/// With SpectrumAxis::from_header the first header name must start with `wavelength` or `detuning`.
/// A comment `# temperature_K = X` sets the temperature.
SpectrumData read_spectrum_csv(std::istream& in, SpectrumAxis axis = SpectrumAxis::from_header, double zpl_wavelength_nm = 782.32);
SpectrumData load_spectrum_csv(const std::filesystem::path& path, SpectrumAxis axis = SpectrumAxis::from_header,
                               double zpl_wavelength_nm = 782.32);

struct LineScanPoint {
    double power = 0.0;
    double linewidth_MHz = 0.0;
    double uncertainty_MHz = 0.0;
};

/// Resonant-scan linewidths versus excitation power (arbitrary power units).
struct LineScanSeries {
    std::vector<LineScanPoint> points;

    static constexpr std::size_t kMinLevels = 3;
    void validate() const;
};

/// Columns: power, linewidth_MHz, uncertainty_MHz.
LineScanSeries read_linescan_csv(std::istream& in);
LineScanSeries load_linescan_csv(const std::filesystem::path& path);

/// Columns: tau_ns, g2 (further columns ignored). The delay axis must be uniform.
observables::CorrelationTrace read_trace_csv(std::istream& in);
observables::CorrelationTrace load_trace_csv(const std::filesystem::path& path);

/// Shortest round-trip decimal form at 17 significant digits.
std::string format_double(double x);

/// Writes `# <comment>` lines, a header row and the columns, all with format_double.
void write_csv(std::ostream& out, std::span<const std::string> comments, std::span<const std::string> header,
               std::span<const std::vector<double>> columns);

}  // namespace molspec::fitting
