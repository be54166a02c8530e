#include "molspec/fitting/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "molspec/core/errors.hpp"
#include "molspec/core/units.hpp"

namespace molspec::fitting {

namespace {

std::string_view trim(std::string_view s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string_view::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::optional<double> parse_number(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    std::vector<std::size_t> row_lines;
    std::vector<std::string> comments;

    std::optional<std::size_t> column(std::string_view name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        return std::nullopt;
    }
};

Table read_table(std::istream& in, std::size_t min_columns) {
    Table t;
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto s = trim(line);
        if (s.empty()) continue;
        if (s.front() == '#') {
            t.comments.emplace_back(trim(s.substr(1)));
            continue;
        }
        const auto fields = split(s);
        if (t.rows.empty() && t.header.empty() && !parse_number(fields.front())) {
            for (auto f : fields) t.header.emplace_back(f);
            width = fields.size();
            if (width < min_columns) throw DataError(line_no, "header has " + std::to_string(width) + " columns, need at least " + std::to_string(min_columns));
            continue;
        }
        if (width == 0) width = fields.size();
        if (fields.size() != width) throw DataError(line_no, "expected " + std::to_string(width) + " columns, found " + std::to_string(fields.size()));
        if (width < min_columns) throw DataError(line_no, "need at least " + std::to_string(min_columns) + " columns");
        std::vector<double> row;
        for (std::size_t c = 0; c < fields.size(); ++c) {
            const auto v = parse_number(fields[c]);
            if (!v || !std::isfinite(*v)) throw DataError(line_no, "column " + std::to_string(c + 1) + " is not a finite number: '" + std::string(fields[c]) + "'");
            row.push_back(*v);
        }
        t.rows.push_back(std::move(row));
        t.row_lines.push_back(line_no);
    }
    return t;
}

std::ifstream open(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError(0, "cannot open data file " + path.string());
    return in;
}

bool starts_with(const std::string& s, std::string_view prefix) { return s.rfind(prefix, 0) == 0; }

}  // namespace

void SpectrumData::validate() const {
    if (detuning_meV.size() != intensity.size()) throw DataError(0, "spectrum axis and intensity lengths differ");
    if (detuning_meV.size() < kMinPoints)
        throw DataError(0, "spectrum has " + std::to_string(detuning_meV.size()) + " points, need at least " + std::to_string(kMinPoints));
    for (std::size_t k = 0; k < intensity.size(); ++k) {
        if (intensity[k] < 0.0) throw DataError(0, "negative intensity at point " + std::to_string(k + 1));
        if (k > 0 && !(detuning_meV[k] > detuning_meV[k - 1])) throw DataError(0, "detuning axis is not strictly monotone at point " + std::to_string(k + 1));
    }
}

double SpectrumData::peak() const { return intensity.empty() ? 0.0 : *std::max_element(intensity.begin(), intensity.end()); }

void SpectrumData::normalize_to_peak() {
    const double p = peak();
    if (!(p > 0.0)) throw DataError(0, "spectrum has no positive intensity to normalize");
    for (double& v : intensity) v /= p;
    peak_normalized = true;
}

SpectrumData read_spectrum_csv(std::istream& in, SpectrumAxis axis, double zpl_wavelength_nm) {
    const Table t = read_table(in, 2);
    if (axis == SpectrumAxis::from_header) {
        if (t.header.empty()) throw DataError(0, "spectrum file has no header naming the axis; pass the axis unit explicitly");
        if (starts_with(t.header.front(), "wavelength")) {
            axis = SpectrumAxis::wavelength_nm;
        } else if (starts_with(t.header.front(), "detuning")) {
            axis = SpectrumAxis::detuning_meV;
        } else {
            throw DataError(0, "first header column '" + t.header.front() + "' names neither wavelength nor detuning");
        }
    }
    std::size_t col = 1;
    if (auto c = t.column("s_total")) col = *c;
    else if (auto i = t.column("intensity")) col = *i;

    std::vector<std::pair<double, double>> pts;
    double direction = 0.0;
    for (std::size_t k = 0; k < t.rows.size(); ++k) {
        const double x = t.rows[k][0], y = t.rows[k][col];
        if (y < 0.0) throw DataError(t.row_lines[k], "negative intensity");
        if (axis == SpectrumAxis::wavelength_nm && !(x > 0.0)) throw DataError(t.row_lines[k], "wavelength must be positive");
        if (k > 0) {
            const double d = x - t.rows[k - 1][0];
            if (k == 1) direction = d;
            if (!(d * direction > 0.0)) throw DataError(t.row_lines[k], "axis is not strictly monotone");
        }
        pts.emplace_back(axis == SpectrumAxis::wavelength_nm ? units::wavelength_to_detuning(x, zpl_wavelength_nm) : x, y);
    }
    if (pts.size() >= 2 && pts.front().first > pts.back().first) std::reverse(pts.begin(), pts.end());

    SpectrumData d;
    for (const auto& [x, y] : pts) {
        d.detuning_meV.push_back(x);
        d.intensity.push_back(y);
    }
    for (const auto& c : t.comments) {
        const auto eq = c.find('=');
        if (eq != std::string::npos && trim(std::string_view(c).substr(0, eq)) == "temperature_K") {
            const auto v = parse_number(std::string_view(c).substr(eq + 1));
            if (!v) throw DataError(0, "temperature_K comment is not a number");
            d.temperature_K = *v;
        }
    }
    d.validate();
    return d;
}

SpectrumData load_spectrum_csv(const std::filesystem::path& path, SpectrumAxis axis, double zpl_wavelength_nm) {
    auto in = open(path);
    return read_spectrum_csv(in, axis, zpl_wavelength_nm);
}

void LineScanSeries::validate() const {
    if (points.size() < kMinLevels)
        throw DataError(0, "line scan has " + std::to_string(points.size()) + " power levels, need at least " + std::to_string(kMinLevels));
    for (std::size_t k = 0; k < points.size(); ++k) {
        if (!(points[k].linewidth_MHz > 0.0)) throw DataError(0, "linewidth must be positive at level " + std::to_string(k + 1));
        if (!(points[k].uncertainty_MHz > 0.0)) throw DataError(0, "uncertainty must be positive at level " + std::to_string(k + 1));
        if (points[k].power < 0.0) throw DataError(0, "power must be non-negative at level " + std::to_string(k + 1));
    }
}

LineScanSeries read_linescan_csv(std::istream& in) {
    const Table t = read_table(in, 3);
    LineScanSeries s;
    for (std::size_t k = 0; k < t.rows.size(); ++k) {
        const auto& r = t.rows[k];
        if (!(r[1] > 0.0) || !(r[2] > 0.0)) throw DataError(t.row_lines[k], "linewidth and uncertainty must be positive");
        s.points.push_back({r[0], r[1], r[2]});
    }
    s.validate();
    return s;
}

LineScanSeries load_linescan_csv(const std::filesystem::path& path) {
    auto in = open(path);
    return read_linescan_csv(in);
}

observables::CorrelationTrace read_trace_csv(std::istream& in) {
    const Table t = read_table(in, 2);
    std::vector<double> tau, g;
    for (const auto& r : t.rows) {
        tau.push_back(r[0]);
        g.push_back(r[1]);
    }
    if (tau.size() < 3) throw DataError(0, "correlation trace needs at least 3 rows");
    if (!UniformGrid::is_uniform(tau, 1e-9)) throw DataError(0, "correlation trace delay axis is not uniform");
    const double step = (tau.back() - tau.front()) / static_cast<double>(tau.size() - 1);
    return {UniformGrid{tau.front(), step, tau.size()}, std::move(g), true};
}

observables::CorrelationTrace load_trace_csv(const std::filesystem::path& path) {
    auto in = open(path);
    return read_trace_csv(in);
}

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_csv(std::ostream& out, std::span<const std::string> comments, std::span<const std::string> header,
               std::span<const std::vector<double>> columns) {
    if (header.size() != columns.size()) throw InvalidArgument("CSV header and column counts differ");
    const std::size_t rows = columns.empty() ? 0 : columns.front().size();
    for (const auto& c : columns)
        if (c.size() != rows) throw InvalidArgument("CSV columns have different lengths");
    for (const auto& c : comments) out << "# " << c << '\n';
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << '\n';
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << format_double(columns[i][r]);
        out << '\n';
    }
}

}  // namespace molspec::fitting
