#include "pw/output.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pw/errors.hpp"

namespace pw {

std::string CsvWriter::format(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void CsvWriter::add_row(const std::vector<double>& row) {
    if (row.size() != columns_.size()) throw ShapeError("csv row width mismatch");
    std::vector<std::string> cells;
    cells.reserve(row.size());
    for (double v : row) cells.push_back(format(v));
    rows_.push_back(std::move(cells));
}

void CsvWriter::add_row_text(const std::vector<std::string>& row) {
    if (row.size() != columns_.size()) throw ShapeError("csv row width mismatch");
    rows_.push_back(row);
}

std::string CsvWriter::str() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < columns_.size(); ++i)
        out << (i ? "," : "") << columns_[i];
    out << '\n';
    for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << '\n';
    }
    return out.str();
}

void CsvWriter::write(const std::string& path) const { write_text_file(path, str()); }

Manifest::Manifest(const std::string& command, const std::string& scenario_echo_json)
    : command_(command), scenario_json_(scenario_echo_json) {}

void Manifest::set(const std::string& key, double value) {
    entries_.emplace_back(key, CsvWriter::format(value));
}

void Manifest::set(const std::string& key, const std::string& value) {
    entries_.emplace_back(key, nlohmann::json(value).dump());
}

void Manifest::set(const std::string& key, bool value) {
    entries_.emplace_back(key, value ? "true" : "false");
}

void Manifest::set_int(const std::string& key, long long value) {
    entries_.emplace_back(key, std::to_string(value));
}

void Manifest::set_seed(unsigned long long seed) {
    entries_.emplace_back("seed", std::to_string(seed));
}

void Manifest::add_artifact(const std::string& path) { artifacts_.push_back(path); }

std::string Manifest::str() const {
    // Assembled by hand to keep key order stable (scenario first, timestamp last).
    std::ostringstream out;
    out << "{\n";
    out << "  \"command\": " << nlohmann::json(command_).dump() << ",\n";
    out << "  \"versions\": {\"pilotwave\": \"0.1.0\", \"format\": 1},\n";
    out << "  \"lattice_delta_convention\": \"delta_ij / dx^d\",\n";
    std::ostringstream scen;
    {
        // reindent the scenario echo
        std::istringstream in(scenario_json_);
        std::string line;
        bool first = true;
        while (std::getline(in, line)) {
            if (!first) scen << "\n  ";
            scen << line;
            first = false;
        }
    }
    out << "  \"scenario\": " << scen.str() << ",\n";
    for (const auto& [k, v] : entries_)
        out << "  " << nlohmann::json(k).dump() << ": " << v << ",\n";
    out << "  \"artifacts\": [";
    for (std::size_t i = 0; i < artifacts_.size(); ++i)
        out << (i ? ", " : "") << nlohmann::json(artifacts_[i]).dump();
    out << "],\n";
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char ts[32];
    std::strftime(ts, sizeof ts, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    out << "  \"timestamp\": \"" << ts << "\"\n";
    out << "}\n";
    return out.str();
}

void Manifest::write(const std::string& path) const { write_text_file(path, str()); }

SvgPlot::SvgPlot(int width, int height) : w_(width), h_(height) {}

void SvgPlot::add_line(const std::vector<double>& x, const std::vector<double>& y,
                       const std::string& color, const std::string& label) {
    if (x.size() != y.size()) throw ShapeError("svg series length mismatch");
    series_.push_back({x, y, color, label});
}

void SvgPlot::set_heatmap(const std::vector<std::vector<double>>& rows) { heatmap_ = rows; }

std::string SvgPlot::str() const {
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w_ << "\" height=\"" << h_
        << "\" viewBox=\"0 0 " << w_ << " " << h_ << "\">\n";
    out << "<rect width=\"" << w_ << "\" height=\"" << h_ << "\" fill=\"white\"/>\n";

    const double margin = 40.0;
    if (!heatmap_.empty()) {
        double lo = heatmap_[0][0], hi = lo;
        for (const auto& row : heatmap_)
            for (double v : row) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        double span = hi > lo ? hi - lo : 1.0;
        double cw = (w_ - 2 * margin) / heatmap_[0].size();
        double ch = (h_ - 2 * margin) / heatmap_.size();
        for (std::size_t r = 0; r < heatmap_.size(); ++r)
            for (std::size_t c = 0; c < heatmap_[r].size(); ++c) {
                int shade = 255 - static_cast<int>(255.0 * (heatmap_[r][c] - lo) / span);
                out << "<rect x=\"" << margin + c * cw << "\" y=\"" << margin + r * ch
                    << "\" width=\"" << cw + 0.5 << "\" height=\"" << ch + 0.5 << "\" fill=\"rgb("
                    << shade << "," << shade << "," << shade << ")\"/>\n";
            }
    }

    if (!series_.empty()) {
        double xlo = series_[0].x.empty() ? 0.0 : series_[0].x[0];
        double xhi = xlo, ylo = series_[0].y.empty() ? 0.0 : series_[0].y[0], yhi = ylo;
        for (const auto& s : series_) {
            for (double v : s.x) {
                xlo = std::min(xlo, v);
                xhi = std::max(xhi, v);
            }
            for (double v : s.y) {
                ylo = std::min(ylo, v);
                yhi = std::max(yhi, v);
            }
        }
        double xs = xhi > xlo ? xhi - xlo : 1.0, ys = yhi > ylo ? yhi - ylo : 1.0;
        auto px = [&](double x) { return margin + (x - xlo) / xs * (w_ - 2 * margin); };
        auto py = [&](double y) { return h_ - margin - (y - ylo) / ys * (h_ - 2 * margin); };
        out << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << w_ - 2 * margin
            << "\" height=\"" << h_ - 2 * margin
            << "\" fill=\"none\" stroke=\"#888\" stroke-width=\"1\"/>\n";
        int li = 0;
        for (const auto& s : series_) {
            out << "<polyline fill=\"none\" stroke=\"" << s.color
                << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i)
                out << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
            out << "\"/>\n";
            if (!s.label.empty()) {
                out << "<text x=\"" << margin + 6 << "\" y=\"" << margin + 16 + 16 * li
                    << "\" fill=\"" << s.color << "\" font-size=\"13\" font-family=\"monospace\">"
                    << s.label << "</text>\n";
                ++li;
            }
        }
    }
    out << "</svg>\n";
    return out.str();
}

void SvgPlot::write(const std::string& path) const { write_text_file(path, str()); }

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write file: " + path);
    out << content;
}

}  // namespace pw
