#pragma once

#include <map>
#include <string>
#include <vector>

namespace pw {

// CSV with a fixed column order and 17-significant-digit floats, so identical
// runs produce byte-identical files.
class CsvWriter {
  public:
    explicit CsvWriter(std::vector<std::string> columns);

    void add_row(const std::vector<double>& row);
    // Mixed rows (e.g. event labels); numeric cells still use %.17g.
    void add_row_text(const std::vector<std::string>& row);

    std::string str() const;
    void write(const std::string& path) const;

    static std::string format(double v);

  private:
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

// Run manifest: effective configuration, invariant summaries, seeds, outcome.
// The timestamp is the only field allowed to differ between identical runs.
class Manifest {
  public:
    Manifest(const std::string& command, const std::string& scenario_echo_json);

    void set(const std::string& key, double value);
    void set(const std::string& key, const std::string& value);
    void set(const std::string& key, bool value);
    void set_int(const std::string& key, long long value);
    void set_seed(unsigned long long seed);
    void add_artifact(const std::string& path);

    std::string str() const;
    void write(const std::string& path) const;

  private:
    std::string command_;
    std::string scenario_json_;
    std::vector<std::pair<std::string, std::string>> entries_;  // key -> raw JSON value
    std::vector<std::string> artifacts_;
};

// Minimal SVG plots written directly: polylines over an auto-scaled frame and
// grayscale heatmaps. Enough to eyeball a density or a trajectory.
class SvgPlot {
  public:
    SvgPlot(int width = 720, int height = 480);

    void add_line(const std::vector<double>& x, const std::vector<double>& y,
                  const std::string& color, const std::string& label = "");
    void set_heatmap(const std::vector<std::vector<double>>& rows);

    std::string str() const;
    void write(const std::string& path) const;

  private:
    struct Series {
        std::vector<double> x, y;
        std::string color, label;
    };
    int w_, h_;
    std::vector<Series> series_;
    std::vector<std::vector<double>> heatmap_;
};

void write_text_file(const std::string& path, const std::string& content);

}  // namespace pw
