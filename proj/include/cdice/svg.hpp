#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace cdice::svg {

struct Line {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Shaded region between two curves on a shared x axis.
struct Band {
  std::string label;
  std::vector<double> x;
  std::vector<double> lower;
  std::vector<double> upper;
};

struct ChartStyle {
  std::string title;
  std::string x_label;
  std::string y_label;
  int width = 760;
  int height = 460;
};

/// One `<polyline>` per line and one `<polygon>` per band. Output depends
/// only on the inputs. Throws ValidationError when there is nothing to draw
/// or a series is malformed.
std::string render_chart(const std::vector<Line>& lines, const std::vector<Band>& bands,
                         const ChartStyle& style);

void save_chart(const std::filesystem::path& path, const std::vector<Line>& lines,
                const std::vector<Band>& bands, const ChartStyle& style);

}  // namespace cdice::svg
