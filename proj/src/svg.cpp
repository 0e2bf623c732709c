// Copyright 2026 The mtlo2 Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mtlo2/svg.hpp"

#include <algorithm>
#include <fstream>

#include "mtlo2/errors.hpp"

namespace mtlo2::svg {
namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 60.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

struct Frame {
  double x0, x1, y0, y1;
  double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
  double py(double y) const {
    return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom);
  }
};

std::ofstream open(const std::filesystem::path& path, const std::string& title) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\">" << title << "</text>\n";
  return out;
}

void axes(std::ofstream& out, const Frame& f, const std::string& y_label) {
  out << "<line x1=\"" << kLeft << "\" y1=\"" << f.py(f.y0) << "\" x2=\"" << kWidth - kRight
      << "\" y2=\"" << f.py(f.y0) << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
      << f.py(f.y0) << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double v = f.y0 + (f.y1 - f.y0) * k / 4.0;
    out << "<text x=\"" << kLeft - 5 << "\" y=\"" << f.py(v) + 4 << "\" text-anchor=\"end\">"
        << v << "</text>\n";
  }
  out << "<text x=\"15\" y=\"" << kHeight / 2 << "\" transform=\"rotate(-90 15 " << kHeight / 2
      << ")\" text-anchor=\"middle\">" << y_label << "</text>\n";
}

}  // namespace

void write_boxplot(const std::vector<metrics::BinStats>& bins, const std::string& title,
                   const std::string& y_label, const std::filesystem::path& path) {
  double ymax = 0.0;
  for (const auto& b : bins) {
    if (b.stats) ymax = std::max(ymax, b.stats->max);
  }
  if (ymax <= 0.0) ymax = 1.0;
  const Frame f{0.0, static_cast<double>(std::max<std::size_t>(bins.size(), 1)), 0.0, ymax};
  auto out = open(path, title);
  axes(out, f, y_label);
  for (std::size_t i = 0; i < bins.size(); ++i) {
    const double cx = f.px(i + 0.5);
    const double half = 0.3 * (f.px(1.0) - f.px(0.0));
    out << "<text x=\"" << cx << "\" y=\"" << kHeight - kBottom + 18
        << "\" text-anchor=\"middle\" font-size=\"10\">" << bins[i].label << "</text>\n";
    if (!bins[i].stats) continue;
    const auto& s = *bins[i].stats;
    out << "<line x1=\"" << cx << "\" y1=\"" << f.py(s.min) << "\" x2=\"" << cx << "\" y2=\""
        << f.py(s.max) << "\" stroke=\"black\"/>\n"
        << "<rect x=\"" << cx - half << "\" y=\"" << f.py(s.q3) << "\" width=\"" << 2 * half
        << "\" height=\"" << f.py(s.q1) - f.py(s.q3)
        << "\" fill=\"#9ecae1\" stroke=\"black\"/>\n"
        << "<line x1=\"" << cx - half << "\" y1=\"" << f.py(s.median) << "\" x2=\"" << cx + half
        << "\" y2=\"" << f.py(s.median) << "\" stroke=\"red\" stroke-width=\"2\"/>\n";
  }
  out << "</svg>\n";
}

void write_kde(const metrics::KdeCurve& curve, const std::string& title, const std::string& x_label,
               const std::filesystem::path& path) {
  if (curve.x.size() < 2) throw DomainError("KDE curve needs at least two points");
  const double ymax = std::max(*std::max_element(curve.density.begin(), curve.density.end()), 1e-12);
  const Frame f{curve.x.front(), curve.x.back(), 0.0, ymax};
  auto out = open(path, title);
  axes(out, f, "density");
  out << "<polyline fill=\"none\" stroke=\"#3182bd\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < curve.x.size(); ++i) {
    out << f.px(curve.x[i]) << ',' << f.py(curve.density[i]) << ' ';
  }
  out << "\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double v = f.x0 + (f.x1 - f.x0) * k / 4.0;
    out << "<text x=\"" << f.px(v) << "\" y=\"" << kHeight - kBottom + 18
        << "\" text-anchor=\"middle\">" << v << "</text>\n";
  }
  out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 10 << "\" text-anchor=\"middle\">"
      << x_label << "</text>\n</svg>\n";
}

}  // namespace mtlo2::svg
