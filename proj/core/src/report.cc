// Copyright 2026 The Layerwise Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "layerwise/report.h"

#include <algorithm>
#include <cstdio>
#include <string_view>

#include <nlohmann/json.hpp>

namespace layerwise {
namespace {

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) {
    return std::string(text);
  }
  std::string quoted = "\"";
  for (char c : text) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

std::string xml_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string optional_cell(const std::optional<double>& v) {
  return v ? format_fixed6(*v) : std::string();
}

// Fixed palette; series beyond its length reuse colors.
constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                   "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::string format_fixed6(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  std::string text = buf;
  if (text == "-0.000000") text = "0.000000";
  return text;
}

std::string distances_csv(const DistanceTable& table) {
  std::string out = "system_id,layer,w2\n";
  for (std::size_t s = 0; s < table.system_ids.size(); ++s) {
    for (std::size_t l = 0; l < table.n_layers; ++l) {
      out += csv_field(table.system_ids[s]) + "," + std::to_string(l) + "," +
             format_fixed6(table.at(s, l)) + "\n";
    }
  }
  return out;
}

std::string correlations_csv(std::span<const CorrelationCurve> curves) {
  std::string out = "dimension,method,layer,negated_correlation\n";
  for (const CorrelationCurve& c : curves) {
    const std::string prefix =
        csv_field(c.dimension) + "," + std::string(method_name(c.method)) + ",";
    for (std::size_t l = 0; l < c.values.size(); ++l) {
      out += prefix + std::to_string(l) + "," + optional_cell(c.values[l]) + "\n";
    }
  }
  return out;
}

std::string best_layers_json(const std::map<std::string, BestLayerReport>& best) {
  if (best.empty()) return "{}\n";
  std::string out = "{\n";
  std::size_t i = 0;
  for (const auto& [dimension, report] : best) {
    out += "  " + nlohmann::json(dimension).dump() + ": {\"value\": " +
           format_fixed6(report.best_value) + ", \"groups\": " +
           nlohmann::json(report.groups()).dump() + "}";
    out += ++i < best.size() ? ",\n" : "\n";
  }
  out += "}\n";
  return out;
}

std::string refstudy_csv(const ReferenceStudyResult& result) {
  std::string out = "reference_label,layer,negated_correlation\n";
  for (std::size_t r = 0; r < result.curves.size(); ++r) {
    const std::string label = csv_field(result.labels[r]);
    const auto& values = result.curves[r].values;
    for (std::size_t l = 0; l < values.size(); ++l) {
      out += label + "," + std::to_string(l) + "," + optional_cell(values[l]) +
             "\n";
    }
  }
  return out;
}

std::string curves_svg(std::span<const std::string> labels,
                       std::span<const CorrelationCurve> curves,
                       const std::string& title) {
  constexpr double kWidth = 640, kHeight = 400;
  constexpr double kLeft = 60, kRight = 150, kTop = 40, kBottom = 50;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  std::size_t n_layers = 1;
  for (const auto& c : curves) n_layers = std::max(n_layers, c.values.size());
  const double x_span = n_layers > 1 ? static_cast<double>(n_layers - 1) : 1.0;
  auto px = [&](std::size_t layer) { return kLeft + plot_w * layer / x_span; };
  auto py = [&](double v) { return kTop + plot_h * (1.0 - v) / 2.0; };

  std::string svg =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt2(kWidth) +
      "\" height=\"" + fmt2(kHeight) + "\" font-family=\"sans-serif\" "
      "font-size=\"12\">\n";
  svg += "<text x=\"" + fmt2(kWidth / 2) + "\" y=\"20\" text-anchor=\"middle\">" +
         xml_escape(title) + "</text>\n";
  // Axes, zero line and ticks.
  svg += "<rect x=\"" + fmt2(kLeft) + "\" y=\"" + fmt2(kTop) + "\" width=\"" +
         fmt2(plot_w) + "\" height=\"" + fmt2(plot_h) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + fmt2(kLeft) + "\" y1=\"" + fmt2(py(0)) + "\" x2=\"" +
         fmt2(kLeft + plot_w) + "\" y2=\"" + fmt2(py(0)) +
         "\" stroke=\"#bbbbbb\" stroke-dasharray=\"4 3\"/>\n";
  for (double v : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
    svg += "<text x=\"" + fmt2(kLeft - 6) + "\" y=\"" + fmt2(py(v) + 4) +
           "\" text-anchor=\"end\">" + fmt2(v) + "</text>\n";
  }
  const std::size_t step = std::max<std::size_t>(1, (n_layers + 9) / 10);
  for (std::size_t l = 0; l < n_layers; l += step) {
    svg += "<text x=\"" + fmt2(px(l)) + "\" y=\"" + fmt2(kTop + plot_h + 16) +
           "\" text-anchor=\"middle\">" + std::to_string(l) + "</text>\n";
  }
  svg += "<text x=\"" + fmt2(kLeft + plot_w / 2) + "\" y=\"" +
         fmt2(kHeight - 12) + "\" text-anchor=\"middle\">layer</text>\n";
  svg += "<text transform=\"translate(16 " + fmt2(kTop + plot_h / 2) +
         ") rotate(-90)\" text-anchor=\"middle\">negated correlation</text>\n";

  for (std::size_t i = 0; i < curves.size(); ++i) {
    const std::string color = kColors[i % std::size(kColors)];
    const auto& values = curves[i].values;
    std::string points;
    auto flush = [&] {
      if (points.empty()) return;
      svg += "<polyline fill=\"none\" stroke=\"" + color +
             "\" stroke-width=\"2\" points=\"" + points + "\"/>\n";
      points.clear();
    };
    for (std::size_t l = 0; l < values.size(); ++l) {
      if (!values[l]) {
        flush();
        continue;
      }
      if (!points.empty()) points += ' ';
      points += fmt2(px(l)) + "," + fmt2(py(std::clamp(*values[l], -1.0, 1.0)));
    }
    flush();
    const double ly = kTop + 10 + 18.0 * i;
    const std::string label = i < labels.size() ? labels[i] : curves[i].dimension;
    svg += "<line x1=\"" + fmt2(kLeft + plot_w + 12) + "\" y1=\"" + fmt2(ly) +
           "\" x2=\"" + fmt2(kLeft + plot_w + 32) + "\" y2=\"" + fmt2(ly) +
           "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + fmt2(kLeft + plot_w + 38) + "\" y=\"" + fmt2(ly + 4) +
           "\">" + xml_escape(label) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace layerwise
