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

#ifndef LAYERWISE_REPORT_H_
#define LAYERWISE_REPORT_H_

// Text renderings of sweep results. Every number is printed with six
// decimals ("%.6f"); negative zero prints as 0.000000. Output depends only
// on the arguments, so identical results give identical bytes.

#include <map>
#include <span>
#include <string>

#include "layerwise/sweep.h"

namespace layerwise {

std::string format_fixed6(double value);

// system_id,layer,w2
std::string distances_csv(const DistanceTable& table);

// dimension,method,layer,negated_correlation (empty cell where absent)
std::string correlations_csv(std::span<const CorrelationCurve> curves);

// {"<dimension>": {"value": v, "groups": "a-b,c"}, ...} in key order.
std::string best_layers_json(const std::map<std::string, BestLayerReport>& best);

// reference_label,layer,negated_correlation
std::string refstudy_csv(const ReferenceStudyResult& result);

// Line chart, one polyline per series; x is the layer index, y the negated
// correlation on a fixed [-1, 1] axis. Absent values break the line.
std::string curves_svg(std::span<const std::string> labels,
                       std::span<const CorrelationCurve> curves,
                       const std::string& title);

}  // namespace layerwise

#endif  // LAYERWISE_REPORT_H_
