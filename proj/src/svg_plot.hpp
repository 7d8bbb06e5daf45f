/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The ulsched authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <string>
#include <vector>

namespace ulsched::plot {

struct Series {
    std::string label;
    std::string color;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> err; ///< symmetric error bars; empty for none
    bool dashed = false;
};

struct RefLine {
    double y = 0.0;
    std::string label;
};

struct Panel {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_y = false;
    std::vector<Series> series;
    std::vector<RefLine> ref_lines;
};

/// Lays panels out left to right in one self-contained SVG document.
/// Non-finite points, and non-positive ones on log axes, are skipped.
std::string render(const std::vector<Panel>& panels, double panel_width = 420.0,
                   double panel_height = 300.0);

} // namespace ulsched::plot
