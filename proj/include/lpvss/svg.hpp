#pragma once

#include <string>

#include "lpvss/mat.hpp"

namespace lpvss {

// Static line chart of measured vs predicted outputs, one panel per channel,
// stacked vertically. Plain SVG, no external assets.
void write_comparison_svg(const Mat& measured, const Mat& predicted, const std::string& path);

}  // namespace lpvss
