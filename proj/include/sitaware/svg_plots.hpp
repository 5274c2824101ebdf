#pragma once

#include <string>

#include "sitaware/meta.hpp"

namespace sitaware::plots {

// All plots render onto a fixed 800x600 canvas with fixed font metrics and
// deterministic element ordering; identical inputs give identical bytes.
std::string forest_svg(const meta::PlotData& plot);
std::string funnel_svg(const meta::PlotData& plot);
std::string residual_svg(const meta::PlotData& plot);

std::string forest_csv(const meta::PlotData& plot);
std::string funnel_csv(const meta::PlotData& plot);
std::string residual_csv(const meta::PlotData& plot);

}  // namespace sitaware::plots
