#pragma once

#include <string>

#include "tractscope/tracts.hpp"

namespace tractscope {

struct AnalyzeOptions {
    std::string expr_text;
    double R = 1.0;
    double x0 = -3.0, x1 = 3.0, y0 = -3.0, y1 = 3.0;
    int nx = 601, ny = 601;
    double r_min = 0.0, r_max = 0.0;  // <= 0: module defaults
    int n_radii = 16;
    bool critpoints = true;
};

// Full pipeline: parse -> sample -> contours -> tracts -> channels ->
// classify -> critical counts. Returns the JSON report (deterministic for
// identical options, independent of TRACTSCOPE_THREADS).
std::string run_analysis(const AnalyzeOptions& opt);

// The sampled field for rendering (shared with run_analysis).
ScalarField analysis_field(const AnalyzeOptions& opt);

} // namespace tractscope
