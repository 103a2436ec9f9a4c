#pragma once

#include <optional>

#include "tractscope/field.hpp"

namespace tractscope {

// Contiguous run of window-border grid nodes belonging to one component,
// listed in circular border order. Pinches are strict interior local minima
// of u along the run that dip below 5% of the run maximum: they mark places
// where two boundary curves approach each other inside the window even
// though the region between them never quite reaches the border.
struct EdgeRun {
    std::vector<std::pair<int, int>> nodes;
    std::vector<int> pinches;  // indices into nodes
};

// A positive component of u, interpreted as the window portion of a tract.
struct TractRegion {
    int id = -1;             // component label
    double R = 1.0;
    std::vector<int> boundary;   // indices into the contour list
    int open_contours = 0;
    int closed_contours = 0;
    std::vector<EdgeRun> edge_runs;
    int pinch_count = 0;
    // Boundary-curve count m: every open contour is one curve, and every
    // pinch stands in for a second curve whose meeting point with the first
    // lies beyond the window.
    int m = 0;
    bool truncated = false;  // touches the window border
    bool degenerate = false; // closed boundary only: bounded region, not a tract
    // complete = the window shows the whole accessible boundary structure:
    // one border run, no pinches. Only then does m = 1 justify the
    // logarithmic labeling (a tract bounded by a single curve).
    bool complete = false;
    size_t cell_count = 0;
    double max_u = 0.0;
};

std::vector<TractRegion> build_tracts(const ScalarField& field,
                                      const std::vector<Contour>& contours,
                                      const ComponentLabels& labels,
                                      double R);

// One access to infinity of a tract: a connected batch of tract cells
// outside |z| = r_min grown from a single border access.
struct Channel {
    int tract_id = -1;
    double r_min = 0.0, r_max = 0.0;
    std::vector<double> radii;        // ring outer radii (geometric)
    std::vector<double> max_u;        // M profile; only nonempty entries valid
    std::vector<uint8_t> ring_filled;
    std::vector<std::pair<int, int>> ring_argmax;
    std::vector<std::pair<int, int>> cells;
    std::pair<int, int> peak_cell{-1, -1};  // overall argmax of u
    double peak_u = 0.0;
    double direction = 0.0;           // mean outward angle, outermost ring
    double arc_lo = 0.0, arc_hi = 0.0;  // angular extent at the innermost ring
};

// r_min <= 0 picks 0.25 * (smaller window half-extent); r_max <= 0 picks
// 0.95 * window circumradius (rings are clipped to the window, so the
// outermost ones may be partial near the corners).
std::vector<Channel> detect_channels(const TractRegion& tract,
                                     const ScalarField& field,
                                     const ComponentLabels& labels,
                                     double r_min = 0.0,
                                     double r_max = 0.0,
                                     int n_radii = 16);

enum class VerdictKind { ContainsLogarithmicTract, AsymptoticValue, Undetermined };

struct ChannelVerdict {
    VerdictKind kind = VerdictKind::Undetermined;
    Complex alpha{};                 // AsymptoticValue only
    double level = 0.0;              // log(R2/R) used for the Omega test
    int omega_open_contours = -1;    // boundary-curve count of Omega
    std::vector<double> profile;     // M over nonempty rings (evidence)
};

ChannelVerdict classify_channel(const Channel& channel, const ScalarField& field,
                                const Expr& expr, double R);

struct TractReport {
    enum class Label { Logarithmic, Direct, Degenerate };
    Label label = Label::Direct;
    bool bound_violation = false;  // critical count exceeds m - 1
};

TractReport classify_tract(const TractRegion& tract,
                           const std::vector<ChannelVerdict>& verdicts,
                           int critical_count);

// Shared helper: component label bordered by a contour's positive side.
int contour_component(const Contour& contour, const ScalarField& field,
                      const ComponentLabels& labels, double level = 0.0);

} // namespace tractscope
