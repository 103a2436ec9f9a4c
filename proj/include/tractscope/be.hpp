#pragma once

#include "tractscope/tracts.hpp"

namespace tractscope {

// g(z) = sum_{k>=1} (z/2^k)^(2^k), the Bergweiler-Eremenko series; h = exp(g).
Complex eval_g(const Complex& z, double tol = 1e-15);

// Segments of the infinite tree T on which Re g is very negative.
// B runs radially at angle pi/2^n + 2 pi j / 2^n over r in [r_n, r'_n];
// C+- swing linearly to the two child angles over r in [r'_n, r_{n+1}].
struct TreeSegment {
    enum class Kind { B, CPlus, CMinus };
    Kind kind = Kind::B;
    int n = 1;
    int j = 0;
    double eps = 0.125;

    double r_n() const { return (1.0 + eps) * std::pow(2.0, n + 1); }
    double rp_n() const { return (1.0 - 2.0 * eps) * std::pow(2.0, n + 2); }
    double r_next() const { return (1.0 + eps) * std::pow(2.0, n + 2); }
    double base_angle() const { return M_PI / std::pow(2.0, n) * (1.0 + 2.0 * j); }
};

std::vector<Complex> tree_points(const TreeSegment& seg, int samples);

struct TreeBoundResult {
    bool ok = false;
    double bound = 0.0;      // -2^(2^n)
    double max_re_g = 0.0;   // over the sampled points
    double margin = 0.0;     // bound - max_re_g; positive iff the claim holds
};

TreeBoundResult verify_tree_bound(const TreeSegment& seg, int samples);

struct WindingResult {
    bool dominant = false;   // one series term strictly majorizes the others
    int index_n = 0;         // the dominant index
    int winding = 0;         // argument-principle count; valid iff dominant
    bool arg_monotone = false;
};

WindingResult winding_of_g(double r, int samples);

struct SingleCurveReport {
    int tracts = 0;
    int complete_tracts = 0;
    int complete_m1 = 0;       // complete tracts whose m equals 1
    bool all_complete_m1 = false;
    int tree_intersections = 0;
    int critical_count = 0;
    double max_u = 0.0;
};

// Field/tracts pipeline on h = exp(g): every complete tract should show a
// single boundary curve, avoid the tree, and contain no zero of g'.
SingleCurveReport verify_single_curve_tracts(const Window& window, double R,
                                             double eps = 0.125);

} // namespace tractscope
