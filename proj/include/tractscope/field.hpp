#pragma once

#include <cstdint>
#include <vector>

#include "tractscope/expr.hpp"

namespace tractscope {

// Rectangular sampling window in plane coordinates.
struct Window {
    double x_min, x_max, y_min, y_max;
    int nx, ny;

    bool valid() const {
        return x_min < x_max && y_min < y_max && nx >= 2 && ny >= 2;
    }
    double dx() const { return (x_max - x_min) / (nx - 1); }
    double dy() const { return (y_max - y_min) / (ny - 1); }
    double x(int i) const { return x_min + i * dx(); }
    double y(int j) const { return y_min + j * dy(); }
    Complex point(int i, int j) const { return Complex(x(i), y(j)); }
    // largest |corner|, the reach of window-clipped circles
    double circumradius() const;
    double inradius() const;
};

// Grid of u(z) = log|f(z)| - log R samples. Masked cells are points where
// f vanished or evaluation failed; they never join a tract.
struct ScalarField {
    Window window;
    std::vector<double> values;   // nx*ny, index i + nx*j
    std::vector<uint8_t> mask;    // 1 = invalid

    double at(int i, int j) const { return values[i + static_cast<size_t>(window.nx) * j]; }
    bool masked(int i, int j) const { return mask[i + static_cast<size_t>(window.nx) * j] != 0; }
    bool positive(int i, int j) const { return !masked(i, j) && at(i, j) > 0.0; }
};

enum class WindowEdge { Bottom, Right, Top, Left };

// Level-set polyline from marching squares.
struct Contour {
    std::vector<Complex> points;
    bool closed = false;
    std::vector<WindowEdge> exits;  // for open contours: edges of the two endpoints
};

struct ComponentLabels {
    std::vector<int32_t> labels;  // nx*ny, -1 = unlabeled
    int count = 0;
    int32_t at(int i, int j, int nx) const { return labels[i + static_cast<size_t>(nx) * j]; }
};

// Number of worker threads: TRACTSCOPE_THREADS if set, else hardware count.
int worker_thread_count();

ScalarField sample_field(const Expr& expr, const Window& window, double R);

// Marching squares at the given level with linear edge interpolation;
// saddle cells are disambiguated by the cell-center (corner mean) sign.
// Contours shorter than 3 points are dropped as grid noise.
std::vector<Contour> extract_contours(const ScalarField& field, double level = 0.0);

// 4-connected labeling of {u > level} (positive=true) or {u < level}.
ComponentLabels label_components(const ScalarField& field, bool positive, double level = 0.0);

} // namespace tractscope
